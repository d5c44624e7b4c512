#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hptr/autodiff.hpp"
#include "hptr/treebank.hpp"

namespace hptr {

// Precomputed per-token vectors for one sentence (dim x n).
struct ExternalEmbedding {
  std::string sent_id;
  ad::Matrix<float> vectors;
};

// Text format, one block per sentence:
//   # <sent_id> <dim> <n>
//   n lines of `dim` whitespace-separated decimals, in token order
std::vector<ExternalEmbedding> parse_external_embeddings(std::string_view text);
std::vector<ExternalEmbedding> read_external_embeddings(const std::string& path);
std::string write_external_embeddings(std::span<const ExternalEmbedding> embeddings);

// Checks that embeddings line up with the treebank: same sentence count, one
// vector per token, a common dimension, and matching sent_ids where the
// sentence has one. Returns the dimension. Throws DataError.
int check_alignment(std::span<const ExternalEmbedding> embeddings, std::span<const Sentence> tb);

}  // namespace hptr
