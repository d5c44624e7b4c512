#include "hptr/embeddings.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "hptr/error.hpp"

namespace hptr {

std::vector<ExternalEmbedding> parse_external_embeddings(std::string_view text) {
  std::vector<ExternalEmbedding> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[0] != '#') throw ParseError(line_no, "expected '# sent_id dim n' header");
    std::istringstream hdr(line.substr(1));
    ExternalEmbedding e;
    long dim = -1, n = -1;
    if (!(hdr >> e.sent_id >> dim >> n) || dim < 1 || n < 0)
      throw ParseError(line_no, "malformed embedding header");
    e.vectors.resize(dim, n);
    for (long t = 0; t < n; ++t) {
      if (!std::getline(in, line)) throw ParseError(line_no, "missing vector lines for " + e.sent_id);
      ++line_no;
      std::istringstream row(line);
      for (long k = 0; k < dim; ++k) {
        double v = 0;
        if (!(row >> v)) throw ParseError(line_no, "expected " + std::to_string(dim) + " values");
        e.vectors(k, t) = static_cast<float>(v);
      }
      std::string extra;
      if (row >> extra) throw ParseError(line_no, "more than " + std::to_string(dim) + " values");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ExternalEmbedding> read_external_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_external_embeddings(buf.str());
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string write_external_embeddings(std::span<const ExternalEmbedding> embeddings) {
  std::ostringstream os;
  os << std::setprecision(9);
  for (const auto& e : embeddings) {
    os << "# " << e.sent_id << ' ' << e.vectors.rows() << ' ' << e.vectors.cols() << '\n';
    for (ad::Index t = 0; t < e.vectors.cols(); ++t) {
      for (ad::Index k = 0; k < e.vectors.rows(); ++k) os << (k ? " " : "") << e.vectors(k, t);
      os << '\n';
    }
  }
  return os.str();
}

int check_alignment(std::span<const ExternalEmbedding> embeddings, std::span<const Sentence> tb) {
  if (embeddings.size() != tb.size())
    throw DataError("external embeddings cover " + std::to_string(embeddings.size()) + " sentences, treebank has " +
                    std::to_string(tb.size()));
  int dim = -1;
  for (std::size_t i = 0; i < tb.size(); ++i) {
    const auto& e = embeddings[i];
    const std::string where = tb[i].id ? *tb[i].id : "#" + std::to_string(i + 1);
    if (tb[i].id && e.sent_id != *tb[i].id)
      throw DataError("external embeddings out of order: got '" + e.sent_id + "' for sentence " + where);
    if (e.vectors.cols() != static_cast<ad::Index>(tb[i].size()))
      throw DataError("external embeddings for sentence " + where + " have " + std::to_string(e.vectors.cols()) +
                      " vectors, sentence has " + std::to_string(tb[i].size()) + " tokens");
    if (dim < 0) dim = static_cast<int>(e.vectors.rows());
    if (e.vectors.rows() != dim) throw DataError("inconsistent external embedding dimension at sentence " + where);
  }
  return dim < 0 ? 0 : dim;
}

}  // namespace hptr
