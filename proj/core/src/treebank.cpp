#include "hptr/treebank.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hptr/error.hpp"

namespace hptr {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cols;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::string> opt_field(std::string_view s) {
  if (s == "_") return std::nullopt;
  return std::string(s);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct PendingSentence {
  Sentence sentence;
  std::vector<std::size_t> token_lines;
  bool started = false;
};

void finish(PendingSentence& pending, Treebank& out) {
  if (!pending.started) return;
  auto& s = pending.sentence;
  const int n = static_cast<int>(s.tokens.size());
  for (std::size_t k = 0; k < s.tokens.size(); ++k) {
    const int h = s.tokens[k].head;
    if (h < 0 || h > n)
      throw ParseError(pending.token_lines[k], "head " + std::to_string(h) + " out of range [0, " +
                                                   std::to_string(n) + "]");
    if (h == s.tokens[k].index) throw ParseError(pending.token_lines[k], "token is its own head");
  }
  out.push_back(std::move(s));
  pending = PendingSentence{};
}

}  // namespace

DepTree tree_of(const Sentence& s) {
  DepTree t;
  t.heads.reserve(s.size());
  t.labels.reserve(s.size());
  for (const auto& tok : s.tokens) {
    t.heads.push_back(tok.head);
    t.labels.push_back(tok.deprel);
  }
  return t;
}

Sentence with_tree(Sentence s, const DepTree& tree) {
  if (tree.heads.size() != s.size()) throw DataError("tree size does not match sentence size");
  for (std::size_t k = 0; k < s.size(); ++k) {
    s.tokens[k].head = tree.heads[k];
    if (k < tree.labels.size()) s.tokens[k].deprel = tree.labels[k];
  }
  return s;
}

Treebank parse_conllu(std::string_view text) {
  Treebank out;
  PendingSentence pending;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (trim(line).empty()) {
      finish(pending, out);
      continue;
    }
    pending.started = true;
    auto& s = pending.sentence;
    if (line.front() == '#') {
      std::string_view body = line.substr(1);
      std::string_view t = trim(body);
      if (t.starts_with("sent_id")) {
        auto eq = t.find('=');
        if (eq != std::string_view::npos) {
          s.id = std::string(trim(t.substr(eq + 1)));
          continue;
        }
      }
      s.comments.emplace_back(body);
      continue;
    }

    auto cols = split_tabs(line);
    if (cols.size() != 10)
      throw ParseError(line_no, "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
    if (cols[0].find_first_of("-.") != std::string_view::npos) {
      s.passthrough.push_back({s.tokens.size(), std::string(line)});
      continue;
    }
    auto index = to_int(cols[0]);
    if (!index) throw ParseError(line_no, "non-integer token index '" + std::string(cols[0]) + "'");
    if (*index != static_cast<int>(s.tokens.size()) + 1)
      throw ParseError(line_no, "token index " + std::to_string(*index) + " breaks the 1..n sequence");
    auto head = to_int(cols[6]);
    if (!head) throw ParseError(line_no, "non-integer head '" + std::string(cols[6]) + "'");

    Token tok;
    tok.index = *index;
    tok.form = std::string(cols[1]);
    tok.lemma = opt_field(cols[2]);
    tok.upos = std::string(cols[3]);
    tok.xpos = opt_field(cols[4]);
    tok.feats = std::string(cols[5]);
    tok.head = *head;
    tok.deprel = std::string(cols[7]);
    tok.deps = std::string(cols[8]);
    tok.misc = opt_field(cols[9]);
    s.tokens.push_back(std::move(tok));
    pending.token_lines.push_back(line_no);
  }
  finish(pending, out);
  return out;
}

std::string write_conllu(std::span<const Sentence> sentences) {
  std::ostringstream os;
  for (const auto& s : sentences) {
    if (s.id) os << "# sent_id = " << *s.id << '\n';
    for (const auto& c : s.comments) os << '#' << c << '\n';
    std::size_t pt = 0;
    for (std::size_t k = 0; k <= s.tokens.size(); ++k) {
      while (pt < s.passthrough.size() && s.passthrough[pt].before_token == k) {
        os << s.passthrough[pt].text << '\n';
        ++pt;
      }
      if (k == s.tokens.size()) break;
      const auto& t = s.tokens[k];
      os << t.index << '\t' << t.form << '\t' << t.lemma.value_or("_") << '\t' << t.upos << '\t'
         << t.xpos.value_or("_") << '\t' << t.feats << '\t' << t.head << '\t' << t.deprel << '\t'
         << t.deps << '\t' << t.misc.value_or("_") << '\n';
    }
    for (; pt < s.passthrough.size(); ++pt) os << s.passthrough[pt].text << '\n';
    os << '\n';
  }
  return os.str();
}

Treebank read_conllu_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_conllu(buf.str());
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_conllu_file(const std::string& path, std::span<const Sentence> sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << write_conllu(sentences);
}

std::string TreeValidation::message() const {
  auto list = [this] {
    std::string s;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += (i ? "," : "") + std::to_string(nodes[i]);
    return s;
  };
  switch (kind) {
    case TreeViolation::kNone: return "valid";
    case TreeViolation::kHeadOutOfRange: return "head out of range at {" + list() + "}";
    case TreeViolation::kSelfLoop: return "self loop at {" + list() + "}";
    case TreeViolation::kCycle: return "cycle {" + list() + "}";
    case TreeViolation::kUnreachable: return "unreachable from root {" + list() + "}";
  }
  return "unknown";
}

TreeValidation validate_tree(std::span<const int> heads) {
  const int n = static_cast<int>(heads.size());
  for (int d = 1; d <= n; ++d) {
    const int h = heads[d - 1];
    if (h < 0 || h > n) return {TreeViolation::kHeadOutOfRange, {d}};
    if (h == d) return {TreeViolation::kSelfLoop, {d}};
  }
  // 0 = unvisited, 1 = on current path, 2 = known to reach root.
  std::vector<int> color(n + 1, 0);
  color[0] = 2;
  std::vector<int> path;
  for (int start = 1; start <= n; ++start) {
    path.clear();
    int v = start;
    while (color[v] == 0) {
      color[v] = 1;
      path.push_back(v);
      v = heads[v - 1];
    }
    if (color[v] == 1) {
      auto it = std::find(path.begin(), path.end(), v);
      std::vector<int> cycle(it, path.end());
      std::sort(cycle.begin(), cycle.end());
      return {TreeViolation::kCycle, cycle};
    }
    for (int u : path) color[u] = 2;
  }
  return {};
}

bool arcs_cross(int h1, int d1, int h2, int d2) {
  const int a = std::min(h1, d1), b = std::max(h1, d1);
  const int c = std::min(h2, d2), d = std::max(h2, d2);
  return (a < c && c < b && b < d) || (c < a && a < d && d < b);
}

bool is_projective(std::span<const int> heads) {
  const int n = static_cast<int>(heads.size());
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (arcs_cross(heads[i - 1], i, heads[j - 1], j)) return false;
  return true;
}

TreebankStats arc_stats(std::span<const Sentence> tb, bool include_root_arcs) {
  if (tb.empty()) throw DataError("arc statistics of an empty treebank");
  TreebankStats st;
  st.sentence_count = tb.size();
  for (const auto& s : tb) {
    st.token_count += s.size();
    for (const auto& t : s.tokens) {
      if (t.head == 0 && !include_root_arcs) continue;
      ++st.arc_count;
      if (std::abs(t.head - t.index) > kLongArcThreshold) {
        ++st.long_arc_count;
        if (t.head > t.index) ++st.left_long_arc_count;
      }
    }
  }
  if (st.arc_count > 0)
    st.pct_long_arcs = static_cast<double>(st.long_arc_count) / static_cast<double>(st.arc_count);
  if (st.long_arc_count > 0)
    st.pct_left_of_long =
        static_cast<double>(st.left_long_arc_count) / static_cast<double>(st.long_arc_count);
  return st;
}

}  // namespace hptr
