#include "compparse/conllu.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace compparse {

ConlluError::ConlluError(const std::string& what, std::size_t sentence, std::size_t line)
    : std::runtime_error("sentence " + std::to_string(sentence) + ", line " +
                         std::to_string(line) + ": " + what),
      sentence_(sentence),
      line_(line) {}

bool Sentence::has_heads() const {
  return !tokens.empty() &&
         std::all_of(tokens.begin(), tokens.end(), [](const Token& t) { return t.head.has_value(); });
}

std::vector<int> Sentence::heads() const {
  std::vector<int> h(tokens.size() + 1, -1);
  for (std::size_t i = 0; i < tokens.size(); ++i) h[i + 1] = tokens[i].head.value_or(-1);
  return h;
}

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (int k = 1; ok && k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string universal_relation(std::string_view deprel) {
  return std::string(deprel.substr(0, deprel.find(':')));
}

std::string tree_violation(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size()) - 1;
  for (int d = 1; d <= n; ++d) {
    if (heads[d] < 0 || heads[d] > n) return "head out of range for token " + std::to_string(d);
    if (heads[d] == d) return "token " + std::to_string(d) + " is its own head";
  }
  // 0 = unvisited, 1 = on current path, 2 = known to reach root
  std::vector<int> state(n + 1, 0);
  state[0] = 2;
  for (int d = 1; d <= n; ++d) {
    int x = d;
    std::vector<int> path;
    while (state[x] == 0) {
      state[x] = 1;
      path.push_back(x);
      x = heads[x];
    }
    if (state[x] == 1) return "cyclic tree";
    for (int p : path) state[p] = 2;
  }
  return {};
}

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

std::optional<std::string> optional_column(std::string_view col) {
  if (col == "_") return std::nullopt;
  return std::string(col);
}

struct SentenceBuilder {
  Sentence sentence;
  std::vector<std::size_t> token_lines;
  std::size_t first_line = 0;

  bool empty() const { return sentence.tokens.empty() && sentence.comments.empty(); }
};

void finish(SentenceBuilder& b, std::size_t ordinal, Treebank& tb) {
  if (b.sentence.tokens.empty()) return;
  auto& toks = b.sentence.tokens;
  const auto heads_present = std::count_if(toks.begin(), toks.end(),
                                           [](const Token& t) { return t.head.has_value(); });
  if (heads_present != 0 && heads_present != static_cast<long>(toks.size()))
    throw ConlluError("some but not all tokens have a head", ordinal, b.first_line);
  if (heads_present != 0) {
    const int n = static_cast<int>(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const int h = *toks[i].head;
      if (h < 0 || h > n) throw ConlluError("head out of range", ordinal, b.token_lines[i]);
      if (h == toks[i].id) throw ConlluError("token is its own head", ordinal, b.token_lines[i]);
      if (!toks[i].deprel) throw ConlluError("missing deprel", ordinal, b.token_lines[i]);
    }
    if (auto v = tree_violation(b.sentence.heads()); !v.empty())
      throw ConlluError(v, ordinal, b.first_line);
  }
  tb.sentences.push_back(std::move(b.sentence));
}

}  // namespace

Treebank parse_conllu(std::string_view text, std::string name) {
  Treebank tb;
  tb.name = std::move(name);
  SentenceBuilder cur;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const std::size_t ordinal = tb.sentences.size() + 1;
    if (line.empty()) {
      finish(cur, ordinal, tb);
      cur = SentenceBuilder{};
      continue;
    }
    if (cur.empty()) cur.first_line = line_no;
    if (line.front() == '#') {
      cur.sentence.comments.emplace_back(line);
      continue;
    }
    auto cols = split_tabs(line);
    if (cols.size() != 10)
      throw ConlluError("expected 10 columns, found " + std::to_string(cols.size()), ordinal,
                        line_no);
    const auto id_col = cols[0];
    if (id_col.find('-') != std::string_view::npos || id_col.find('.') != std::string_view::npos)
      continue;  // multiword token or empty node

    Token tok;
    auto [p, ec] = std::from_chars(id_col.data(), id_col.data() + id_col.size(), tok.id);
    if (ec != std::errc() || p != id_col.data() + id_col.size())
      throw ConlluError("non-integer id '" + std::string(id_col) + "'", ordinal, line_no);
    if (tok.id != static_cast<int>(cur.sentence.tokens.size()) + 1)
      throw ConlluError("token ids are not consecutive", ordinal, line_no);
    tok.form = std::string(cols[1]);
    tok.chars = decode_utf8(tok.form);
    tok.upos = optional_column(cols[3]);
    if (cols[6] != "_") {
      int h = 0;
      auto [hp, hec] = std::from_chars(cols[6].data(), cols[6].data() + cols[6].size(), h);
      if (hec != std::errc() || hp != cols[6].data() + cols[6].size())
        throw ConlluError("non-integer head '" + std::string(cols[6]) + "'", ordinal, line_no);
      tok.head = h;
    }
    tok.deprel = optional_column(cols[7]);
    cur.sentence.tokens.push_back(std::move(tok));
    cur.token_lines.push_back(line_no);
  }
  finish(cur, tb.sentences.size() + 1, tb);
  return tb;
}

std::string write_conllu(const Treebank& tb) {
  std::ostringstream out;
  for (const auto& s : tb.sentences) {
    for (const auto& c : s.comments) out << c << '\n';
    for (const auto& t : s.tokens) {
      out << t.id << '\t' << t.form << "\t_\t" << t.upos.value_or("_") << "\t_\t_\t";
      if (t.head)
        out << *t.head;
      else
        out << '_';
      out << '\t' << t.deprel.value_or("_") << "\t_\t_\n";
    }
    out << '\n';
  }
  return out.str();
}

Treebank read_conllu_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto name = path.substr(path.find_last_of('/') + 1);
  return parse_conllu(buf.str(), name.substr(0, name.find('.')));
}

void write_conllu_file(const Treebank& tb, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << write_conllu(tb);
}

const std::set<std::string>& default_content_relations() {
  static const std::set<std::string> rels = {
      "nsubj", "obj",    "iobj",     "csubj", "ccomp",    "xcomp",  "obl",
      "vocative", "expl", "dislocated", "advcl", "advmod", "discourse", "nmod",
      "appos",  "nummod", "acl",      "amod",  "conj",     "fixed",  "flat",
      "compound", "list", "parataxis", "orphan", "goeswith", "reparandum"};
  return rels;
}

std::vector<int> arc_depths(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size()) - 1;
  std::vector<int> depth(n + 1, -1);
  depth[0] = 0;
  for (int d = 1; d <= n; ++d) {
    std::vector<int> path;
    int x = d;
    while (depth[x] < 0) {
      path.push_back(x);
      x = heads[x];
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it) depth[*it] = depth[heads[*it]] + 1;
  }
  return depth;
}

std::vector<bool> crossed_arcs(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size()) - 1;
  std::vector<bool> crossed(n + 1, false);
  for (int a = 1; a <= n; ++a) {
    const int al = std::min(a, heads[a]), ar = std::max(a, heads[a]);
    for (int b = a + 1; b <= n; ++b) {
      const int bl = std::min(b, heads[b]), br = std::max(b, heads[b]);
      const bool cross = (al < bl && bl < ar && ar < br) || (bl < al && al < br && br < ar);
      if (cross) crossed[a] = crossed[b] = true;
    }
  }
  return crossed;
}

TreebankStats treebank_stats(const Treebank& tb, const std::set<std::string>& content_relations) {
  if (tb.empty()) throw std::invalid_argument("treebank_stats: empty treebank");
  TreebankStats st;
  std::size_t right = 0;
  double dep_len = 0.0, depth_sum = 0.0;
  std::size_t crossed_count = 0;
  for (const auto& s : tb.sentences) {
    if (!s.has_heads()) throw std::invalid_argument("treebank_stats: sentence without heads");
    ++st.sentence_count;
    st.token_count += s.size();
    const auto heads = s.heads();
    const auto depth = arc_depths(heads);
    const auto crossed = crossed_arcs(heads);
    for (std::size_t d = 1; d < heads.size(); ++d) {
      depth_sum += depth[d];
      if (crossed[d]) ++crossed_count;
      const int h = heads[d];
      if (h == 0) continue;
      ++st.arc_count;
      dep_len += std::abs(h - static_cast<int>(d));
      const auto rel = universal_relation(s.tokens[d - 1].deprel.value_or(""));
      if (content_relations.count(rel)) {
        ++st.content_arc_count;
        if (h > static_cast<int>(d)) ++right;
      }
    }
  }
  // Root attachments count as arcs for crossing, not for length statistics.
  const std::size_t all_arcs = st.token_count;
  st.avg_sentence_length = static_cast<double>(st.token_count) / st.sentence_count;
  st.avg_arc_depth = st.token_count ? depth_sum / st.token_count : 0.0;
  st.avg_dependency_length = st.arc_count ? dep_len / st.arc_count : 0.0;
  st.nonprojective_arc_fraction =
      all_arcs ? static_cast<double>(crossed_count) / all_arcs : 0.0;
  if (st.content_arc_count) {
    st.right_headedness = static_cast<double>(right) / st.content_arc_count;
    st.left_headedness = 1.0 - *st.right_headedness;
  }
  return st;
}

}  // namespace compparse
