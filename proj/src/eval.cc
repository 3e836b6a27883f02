#include "compparse/eval.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

namespace compparse {

Score score_trees(const Treebank& gold, const Treebank& pred) {
  if (gold.size() != pred.size())
    throw std::invalid_argument("score_trees: gold has " + std::to_string(gold.size()) +
                                " sentences, prediction has " + std::to_string(pred.size()));
  std::size_t tokens = 0, heads = 0, labeled = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto& g = gold.sentences[s];
    const auto& p = pred.sentences[s];
    if (g.size() != p.size())
      throw std::invalid_argument("score_trees: sentence " + std::to_string(s + 1) +
                                  " differs in length");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto& gt = g.tokens[i];
      const auto& pt = p.tokens[i];
      if (!gt.head) throw std::invalid_argument("score_trees: gold token without head");
      ++tokens;
      if (!pt.head || *pt.head != *gt.head) continue;
      ++heads;
      if (universal_relation(gt.deprel.value_or("")) == universal_relation(pt.deprel.value_or("")))
        ++labeled;
    }
  }
  Score sc;
  sc.token_count = tokens;
  if (tokens) {
    sc.uas = static_cast<double>(heads) / tokens;
    sc.las = static_cast<double>(labeled) / tokens;
  }
  return sc;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson: lengths differ");
  if (xs.size() < 3) throw std::invalid_argument("pearson: need at least 3 points");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0 || syy == 0) throw std::invalid_argument("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string column_name(Extractor e, Composition c) {
  return c == Composition::None ? to_string(e) : to_string(e) + "+" + to_string(c);
}

bool bold_marker(double base, double composed) {
  return composed - base > GridReport::kBoldThreshold;
}

GridReport grid_report(const std::map<GridKey, double>& results) {
  std::set<std::string> languages;
  bool has_rc = false;
  for (const auto& [k, v] : results) {
    languages.insert(k.language);
    if (k.composition == Composition::Recurrent) has_rc = true;
  }
  struct Column {
    Extractor e;
    Composition c;
  };
  std::vector<Column> columns;
  for (auto e : {Extractor::Bi, Extractor::Backward, Extractor::Forward}) {
    columns.push_back({e, Composition::None});
    if (has_rc) columns.push_back({e, Composition::Recurrent});
    columns.push_back({e, Composition::Lstm});
  }

  GridReport report;
  for (bool pos : {true, false}) {
    for (bool chr : {true, false}) {
      GridReport::Block block;
      block.pos = pos;
      block.chr = chr;
      block.languages.assign(languages.begin(), languages.end());
      for (const auto& col : columns) block.columns.push_back(column_name(col.e, col.c));
      std::vector<double> sums(columns.size(), 0.0);
      std::vector<int> counts(columns.size(), 0);
      for (const auto& lang : languages) {
        auto& row = block.rows[lang];
        for (std::size_t j = 0; j < columns.size(); ++j) {
          GridReport::Cell cell;
          if (auto it = results.find({lang, columns[j].e, columns[j].c, pos, chr});
              it != results.end()) {
            cell.las = it->second;
            sums[j] += it->second;
            ++counts[j];
          }
          row.push_back(cell);
        }
      }
      auto& av = block.rows["av"];
      for (std::size_t j = 0; j < columns.size(); ++j) {
        GridReport::Cell cell;
        if (counts[j]) cell.las = sums[j] / counts[j];
        av.push_back(cell);
      }
      // Bold: composed column beats the uncomposed column of its extractor.
      for (auto& [name, row] : block.rows) {
        std::size_t base = 0;
        for (std::size_t j = 0; j < columns.size(); ++j) {
          if (columns[j].c == Composition::None) {
            base = j;
            continue;
          }
          if (row[j].las && row[base].las) row[j].bold = bold_marker(*row[base].las, *row[j].las);
        }
      }
      report.blocks.push_back(std::move(block));
    }
  }
  return report;
}

namespace {

std::string block_title(const GridReport::Block& b) {
  return std::string("pos") + (b.pos ? "+" : "-") + "char" + (b.chr ? "+" : "-");
}

std::string cell_text(const GridReport::Cell& c) {
  if (!c.las) return "-";
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << *c.las;
  if (c.bold) out << '*';
  return out.str();
}

template <typename Fn>
void for_each_row(const GridReport::Block& b, Fn fn) {
  for (const auto& lang : b.languages) fn(lang, b.rows.at(lang));
  fn("av", b.rows.at("av"));
}

}  // namespace

std::string GridReport::to_text() const {
  std::ostringstream out;
  for (const auto& b : blocks) {
    out << block_title(b) << '\n' << std::left << std::setw(8) << "lang";
    for (const auto& c : b.columns) out << std::right << std::setw(9) << c;
    out << '\n';
    for_each_row(b, [&](const std::string& name, const std::vector<Cell>& row) {
      out << std::left << std::setw(8) << name;
      for (const auto& cell : row) out << std::right << std::setw(9) << cell_text(cell);
      out << '\n';
    });
    out << '\n';
  }
  out << "* composed column exceeds its base by more than " << kBoldThreshold << " LAS\n";
  return out.str();
}

std::string GridReport::to_tsv() const {
  std::ostringstream out;
  out << "block\tlang";
  if (!blocks.empty())
    for (const auto& c : blocks.front().columns) out << '\t' << c;
  out << '\n';
  for (const auto& b : blocks) {
    for_each_row(b, [&](const std::string& name, const std::vector<Cell>& row) {
      out << block_title(b) << '\t' << name;
      for (const auto& cell : row) out << '\t' << cell_text(cell);
      out << '\n';
    });
  }
  return out.str();
}

}  // namespace compparse
