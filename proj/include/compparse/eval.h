#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "compparse/config.h"
#include "compparse/conllu.h"

namespace compparse {

struct Score {
  double uas = 0.0;
  double las = 0.0;
  std::size_t token_count = 0;
};

// Micro-averaged over every token, punctuation included. Labels are compared
// after stripping subtypes.
Score score_trees(const Treebank& gold, const Treebank& pred);

// Sample Pearson correlation. Throws on fewer than 3 points or zero variance.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

struct GridKey {
  std::string language;
  Extractor extractor = Extractor::Bi;
  Composition composition = Composition::None;
  bool pos = true;
  bool chr = true;

  auto tie() const {
    return std::tie(language, extractor, composition, pos, chr);
  }
  bool operator<(const GridKey& o) const { return tie() < o.tie(); }
  bool operator==(const GridKey& o) const { return tie() == o.tie(); }
};

// Column label such as "bw+lc".
std::string column_name(Extractor e, Composition c);

/// Table 1 style report: four blocks (pos+/-, char+/-), one row per language
/// plus an "av" row of unweighted means. A composed cell is marked bold when it
/// beats its uncomposed base by more than the threshold (LAS points).
class GridReport {
 public:
  static constexpr double kBoldThreshold = 0.5;

  struct Cell {
    std::optional<double> las;  // percent
    bool bold = false;
  };
  struct Block {
    bool pos = true;
    bool chr = true;
    std::vector<std::string> columns;
    std::vector<std::string> languages;  // rows, "av" excluded
    std::map<std::string, std::vector<Cell>> rows;  // language and "av"
  };

  std::vector<Block> blocks;

  std::string to_text() const;
  std::string to_tsv() const;
};

// results hold LAS in percent.
GridReport grid_report(const std::map<GridKey, double>& results);

// Bold rule in isolation: composed - base > threshold.
bool bold_marker(double base, double composed);

}  // namespace compparse
