#pragma once

// Helpers shared by the unit tests and the acceptance runner. The brute-force
// searches here are deliberately naive and independent of the library's
// oracle and MST code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "compparse/autodiff.h"
#include "compparse/conllu.h"
#include "compparse/transition.h"

namespace testing_support {

using compparse::Configuration;
using compparse::Transition;
using compparse::TransitionKind;

// Uniform-ish random tree: nodes in random order, each attached to a node
// placed before it (the root comes first).
inline std::vector<int> random_tree(int n, std::mt19937_64& rng) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> heads(n + 1, -1);
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i);
    const int j = pick(rng);  // 0 = root, j > 0 = order[j - 1]
    heads[order[i]] = j == 0 ? 0 : order[j - 1];
  }
  return heads;
}

// Random projective tree: recursive interval splitting.
inline std::vector<int> random_projective_tree(int n, std::mt19937_64& rng) {
  std::vector<int> heads(n + 1, -1);
  std::function<void(int, int, int)> build = [&](int lo, int hi, int head) {
    if (lo > hi) return;
    std::uniform_int_distribution<int> pick(lo, hi);
    const int h = pick(rng);
    heads[h] = head;
    build(lo, h - 1, h);
    build(h + 1, hi, h);
  };
  build(1, n, 0);
  return heads;
}

inline bool is_projective(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size()) - 1;
  for (int a = 1; a <= n; ++a) {
    const int al = std::min(a, heads[a]), ar = std::max(a, heads[a]);
    for (int b = 1; b <= n; ++b) {
      const int bl = std::min(b, heads[b]), br = std::max(b, heads[b]);
      if (al < bl && bl < ar && ar < br) return false;
    }
  }
  return true;
}

// One byte per entry; positions stay far below 255 in these tests.
inline std::string key(const Configuration& c) {
  std::string k;
  for (int s : c.stack()) k += static_cast<char>(s + 1);
  k += '|';
  for (int b : c.buffer()) k += static_cast<char>(b + 1);
  k += '|';
  for (std::size_t i = 1; i < c.heads().size(); ++i) k += static_cast<char>(c.heads()[i] + 1);
  return k;
}

/// Minimal number of wrong heads over all completions of a configuration in
/// the static-swap regime: SWAP is taken exactly when the stack top follows
/// the buffer front in the gold projective order, and is the only move then.
/// Given gold labels, a correct head under a wrong label also counts as one
/// error and arc moves range over every label.
class MinimalLoss {
 public:
  explicit MinimalLoss(std::vector<int> gold, std::vector<int> gold_labels = {},
                       int label_count = 0)
      : gold_(std::move(gold)),
        gold_labels_(std::move(gold_labels)),
        label_count_(label_count),
        order_(reference_order(gold_)) {}

  bool labeled() const { return label_count_ > 0; }

  bool swap_due(const Configuration& c) const {
    return c.s0() > 0 && c.b0() > 0 && c.s0() < c.b0() && order_[c.s0()] > order_[c.b0()];
  }

  // Moves allowed in the static-swap regime.
  std::vector<TransitionKind> moves(const Configuration& c) const {
    if (swap_due(c)) return {TransitionKind::Swap};
    std::vector<TransitionKind> out;
    for (auto k : {TransitionKind::Shift, TransitionKind::LeftArc, TransitionKind::RightArc})
      if (c.legal(k)) out.push_back(k);
    return out;
  }

  // Moves with every label spelled out for arc kinds (label -1 when unlabeled).
  std::vector<Transition> transitions(const Configuration& c) const {
    std::vector<Transition> out;
    for (auto m : moves(c)) {
      const bool arc = m == TransitionKind::LeftArc || m == TransitionKind::RightArc;
      if (!arc || !labeled()) {
        out.push_back({m, -1});
        continue;
      }
      for (int l = 0; l < label_count_; ++l) out.push_back({m, l});
    }
    return out;
  }

  int loss(const Configuration& c) {
    auto k = key(c);
    if (labeled())
      for (std::size_t i = 1; i < c.labels().size(); ++i) k += static_cast<char>(c.labels()[i] + 1);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    int best;
    if (c.is_terminal()) {
      best = 0;
      for (std::size_t d = 1; d < gold_.size(); ++d) {
        if (c.heads()[d] != gold_[d])
          ++best;
        else if (labeled() && c.labels()[d] != gold_labels_[d])
          ++best;
      }
    } else {
      best = 1 << 20;
      for (const auto& t : transitions(c)) best = std::min(best, loss(compparse::apply(c, t)));
    }
    memo_[k] = best;
    return best;
  }

  const std::vector<int>& order() const { return order_; }

 private:
  // In-order walk written independently of the library: sort each head with
  // its dependents by position and recurse.
  static std::vector<int> reference_order(const std::vector<int>& heads) {
    const int n = static_cast<int>(heads.size()) - 1;
    std::vector<int> rank(n + 1, -1);
    int next = 0;
    std::function<void(int)> walk = [&](int h) {
      std::vector<int> items{h};
      for (int d = 1; d <= n; ++d)
        if (heads[d] == h) items.push_back(d);
      std::sort(items.begin(), items.end());
      for (int x : items) {
        if (x == h)
          rank[h] = next++;
        else
          walk(x);
      }
    };
    walk(0);
    return rank;
  }

  std::vector<int> gold_;
  std::vector<int> gold_labels_;
  int label_count_;
  std::vector<int> order_;
  std::unordered_map<std::string, int> memo_;
};

// Central finite differences against analytic gradients of a scalar function
// of the store's parameters. Returns the largest relative error, where
// rel = |a - n| / max(|a|, |n|, floor).
struct GradCheck {
  double max_rel = 0.0;
  std::string worst;
  std::size_t checked = 0;
};

inline GradCheck gradient_check(compparse::ad::ParameterStore& store,
                                const std::function<compparse::ad::Expr(compparse::ad::Graph&)>& f,
                                double step = 1e-5, double floor = 1e-3) {
  using namespace compparse::ad;
  store.zero_grad();
  {
    Graph g;
    g.backward(f(g));
  }
  GradCheck out;
  for (auto& p : store) {
    const Matrix analytic = p->grad();
    for (Eigen::Index i = 0; i < p->value().size(); ++i) {
      double& x = p->value().data()[i];
      const double saved = x;
      x = saved + step;
      double up, down;
      {
        Graph g;
        up = f(g).scalar();
      }
      x = saved - step;
      {
        Graph g;
        down = f(g).scalar();
      }
      x = saved;
      const double numeric = (up - down) / (2 * step);
      const double a = analytic.data()[i];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      ++out.checked;
      if (rel > out.max_rel) {
        out.max_rel = rel;
        out.worst = p->name() + "[" + std::to_string(i) + "] analytic " + std::to_string(a) +
                    " numeric " + std::to_string(numeric);
      }
    }
  }
  store.zero_grad();
  return out;
}

// Brute-force maximum arborescence weight: every head assignment, filtered
// for acyclicity.
inline long brute_force_max_arborescence(const std::vector<std::vector<int>>& w) {
  const int n = static_cast<int>(w.size()) - 1;
  std::vector<int> heads(n + 1, 0);
  long best = -1;
  std::function<void(int)> rec = [&](int d) {
    if (d > n) {
      if (!compparse::tree_violation(heads).empty()) return;
      long total = 0;
      for (int x = 1; x <= n; ++x) total += w[heads[x]][x];
      best = std::max(best, total);
      return;
    }
    for (int h = 0; h <= n; ++h) {
      if (h == d) continue;
      heads[d] = h;
      rec(d + 1);
    }
  };
  rec(1);
  return best;
}

}  // namespace testing_support
