#pragma once

// Arc-hybrid transition system with SWAP, and its static-dynamic oracle.
//
// The root (position 0) sits at the bottom of the stack from the start; the
// buffer holds 1..n. Transitions:
//
//   SHIFT          move b0 onto the stack
//   LEFT_ARC(l)    add b0 -l-> s0, pop s0
//   RIGHT_ARC(l)   add s1 -l-> s0, pop s0
//   SWAP           pop s0 and reinsert it right after b0
//
// SWAP requires s0 to precede b0 in the original word order, so every pair of
// words is swapped at most once and derivations are at most n^2 + n long.
// The parser still enforces a looser hard cap of n^2 + 4n steps.

#include <array>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace compparse {

enum class TransitionKind { Shift = 0, Swap = 1, LeftArc = 2, RightArc = 3 };
constexpr std::array<TransitionKind, 4> kAllTransitionKinds = {
    TransitionKind::Shift, TransitionKind::Swap, TransitionKind::LeftArc,
    TransitionKind::RightArc};

std::string to_string(TransitionKind k);

struct Transition {
  TransitionKind kind = TransitionKind::Shift;
  int label = -1;  // arc transitions only

  bool is_arc() const {
    return kind == TransitionKind::LeftArc || kind == TransitionKind::RightArc;
  }
  bool operator==(const Transition&) const = default;
};

class IllegalTransition : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Configuration {
 public:
  // initial_config: stack [0], buffer [1..n], no arcs.
  explicit Configuration(int n);

  int sentence_length() const { return n_; }
  const std::vector<int>& stack() const { return stack_; }
  // Buffer front to back.
  std::vector<int> buffer() const { return {buffer_.rbegin(), buffer_.rend()}; }
  std::size_t buffer_size() const { return buffer_.size(); }
  std::size_t stack_size() const { return stack_.size(); }
  bool in_buffer(int pos) const;

  // -1 when the slot is empty.
  int s0() const { return stack_.empty() ? -1 : stack_.back(); }
  int s1() const { return stack_.size() < 2 ? -1 : stack_[stack_.size() - 2]; }
  int b0() const { return buffer_.empty() ? -1 : buffer_.back(); }

  // Assigned head/label per position (-1 = unattached). Index 0 unused.
  const std::vector<int>& heads() const { return heads_; }
  const std::vector<int>& labels() const { return labels_; }
  bool attached(int pos) const { return pos > 0 && heads_[pos] >= 0; }
  std::size_t steps() const { return steps_; }

  bool is_terminal() const { return buffer_.empty() && stack_.size() == 1 && stack_[0] == 0; }

  // Empty when t is legal; otherwise the violated condition.
  std::string violation(TransitionKind kind) const;
  bool legal(TransitionKind kind) const { return violation(kind).empty(); }

  struct AppliedArc {
    int head;
    int dependent;
    int label;
  };
  // Applies a legal transition; returns the arc it created, if any.
  std::optional<AppliedArc> apply(const Transition& t);

  // Upper bound on derivation length used as a hard cap by the parser.
  static std::size_t step_cap(int n) { return static_cast<std::size_t>(n) * n + 4u * n; }

  bool operator==(const Configuration&) const = default;

 private:
  int n_;
  std::vector<int> stack_;
  std::vector<int> buffer_;  // reversed: back() is the front of the buffer
  std::vector<int> heads_;
  std::vector<int> labels_;
  std::size_t steps_ = 0;
};

bool legal(const Configuration& c, TransitionKind kind);
Configuration apply(Configuration c, const Transition& t);

/// Rank of every position (0..n) in the projective word order of a gold tree:
/// an in-order traversal where each head sits in its surface slot among its
/// dependents. heads[0] is ignored. Identity for projective trees.
std::vector<int> projective_order(const std::vector<int>& heads);

struct OracleVerdict {
  static constexpr int kInfinite = std::numeric_limits<int>::max();
  // Indexed by TransitionKind; kInfinite for illegal or forbidden transitions.
  std::array<int, 4> cost{kInfinite, kInfinite, kInfinite, kInfinite};
  bool swap_due = false;

  int operator[](TransitionKind k) const { return cost[static_cast<int>(k)]; }
  std::vector<TransitionKind> zero_cost_set() const;
};

/// Static with respect to SWAP, dynamic for the other transitions.
///
/// SWAP is taken eagerly exactly when s0 follows b0 in the projective order;
/// then it is the only zero-cost transition and the others cost at least 1.
/// Otherwise SWAP is forbidden and the cost of SHIFT / LEFT_ARC / RIGHT_ARC is
/// the number of gold arcs that stop being reachable. Reachability allows for
/// stack items that still have to be swapped back behind the buffer item that
/// comes first in projective order.
class StaticDynamicOracle {
 public:
  StaticDynamicOracle(std::vector<int> gold_heads, std::vector<int> gold_labels);

  const std::vector<int>& gold_heads() const { return heads_; }
  const std::vector<int>& gold_labels() const { return labels_; }
  const std::vector<int>& order() const { return order_; }

  bool swap_due(const Configuration& c) const;
  OracleVerdict verdict(const Configuration& c) const;
  // Unlabeled cost plus one when an arc transition attaches the dependent to
  // its gold head under the wrong label.
  int cost(const Configuration& c, const OracleVerdict& v, const Transition& t) const;
  // The gold label for a zero-cost arc transition of the given kind (-1 otherwise).
  int gold_label(const Configuration& c, TransitionKind kind) const;

  // Number of dependents whose gold attachment is still achievable.
  int reachable_arcs(const Configuration& c) const;

 private:
  Configuration settle_swaps(Configuration c) const;

  std::vector<int> heads_;
  std::vector<int> labels_;
  std::vector<int> order_;
};

}  // namespace compparse
