#include "compparse/transition.h"

#include <algorithm>

namespace compparse {

std::string to_string(TransitionKind k) {
  switch (k) {
    case TransitionKind::Shift: return "SHIFT";
    case TransitionKind::Swap: return "SWAP";
    case TransitionKind::LeftArc: return "LEFT_ARC";
    case TransitionKind::RightArc: return "RIGHT_ARC";
  }
  return "?";
}

Configuration::Configuration(int n) : n_(n), heads_(n + 1, -1), labels_(n + 1, -1) {
  if (n < 1) throw std::invalid_argument("initial configuration needs n >= 1");
  stack_.reserve(n + 1);
  stack_.push_back(0);
  buffer_.reserve(n);
  for (int i = n; i >= 1; --i) buffer_.push_back(i);
}

bool Configuration::in_buffer(int pos) const {
  return std::find(buffer_.begin(), buffer_.end(), pos) != buffer_.end();
}

std::string Configuration::violation(TransitionKind kind) const {
  switch (kind) {
    case TransitionKind::Shift:
      if (buffer_.empty()) return "buffer is empty";
      return {};
    case TransitionKind::LeftArc:
      if (buffer_.empty()) return "buffer is empty";
      if (stack_.empty()) return "stack is empty";
      if (s0() == 0) return "stack top is the root";
      return {};
    case TransitionKind::RightArc:
      if (stack_.size() < 2) return "stack has fewer than two items";
      return {};
    case TransitionKind::Swap:
      if (stack_.empty() || s0() == 0) return "stack top is the root or missing";
      if (buffer_.empty()) return "buffer is empty";
      if (s0() > b0()) return "stack top does not precede the buffer front in word order";
      return {};
  }
  return "unknown transition";
}

std::optional<Configuration::AppliedArc> Configuration::apply(const Transition& t) {
  if (auto v = violation(t.kind); !v.empty())
    throw IllegalTransition(to_string(t.kind) + " is illegal: " + v);
  ++steps_;
  switch (t.kind) {
    case TransitionKind::Shift:
      stack_.push_back(buffer_.back());
      buffer_.pop_back();
      return std::nullopt;
    case TransitionKind::Swap: {
      const int s = stack_.back();
      stack_.pop_back();
      buffer_.insert(buffer_.end() - 1, s);
      return std::nullopt;
    }
    case TransitionKind::LeftArc: {
      const int d = stack_.back();
      stack_.pop_back();
      heads_[d] = buffer_.back();
      labels_[d] = t.label;
      return AppliedArc{heads_[d], d, t.label};
    }
    case TransitionKind::RightArc: {
      const int d = stack_.back();
      stack_.pop_back();
      heads_[d] = stack_.back();
      labels_[d] = t.label;
      return AppliedArc{heads_[d], d, t.label};
    }
  }
  return std::nullopt;
}

bool legal(const Configuration& c, TransitionKind kind) { return c.legal(kind); }

Configuration apply(Configuration c, const Transition& t) {
  c.apply(t);
  return c;
}

std::vector<int> projective_order(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size()) - 1;
  std::vector<std::vector<int>> children(n + 1);
  for (int d = 1; d <= n; ++d) children[heads[d]].push_back(d);  // ascending per head
  std::vector<int> rank(n + 1, -1);
  int next = 0;
  // Iterative in-order traversal; a frame walks the sorted list children(h) + {h}.
  struct Frame {
    int head;
    std::size_t child;
    bool head_emitted;
  };
  std::vector<Frame> frames{{0, 0, false}};
  while (!frames.empty()) {
    auto& f = frames.back();
    const auto& kids = children[f.head];
    const bool kid_left = f.child < kids.size();
    if (!f.head_emitted && (!kid_left || kids[f.child] > f.head)) {
      rank[f.head] = next++;
      f.head_emitted = true;
      continue;
    }
    if (kid_left) {
      const int k = kids[f.child++];
      frames.push_back({k, 0, false});
      continue;
    }
    frames.pop_back();
  }
  return rank;
}

std::vector<TransitionKind> OracleVerdict::zero_cost_set() const {
  std::vector<TransitionKind> out;
  for (auto k : kAllTransitionKinds)
    if ((*this)[k] == 0) out.push_back(k);
  return out;
}

StaticDynamicOracle::StaticDynamicOracle(std::vector<int> gold_heads, std::vector<int> gold_labels)
    : heads_(std::move(gold_heads)), labels_(std::move(gold_labels)) {
  if (labels_.size() != heads_.size()) throw std::invalid_argument("oracle: heads/labels size");
  order_ = projective_order(heads_);
}

bool StaticDynamicOracle::swap_due(const Configuration& c) const {
  const int s0 = c.s0(), b0 = c.b0();
  return s0 > 0 && b0 > 0 && order_[s0] > order_[b0] && c.legal(TransitionKind::Swap);
}

Configuration StaticDynamicOracle::settle_swaps(Configuration c) const {
  while (swap_due(c)) c.apply({TransitionKind::Swap, -1});
  return c;
}

int StaticDynamicOracle::reachable_arcs(const Configuration& c) const {
  const int n = c.sentence_length();
  const auto& stack = c.stack();
  std::vector<int> stack_index(n + 1, -1);
  for (std::size_t i = 0; i < stack.size(); ++i) stack_index[stack[i]] = static_cast<int>(i);
  std::vector<bool> in_buffer(n + 1, false);
  int min_rank = std::numeric_limits<int>::max();
  for (int b : c.buffer()) {
    in_buffer[b] = true;
    min_rank = std::min(min_rank, order_[b]);
  }
  // Stack items above this index can still be swapped back into the buffer:
  // each of them follows some buffer item in the projective order.
  int settled = static_cast<int>(stack.size());
  while (settled > 0 && stack[settled - 1] != 0 && order_[stack[settled - 1]] > min_rank)
    --settled;
  auto movable = [&](int pos) { return in_buffer[pos] || stack_index[pos] >= settled; };

  int count = 0;
  for (int d = 1; d <= n; ++d) {
    const int h = heads_[d];
    if (c.attached(d)) {
      count += c.heads()[d] == h ? 1 : 0;
      continue;
    }
    if (h != 0 && c.attached(h)) continue;
    const bool adjacent = stack_index[d] > 0 && stack[stack_index[d] - 1] == h;
    if (in_buffer[d] || in_buffer[h] || adjacent || movable(d) || movable(h)) ++count;
  }
  return count;
}

OracleVerdict StaticDynamicOracle::verdict(const Configuration& c) const {
  OracleVerdict v;
  v.swap_due = swap_due(c);
  const int base = reachable_arcs(c);
  for (auto k : kAllTransitionKinds) {
    if (!c.legal(k)) continue;
    if (k == TransitionKind::Swap) {
      v.cost[static_cast<int>(k)] = v.swap_due ? 0 : OracleVerdict::kInfinite;
      continue;
    }
    const auto next = settle_swaps(apply(c, {k, -1}));
    const int delta = base - reachable_arcs(next);
    v.cost[static_cast<int>(k)] = v.swap_due ? std::max(1, delta) : delta;
  }
  return v;
}

int StaticDynamicOracle::cost(const Configuration& c, const OracleVerdict& v,
                              const Transition& t) const {
  const int base = v[t.kind];
  if (base == OracleVerdict::kInfinite || !t.is_arc()) return base;
  const int d = c.s0();
  const int head = t.kind == TransitionKind::LeftArc ? c.b0() : c.s1();
  return base + ((heads_[d] == head && labels_[d] != t.label) ? 1 : 0);
}

int StaticDynamicOracle::gold_label(const Configuration& c, TransitionKind kind) const {
  if (kind != TransitionKind::LeftArc && kind != TransitionKind::RightArc) return -1;
  const int d = c.s0();
  if (d <= 0) return -1;
  const int head = kind == TransitionKind::LeftArc ? c.b0() : c.s1();
  return heads_[d] == head ? labels_[d] : -1;
}

}  // namespace compparse
