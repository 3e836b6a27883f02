#pragma once

// Reverse-mode automatic differentiation over dense double matrices.
//
// A Graph is a tape of nodes evaluated eagerly at construction time; Expr is a
// cheap handle into it. Parameters live outside the graph in a ParameterStore
// and receive gradients when Graph::backward() reaches the leaves that read
// them. Vectors are column matrices (n x 1).

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace compparse::ad {

using Matrix = Eigen::MatrixXd;

class Parameter {
 public:
  Parameter(std::string name, Matrix value);

  const std::string& name() const { return name_; }
  Matrix& value() { return value_; }
  const Matrix& value() const { return value_; }
  Matrix& grad() { return grad_; }
  const Matrix& grad() const { return grad_; }
  Eigen::Index rows() const { return value_.rows(); }
  Eigen::Index cols() const { return value_.cols(); }

  // Adam state.
  Matrix first_moment;
  Matrix second_moment;
  long steps = 0;

 private:
  std::string name_;
  Matrix value_;
  Matrix grad_;
};

enum class Init { Zeros, GlorotUniform, EmbeddingUniform };

class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;

  Parameter& add(const std::string& name, Eigen::Index rows, Eigen::Index cols, Init init,
                 std::mt19937_64& rng);
  Parameter& add(const std::string& name, Matrix value);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;

  // Names in creation order.
  std::vector<std::string> names() const;
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();
  // Snapshot/restore of parameter values (used to keep the best epoch).
  std::vector<Matrix> snapshot() const;
  void restore(const std::vector<Matrix>& values);

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.cbegin(); }
  auto end() const { return params_.cend(); }

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::map<std::string, Parameter*> index_;
};

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update of every parameter, then zeroes gradients.
void adam_step(ParameterStore& store, const AdamConfig& cfg = {});

class Graph;

class Expr {
 public:
  Expr() = default;
  Expr(Graph* g, int index) : graph_(g), index_(index) {}

  bool valid() const { return graph_ != nullptr; }
  Graph* graph() const { return graph_; }
  int index() const { return index_; }
  const Matrix& value() const;
  // Value of a 1x1 expression.
  double scalar() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  const Matrix& grad() const;

 private:
  Graph* graph_ = nullptr;
  int index_ = -1;
};

enum class Op {
  Input,
  Param,
  Lookup,
  Affine,
  MatVec,
  Add,
  Sub,
  CMult,
  Scale,
  Tanh,
  Sigmoid,
  Rectify,
  Concat,
  Slice,
  Pick,
  Sum,
  SumList,
  LstmCell,
};

class Graph {
 public:
  Graph() { nodes_.reserve(1024); }
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Expr input(Matrix value);
  Expr input_scalar(double v);
  Expr zeros(Eigen::Index rows);
  Expr parameter(Parameter& p);
  Expr lookup(Parameter& p, int column);

  // Accumulates d(loss)/d(parameter) into every parameter reachable from loss.
  // Node gradients are recomputed on every call, parameter gradients add up.
  void backward(const Expr& loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  friend class Expr;
  friend Expr make_node(Graph& g, Op op, std::vector<int> args, Matrix value, double aux,
                        Parameter* param);

  struct Node {
    Op op;
    std::vector<int> args;
    Matrix value;
    Matrix grad;
    bool has_grad = false;
    double aux = 0.0;  // scale factor, slice start, pick index, lookup column
    Parameter* param = nullptr;
  };

  void accumulate(int index, const Matrix& g);
  void propagate(int index);

  std::vector<Node> nodes_;
};

Expr affine(const Expr& W, const Expr& x, const Expr& b);
Expr matvec(const Expr& W, const Expr& x);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr cmult(const Expr& a, const Expr& b);
Expr scale(const Expr& a, double factor);
Expr tanh(const Expr& x);
Expr sigmoid(const Expr& x);
// max(0, x) elementwise.
Expr rectify(const Expr& x);
Expr concat(std::span<const Expr> parts);
Expr concat(std::initializer_list<Expr> parts);
Expr slice(const Expr& x, Eigen::Index start, Eigen::Index length);
Expr pick(const Expr& x, Eigen::Index row);
// Sum of all elements, as a 1x1 expression.
Expr sum(const Expr& x);
// Elementwise sum of equally shaped expressions.
Expr sum(std::span<const Expr> xs);

// Fused LSTM cell nonlinearity. z holds the 4h gate pre-activations stacked as
// [input; forget; output; candidate]; c is the previous memory (h x 1).
// Returns [h'; c'] (2h x 1).
Expr lstm_cell(const Expr& z, const Expr& c);

}  // namespace compparse::ad
