#include "compparse/autodiff.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace compparse::ad {

namespace {

std::string shape(const Matrix& m) {
  std::ostringstream s;
  s << "(" << m.rows() << "," << m.cols() << ")";
  return s.str();
}

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape(a) + " vs " +
                              shape(b));
}

void require_same_graph(const Expr& a, const Expr& b) {
  if (!a.valid() || !b.valid() || a.graph() != b.graph())
    throw std::invalid_argument("expressions belong to different graphs");
}

double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Parameter::Parameter(std::string name, Matrix value)
    : first_moment(Matrix::Zero(value.rows(), value.cols())),
      second_moment(Matrix::Zero(value.rows(), value.cols())),
      name_(std::move(name)),
      value_(std::move(value)),
      grad_(Matrix::Zero(value_.rows(), value_.cols())) {}

Parameter& ParameterStore::add(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                               Init init, std::mt19937_64& rng) {
  Matrix v = Matrix::Zero(rows, cols);
  double limit = 0.0;
  switch (init) {
    case Init::Zeros:
      break;
    case Init::GlorotUniform:
      limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
      break;
    case Init::EmbeddingUniform:
      limit = std::sqrt(3.0 / static_cast<double>(rows));
      break;
  }
  if (limit > 0.0) {
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) v(i, j) = dist(rng);
  }
  return add(name, std::move(v));
}

Parameter& ParameterStore::add(const std::string& name, Matrix value) {
  if (contains(name)) throw std::invalid_argument("duplicate parameter name " + name);
  params_.push_back(std::make_unique<Parameter>(name, std::move(value)));
  index_[name] = params_.back().get();
  return *params_.back();
}

Parameter& ParameterStore::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter named " + name);
  return *it->second;
}

const Parameter& ParameterStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter named " + name);
  return *it->second;
}

std::vector<std::string> ParameterStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->name());
  return out;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value().size());
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p->grad().setZero();
}

std::vector<Matrix> ParameterStore::snapshot() const {
  std::vector<Matrix> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->value());
  return out;
}

void ParameterStore::restore(const std::vector<Matrix>& values) {
  if (values.size() != params_.size()) throw std::invalid_argument("restore: size mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) params_[i]->value() = values[i];
}

void adam_step(ParameterStore& store, const AdamConfig& cfg) {
  for (auto& p : store) {
    ++p->steps;
    const double t = static_cast<double>(p->steps);
    const Matrix& g = p->grad();
    p->first_moment = cfg.beta1 * p->first_moment + (1.0 - cfg.beta1) * g;
    p->second_moment = cfg.beta2 * p->second_moment + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    p->value().array() -= cfg.learning_rate * (p->first_moment.array() / c1) /
                          ((p->second_moment.array() / c2).sqrt() + cfg.epsilon);
    p->grad().setZero();
  }
}

const Matrix& Expr::value() const { return graph_->nodes_[index_].value; }

double Expr::scalar() const {
  const auto& v = value();
  if (v.rows() != 1 || v.cols() != 1)
    throw std::invalid_argument("scalar(): expression has shape " + shape(v));
  return v(0, 0);
}

const Matrix& Expr::grad() const { return graph_->nodes_[index_].grad; }

Expr make_node(Graph& g, Op op, std::vector<int> args, Matrix value, double aux,
               Parameter* param) {
  Graph::Node n;
  n.op = op;
  n.args = std::move(args);
  n.value = std::move(value);
  n.aux = aux;
  n.param = param;
  g.nodes_.push_back(std::move(n));
  return Expr(&g, static_cast<int>(g.nodes_.size()) - 1);
}

Expr Graph::input(Matrix value) { return make_node(*this, Op::Input, {}, std::move(value), 0, nullptr); }

Expr Graph::input_scalar(double v) { return input(Matrix::Constant(1, 1, v)); }

Expr Graph::zeros(Eigen::Index rows) { return input(Matrix::Zero(rows, 1)); }

Expr Graph::parameter(Parameter& p) { return make_node(*this, Op::Param, {}, p.value(), 0, &p); }

Expr Graph::lookup(Parameter& p, int column) {
  if (column < 0 || column >= p.cols())
    throw std::out_of_range("lookup: column " + std::to_string(column) + " out of range for " +
                            p.name());
  return make_node(*this, Op::Lookup, {}, p.value().col(column), column, &p);
}

void Graph::accumulate(int index, const Matrix& g) {
  auto& n = nodes_[index];
  if (!n.has_grad) {
    n.grad = g;
    n.has_grad = true;
  } else {
    n.grad += g;
  }
}

void Graph::backward(const Expr& loss) {
  if (loss.graph() != this) throw std::invalid_argument("backward: loss from another graph");
  const auto& lv = loss.value();
  if (lv.rows() != 1 || lv.cols() != 1)
    throw std::invalid_argument("backward: loss must be scalar, got " + shape(lv));
  for (int i = 0; i <= loss.index(); ++i) {
    nodes_[i].has_grad = false;
    nodes_[i].grad.resize(0, 0);
  }
  accumulate(loss.index(), Matrix::Ones(1, 1));
  for (int i = loss.index(); i >= 0; --i)
    if (nodes_[i].has_grad) propagate(i);
}

void Graph::propagate(int index) {
  // Copy what we need up front: accumulate() never reallocates nodes_, but
  // keeping the gradient by value keeps the aliasing obvious.
  const Node& n = nodes_[index];
  const Matrix g = n.grad;
  const auto& a = n.args;
  switch (n.op) {
    case Op::Input:
      break;
    case Op::Param:
      n.param->grad() += g;
      break;
    case Op::Lookup:
      n.param->grad().col(static_cast<Eigen::Index>(n.aux)) += g;
      break;
    case Op::Affine: {
      const Matrix& W = nodes_[a[0]].value;
      const Matrix& x = nodes_[a[1]].value;
      accumulate(a[0], g * x.transpose());
      accumulate(a[1], W.transpose() * g);
      accumulate(a[2], g);
      break;
    }
    case Op::MatVec: {
      const Matrix& W = nodes_[a[0]].value;
      const Matrix& x = nodes_[a[1]].value;
      accumulate(a[0], g * x.transpose());
      accumulate(a[1], W.transpose() * g);
      break;
    }
    case Op::Add:
      accumulate(a[0], g);
      accumulate(a[1], g);
      break;
    case Op::Sub:
      accumulate(a[0], g);
      accumulate(a[1], -g);
      break;
    case Op::CMult: {
      const Matrix x = nodes_[a[0]].value;
      const Matrix y = nodes_[a[1]].value;
      accumulate(a[0], g.cwiseProduct(y));
      accumulate(a[1], g.cwiseProduct(x));
      break;
    }
    case Op::Scale:
      accumulate(a[0], g * n.aux);
      break;
    case Op::Tanh: {
      const Matrix& y = n.value;
      accumulate(a[0], (g.array() * (1.0 - y.array().square())).matrix());
      break;
    }
    case Op::Sigmoid: {
      const Matrix& y = n.value;
      accumulate(a[0], (g.array() * y.array() * (1.0 - y.array())).matrix());
      break;
    }
    case Op::Rectify: {
      const Matrix& x = nodes_[a[0]].value;
      accumulate(a[0], (x.array() > 0.0).select(g.array(), 0.0).matrix());
      break;
    }
    case Op::Concat: {
      Eigen::Index offset = 0;
      for (int arg : a) {
        const auto r = nodes_[arg].value.rows();
        accumulate(arg, g.middleRows(offset, r));
        offset += r;
      }
      break;
    }
    case Op::Slice: {
      const Matrix& x = nodes_[a[0]].value;
      Matrix full = Matrix::Zero(x.rows(), x.cols());
      full.middleRows(static_cast<Eigen::Index>(n.aux), g.rows()) = g;
      accumulate(a[0], full);
      break;
    }
    case Op::Pick: {
      const Matrix& x = nodes_[a[0]].value;
      Matrix full = Matrix::Zero(x.rows(), x.cols());
      full(static_cast<Eigen::Index>(n.aux), 0) = g(0, 0);
      accumulate(a[0], full);
      break;
    }
    case Op::Sum: {
      const Matrix& x = nodes_[a[0]].value;
      accumulate(a[0], Matrix::Constant(x.rows(), x.cols(), g(0, 0)));
      break;
    }
    case Op::SumList:
      for (int arg : a) accumulate(arg, g);
      break;
    case Op::LstmCell: {
      const Matrix& z = nodes_[a[0]].value;
      const Matrix& c = nodes_[a[1]].value;
      const Eigen::Index h = c.rows();
      const Eigen::ArrayXd i = z.col(0).segment(0, h).unaryExpr(&sigm).array();
      const Eigen::ArrayXd f = z.col(0).segment(h, h).unaryExpr(&sigm).array();
      const Eigen::ArrayXd o = z.col(0).segment(2 * h, h).unaryExpr(&sigm).array();
      const Eigen::ArrayXd cand = z.col(0).segment(3 * h, h).array().tanh();
      const Eigen::ArrayXd c_new = n.value.col(0).segment(h, h).array();
      const Eigen::ArrayXd t = c_new.tanh();
      const Eigen::ArrayXd dh = g.col(0).segment(0, h).array();
      const Eigen::ArrayXd dc = g.col(0).segment(h, h).array() + dh * o * (1.0 - t.square());
      Matrix dz(4 * h, 1);
      dz.col(0).segment(0, h) = (dc * cand * i * (1.0 - i)).matrix();
      dz.col(0).segment(h, h) = (dc * c.col(0).array() * f * (1.0 - f)).matrix();
      dz.col(0).segment(2 * h, h) = (dh * t * o * (1.0 - o)).matrix();
      dz.col(0).segment(3 * h, h) = (dc * i * (1.0 - cand.square())).matrix();
      Matrix dprev = (dc * f).matrix();
      accumulate(a[0], dz);
      accumulate(a[1], dprev);
      break;
    }
  }
}

Expr affine(const Expr& W, const Expr& x, const Expr& b) {
  require_same_graph(W, x);
  require_same_graph(W, b);
  const Matrix& wv = W.value();
  const Matrix& xv = x.value();
  const Matrix& bv = b.value();
  if (wv.cols() != xv.rows() || xv.cols() != 1) shape_error("affine(W,x)", wv, xv);
  if (bv.rows() != wv.rows() || bv.cols() != 1) shape_error("affine(W,b)", wv, bv);
  Matrix v = wv * xv + bv;
  return make_node(*W.graph(), Op::Affine, {W.index(), x.index(), b.index()}, std::move(v), 0,
                   nullptr);
}

Expr matvec(const Expr& W, const Expr& x) {
  require_same_graph(W, x);
  if (W.value().cols() != x.value().rows()) shape_error("matvec", W.value(), x.value());
  Matrix v = W.value() * x.value();
  return make_node(*W.graph(), Op::MatVec, {W.index(), x.index()}, std::move(v), 0, nullptr);
}

namespace {
void require_same_shape(const char* op, const Expr& a, const Expr& b) {
  require_same_graph(a, b);
  if (a.value().rows() != b.value().rows() || a.value().cols() != b.value().cols())
    shape_error(op, a.value(), b.value());
}
}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  require_same_shape("add", a, b);
  Matrix v = a.value() + b.value();
  return make_node(*a.graph(), Op::Add, {a.index(), b.index()}, std::move(v), 0, nullptr);
}

Expr operator-(const Expr& a, const Expr& b) {
  require_same_shape("sub", a, b);
  Matrix v = a.value() - b.value();
  return make_node(*a.graph(), Op::Sub, {a.index(), b.index()}, std::move(v), 0, nullptr);
}

Expr cmult(const Expr& a, const Expr& b) {
  require_same_shape("cmult", a, b);
  Matrix v = a.value().cwiseProduct(b.value());
  return make_node(*a.graph(), Op::CMult, {a.index(), b.index()}, std::move(v), 0, nullptr);
}

Expr scale(const Expr& a, double factor) {
  Matrix v = a.value() * factor;
  return make_node(*a.graph(), Op::Scale, {a.index()}, std::move(v), factor, nullptr);
}

Expr tanh(const Expr& x) {
  Matrix v = x.value().array().tanh().matrix();
  return make_node(*x.graph(), Op::Tanh, {x.index()}, std::move(v), 0, nullptr);
}

Expr sigmoid(const Expr& x) {
  Matrix v = x.value().unaryExpr(&sigm);
  return make_node(*x.graph(), Op::Sigmoid, {x.index()}, std::move(v), 0, nullptr);
}

Expr rectify(const Expr& x) {
  Matrix v = x.value().cwiseMax(0.0);
  return make_node(*x.graph(), Op::Rectify, {x.index()}, std::move(v), 0, nullptr);
}

Expr concat(std::span<const Expr> parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no inputs");
  Eigen::Index rows = 0;
  std::vector<int> args;
  args.reserve(parts.size());
  for (const auto& p : parts) {
    require_same_graph(parts.front(), p);
    if (p.value().cols() != 1) throw std::invalid_argument("concat: inputs must be vectors");
    rows += p.value().rows();
    args.push_back(p.index());
  }
  Matrix v(rows, 1);
  Eigen::Index offset = 0;
  for (const auto& p : parts) {
    v.middleRows(offset, p.value().rows()) = p.value();
    offset += p.value().rows();
  }
  return make_node(*parts.front().graph(), Op::Concat, std::move(args), std::move(v), 0, nullptr);
}

Expr concat(std::initializer_list<Expr> parts) {
  return concat(std::span<const Expr>(parts.begin(), parts.size()));
}

Expr slice(const Expr& x, Eigen::Index start, Eigen::Index length) {
  const Matrix& xv = x.value();
  if (start < 0 || length < 0 || start + length > xv.rows() || xv.cols() != 1)
    throw std::invalid_argument("slice: [" + std::to_string(start) + "," +
                                std::to_string(start + length) + ") out of " + shape(xv));
  Matrix v = xv.middleRows(start, length);
  return make_node(*x.graph(), Op::Slice, {x.index()}, std::move(v), static_cast<double>(start),
                   nullptr);
}

Expr pick(const Expr& x, Eigen::Index row) {
  const Matrix& xv = x.value();
  if (row < 0 || row >= xv.rows() || xv.cols() != 1)
    throw std::invalid_argument("pick: row " + std::to_string(row) + " out of " + shape(xv));
  Matrix v = Matrix::Constant(1, 1, xv(row, 0));
  return make_node(*x.graph(), Op::Pick, {x.index()}, std::move(v), static_cast<double>(row),
                   nullptr);
}

Expr sum(const Expr& x) {
  Matrix v = Matrix::Constant(1, 1, x.value().sum());
  return make_node(*x.graph(), Op::Sum, {x.index()}, std::move(v), 0, nullptr);
}

Expr sum(std::span<const Expr> xs) {
  if (xs.empty()) throw std::invalid_argument("sum: no inputs");
  Matrix v = xs.front().value();
  std::vector<int> args{xs.front().index()};
  for (std::size_t i = 1; i < xs.size(); ++i) {
    require_same_shape("sum", xs.front(), xs[i]);
    v += xs[i].value();
    args.push_back(xs[i].index());
  }
  return make_node(*xs.front().graph(), Op::SumList, std::move(args), std::move(v), 0, nullptr);
}

Expr lstm_cell(const Expr& z, const Expr& c) {
  require_same_graph(z, c);
  const Matrix& zv = z.value();
  const Matrix& cv = c.value();
  const Eigen::Index h = cv.rows();
  if (cv.cols() != 1 || zv.cols() != 1 || zv.rows() != 4 * h) shape_error("lstm_cell", zv, cv);
  const Eigen::ArrayXd i = zv.col(0).segment(0, h).unaryExpr(&sigm).array();
  const Eigen::ArrayXd f = zv.col(0).segment(h, h).unaryExpr(&sigm).array();
  const Eigen::ArrayXd o = zv.col(0).segment(2 * h, h).unaryExpr(&sigm).array();
  const Eigen::ArrayXd g = zv.col(0).segment(3 * h, h).array().tanh();
  const Eigen::ArrayXd c_new = f * cv.col(0).array() + i * g;
  Matrix v(2 * h, 1);
  v.col(0).segment(0, h) = (o * c_new.tanh()).matrix();
  v.col(0).segment(h, h) = c_new.matrix();
  return make_node(*z.graph(), Op::LstmCell, {z.index(), c.index()}, std::move(v), 0, nullptr);
}

}  // namespace compparse::ad
