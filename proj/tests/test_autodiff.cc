#include <doctest.h>

#include "compparse/autodiff.h"
#include "compparse/lstm.h"
#include "support.h"

using namespace compparse;
using namespace compparse::ad;

TEST_CASE("affine forward and input gradient") {
  Graph g;
  Matrix W(2, 2);
  W << 1, 2, 3, 4;
  Matrix x(2, 1), b(2, 1);
  x << 1, 1;
  b << 0.5, 0.5;
  auto xe = g.input(x);
  auto y = affine(g.input(W), xe, g.input(b));
  CHECK(y.value()(0, 0) == 3.5);
  CHECK(y.value()(1, 0) == 7.5);
  g.backward(sum(y));
  CHECK(xe.grad()(0, 0) == 4.0);
  CHECK(xe.grad()(1, 0) == 6.0);
}

TEST_CASE("shape mismatches throw") {
  Graph g;
  auto a = g.input(Matrix::Zero(2, 1));
  auto b = g.input(Matrix::Zero(3, 1));
  CHECK_THROWS_AS(a + b, std::invalid_argument);
  CHECK_THROWS_AS(cmult(a, b), std::invalid_argument);
  CHECK_THROWS_AS(affine(g.input(Matrix::Zero(2, 2)), b, a), std::invalid_argument);
}

TEST_CASE("lstm cell with zero parameters outputs zero") {
  ParameterStore store;
  std::mt19937_64 rng(1);
  auto p = LstmCellParams::create(store, "c", 3, 2, rng);
  p.weights->value().setZero();
  p.bias->value().setZero();
  Graph g;
  LstmCell cell(g, p);
  auto s = cell.step(cell.initial_state(), g.input(Matrix::Ones(3, 1)));
  CHECK(s.h.value().isZero());
  CHECK(s.c.value().isZero());
}

TEST_CASE("forget gate bias starts at one") {
  ParameterStore store;
  std::mt19937_64 rng(1);
  auto p = LstmCellParams::create(store, "c", 3, 2, rng);
  CHECK(p.bias->value().block(2, 0, 2, 1).isOnes());
  CHECK(p.bias->value().block(0, 0, 2, 1).isZero());
}

TEST_CASE("every op passes a finite-difference check") {
  ParameterStore store;
  std::mt19937_64 rng(3);
  auto& W = store.add("W", 4, 3, Init::GlorotUniform, rng);
  auto& b = store.add("b", 4, 1, Init::GlorotUniform, rng);
  auto& E = store.add("E", 3, 5, Init::EmbeddingUniform, rng);
  auto& V = store.add("V", 4, 4, Init::GlorotUniform, rng);
  auto lstm = LstmCellParams::create(store, "cell", 3, 4, rng);
  auto f = [&](Graph& g) {
    auto x = g.lookup(E, 2);
    auto h = tanh(affine(g.parameter(W), x, g.parameter(b)));
    auto s = sigmoid(matvec(g.parameter(V), h));
    auto r = rectify(h - s + scale(cmult(h, s), 2.0));
    auto cat = concat({r, x, slice(h, 1, 2)});
    LstmCell cell(g, lstm);
    auto st = cell.step(cell.initial_state(), x);
    st = cell.step(st, g.lookup(E, 4));
    std::vector<Expr> parts{sum(cat), pick(st.h, 1), sum(st.c), sum(cmult(st.h, st.h))};
    return sum(parts);
  };
  const auto res = testing_support::gradient_check(store, f, 1e-5, 1e-6);
  INFO(res.worst);
  CHECK(res.max_rel < 1e-5);
}

TEST_CASE("backward accumulates into parameters and resets nodes") {
  ParameterStore store;
  std::mt19937_64 rng(1);
  auto& p = store.add("p", 2, 1, Init::Zeros, rng);
  Graph g;
  auto loss = sum(g.parameter(p));
  g.backward(loss);
  g.backward(loss);
  CHECK(p.grad()(0, 0) == 2.0);
  store.zero_grad();
  CHECK(p.grad().isZero());
}

TEST_CASE("first Adam step moves a parameter by the learning rate") {
  ParameterStore store;
  auto& p = store.add("p", Matrix::Constant(1, 1, 0.3));
  p.grad()(0, 0) = 1.0;
  adam_step(store);
  CHECK(p.value()(0, 0) == doctest::Approx(0.3 - 0.001).epsilon(1e-6));
  CHECK(p.grad()(0, 0) == 0.0);
  CHECK(p.steps == 1);
}

TEST_CASE("snapshot and restore") {
  ParameterStore store;
  std::mt19937_64 rng(1);
  auto& p = store.add("p", 3, 2, Init::GlorotUniform, rng);
  const auto snap = store.snapshot();
  p.value().setZero();
  store.restore(snap);
  CHECK(p.value() == snap[0]);
  CHECK(store.scalar_count() == 6);
  CHECK_THROWS(store.add("p", 1, 1, Init::Zeros, rng));
}

TEST_CASE("run_lstm aligns outputs with inputs") {
  ParameterStore store;
  std::mt19937_64 rng(5);
  auto p = LstmCellParams::create(store, "c", 2, 3, rng);
  Graph g;
  std::vector<Expr> xs;
  for (int i = 0; i < 4; ++i) xs.push_back(g.input(Matrix::Random(2, 1)));
  const auto fw = run_lstm(g, p, xs, Direction::Forward);
  const auto bw = run_lstm(g, p, xs, Direction::Backward);
  REQUIRE(fw.size() == 4);
  // The first forward output and the last backward output saw a single input.
  LstmCell cell(g, p);
  CHECK(fw[0].value().isApprox(cell.step(cell.initial_state(), xs[0]).h.value()));
  CHECK(bw[3].value().isApprox(cell.step(cell.initial_state(), xs[3]).h.value()));
  CHECK_THROWS(run_lstm(g, p, {}, Direction::Forward));
}
