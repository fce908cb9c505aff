#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "sattn/error.hpp"
#include "sattn/numcore/gradcheck.hpp"
#include "sattn/numcore/ops.hpp"
#include "sattn/rng.hpp"

using namespace sattn;
using num::Tape;
using num::Tensor;
using num::Var;

namespace {

Tensor random_tensor(std::size_t rows, std::size_t cols, CounterRng& rng, double lo = -2.0,
                     double hi = 2.0) {
  Tensor t = Tensor::zeros(rows, cols);
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

// Loss = <op(inputs), weights> for fixed random weights, so that every output
// entry feeds the gradient.
using Builder = std::function<Var(Tape&, const std::vector<Var>&)>;

double primitive_check(const Builder& build, std::vector<Tensor> inputs, std::uint64_t seed) {
  CounterRng rng(seed);
  Tensor weights;
  auto loss_of = [&](Tape& tape, std::vector<Var>& vars) {
    vars.clear();
    for (const Tensor& t : inputs) vars.push_back(tape.leaf(t));
    const Var out = build(tape, vars);
    if (weights.empty()) weights = random_tensor(out.rows(), out.cols(), rng, -1.0, 1.0);
    return num::sum(num::mul(out, tape.constant(weights)));
  };
  Tape tape;
  std::vector<Var> vars;
  const Var loss = loss_of(tape, vars);
  tape.backward(loss);
  std::vector<Tensor> grads;
  for (const Var& v : vars) grads.push_back(tape.grad(v));

  std::vector<num::GradCheckTarget> targets;
  for (std::size_t i = 0; i < inputs.size(); ++i) targets.push_back({"in" + std::to_string(i), &inputs[i], &grads[i]});
  const auto report = num::finite_difference_check(
      [&] {
        Tape t(false);
        std::vector<Var> v;
        return loss_of(t, v).value()[0];
      },
      targets, 1e-6, 1e-6);
  return report.max_relative_error;
}

Tensor naive_matmul(const Tensor& a, const Tensor& b) {
  Tensor c = Tensor::zeros(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a.at(i, k) * b.at(k, j);
      c.at(i, j) = s;
    }
  return c;
}

}  // namespace

TEST(Tensor, RejectsDataOfWrongLength) {
  EXPECT_THROW(Tensor({2, 2}, {1.0, 2.0, 3.0}), ShapeError);
  EXPECT_EQ(Tensor({2, 3}).size(), 6u);
}

TEST(Forward, ReluClampsNegatives) {
  Tape tape;
  const Var y = num::relu(tape.leaf(Tensor::row({-1.0, 2.0})));
  EXPECT_EQ(y.value()[0], 0.0);
  EXPECT_EQ(y.value()[1], 2.0);
}

TEST(Forward, SoftmaxOfEqualScoresIsUniform) {
  Tape tape;
  const Var y = num::softmax(tape.leaf(Tensor::row({0.0, 0.0, 0.0})));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(y.value()[i], 1.0 / 3.0, 1e-15);
}

TEST(Forward, SoftmaxSurvivesLargeScores) {
  Tape tape;
  const Var y = num::softmax(tape.leaf(Tensor::row({1000.0, 1000.0 + std::log(2.0)})));
  EXPECT_NEAR(y.value()[0], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(y.value()[1], 2.0 / 3.0, 1e-12);
}

TEST(Forward, SoftmaxIsADistributionForRandomInputs) {
  CounterRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Tape tape;
    const std::size_t n = 1 + rng.below(12);
    const Var y = num::softmax(tape.leaf(random_tensor(1, n, rng, -30.0, 30.0)));
    double s = 0.0;
    for (const double w : y.value().data()) {
      EXPECT_GE(w, 0.0);
      EXPECT_LE(w, 1.0);
      s += w;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Forward, MatmulMatchesTripleLoop) {
  CounterRng rng(11);
  const Tensor a = random_tensor(2, 3, rng);
  const Tensor b = random_tensor(3, 4, rng);
  Tape tape;
  const Var c = num::matmul(tape.leaf(a), tape.leaf(b));
  ASSERT_EQ(c.shape(), (num::Shape{2, 4}));
  const Tensor expected = naive_matmul(a, b);
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(c.value()[i], expected[i], 1e-14);
}

TEST(Forward, MatmulWithZerosMatchesTripleLoop) {
  CounterRng rng(12);
  Tensor a = random_tensor(5, 7, rng);
  for (std::size_t i = 0; i < a.size(); i += 3) a[i] = 0.0;
  const Tensor b = random_tensor(7, 3, rng);
  Tape tape;
  const Var c = num::matmul(tape.leaf(a), tape.leaf(b));
  const Tensor expected = naive_matmul(a, b);
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(c.value()[i], expected[i], 1e-14);
}

TEST(Forward, ShapeErrorNamesOperationAndShapes) {
  Tape tape;
  const Var a = tape.leaf(Tensor::zeros(2, 3));
  const Var b = tape.leaf(Tensor::zeros(2, 3));
  try {
    num::matmul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("matmul"), std::string::npos);
    EXPECT_NE(msg.find("[2,3]"), std::string::npos) << msg;
  }
  EXPECT_THROW(num::add(a, tape.leaf(Tensor::zeros(3, 2))), ShapeError);
  EXPECT_THROW(num::softmax(tape.leaf(Tensor::zeros(1, 0))), ShapeError);
}

TEST(Backward, ReluSubgradientIsZeroForNegatives) {
  Tape tape;
  const Var x = tape.leaf(Tensor::row({-1.0, 2.0}));
  tape.backward(num::sum(num::relu(x)));
  const Tensor g = tape.grad(x);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 1.0);
}

TEST(Backward, DotIsBilinear) {
  Tape tape;
  const Var x = tape.leaf(Tensor::row({1.0, 2.0}));
  const Var y = tape.leaf(Tensor::row({3.0, 4.0}));
  tape.backward(num::dot(x, y));
  EXPECT_EQ(tape.grad(x)[0], 3.0);
  EXPECT_EQ(tape.grad(x)[1], 4.0);
  EXPECT_EQ(tape.grad(y)[0], 1.0);
  EXPECT_EQ(tape.grad(y)[1], 2.0);
}

TEST(Backward, FanOutAccumulates) {
  Tape tape;
  const Var x = tape.leaf(Tensor::row({3.0}));
  tape.backward(num::sum(num::mul(x, x)));
  EXPECT_EQ(tape.grad(x)[0], 6.0);
}

TEST(Backward, RejectsLossFromAnotherTapeOrNonScalar) {
  Tape a, b;
  const Var x = a.leaf(Tensor::row({1.0}));
  const Var y = b.leaf(Tensor::row({1.0}));
  EXPECT_THROW(a.backward(num::sum(y)), Error);
  EXPECT_THROW(a.backward(a.leaf(Tensor::row({1.0, 2.0}))), Error);
  EXPECT_THROW(num::add(x, y), ShapeError);
}

TEST(Backward, SumOfLossesGivesSumOfGradients) {
  CounterRng rng(3);
  const Tensor x0 = random_tensor(2, 3, rng);
  const Tensor w = random_tensor(3, 2, rng);
  auto grads = [&](int which) {
    Tape tape;
    const Var x = tape.leaf(x0);
    const Var h = num::tanh(num::matmul(x, tape.constant(w)));
    const Var l1 = num::sum(num::mul(h, h));
    const Var l2 = num::sum(num::sigmoid(h));
    tape.backward(which == 0 ? l1 : which == 1 ? l2 : num::add(l1, l2));
    return tape.grad(x);
  };
  const Tensor g1 = grads(0), g2 = grads(1), g12 = grads(2);
  for (std::size_t i = 0; i < g12.size(); ++i) EXPECT_NEAR(g12[i], g1[i] + g2[i], 1e-14);
}

TEST(Backward, ReplayIsBitwiseIdentical) {
  CounterRng rng(4);
  const Tensor x0 = random_tensor(3, 4, rng);
  const Tensor w = random_tensor(4, 4, rng);
  auto run = [&] {
    Tape tape;
    const Var x = tape.leaf(x0);
    const num::RowRef first{num::matmul(x, tape.leaf(w)), 0};
    const Var s = num::softmax(num::assemble_rows(tape, std::span<const num::RowRef>(&first, 1), 4));
    const Var loss = num::sum(num::mul(num::exp(num::matmul(x, tape.leaf(w))), num::tanh(x)));
    tape.backward(num::add(loss, num::sum(s)));
    return std::make_pair(loss.value(), tape.grad(x));
  };
  const auto a = run();
  const auto b = run();
  EXPECT_TRUE(num::bitwise_equal(a.first, b.first));
  EXPECT_TRUE(num::bitwise_equal(a.second, b.second));
}

TEST(GradCheck, SquareAtThree) {
  Tensor x = Tensor::row({3.0});
  const Tensor analytic = Tensor::row({6.0});
  const auto report = num::finite_difference_check([&] { return x[0] * x[0]; },
                                                   {{"x", &x, &analytic}}, 1e-6, 1e-8);
  EXPECT_TRUE(report.passed) << report.max_relative_error;
  EXPECT_NEAR(report.worst_numeric, 6.0, 1e-8);
  EXPECT_EQ(x[0], 3.0);
}

TEST(GradCheck, ReportsNonFiniteFunction) {
  Tensor x = Tensor::row({1.0});
  const Tensor analytic = Tensor::row({0.0});
  EXPECT_THROW(num::finite_difference_check([] { return std::nan(""); }, {{"x", &x, &analytic}},
                                            1e-6, 1e-6),
               NumericalError);
}

TEST(GradCheck, RelativeErrorUsesFloor) {
  EXPECT_DOUBLE_EQ(num::relative_error(1.0, 1.5), 0.5 / 1.5);
  EXPECT_DOUBLE_EQ(num::relative_error(0.0, 1e-9), 1e-9 / 1e-8);
}

// Every primitive on random inputs in [-2, 2].
class PrimitiveGradient : public ::testing::TestWithParam<int> {};

TEST_P(PrimitiveGradient, MatchesCentralDifferences) {
  CounterRng rng(100 + GetParam());
  const Tensor a = random_tensor(3, 4, rng);
  const Tensor b = random_tensor(3, 4, rng);
  const Tensor c = random_tensor(4, 2, rng);
  const Tensor row = random_tensor(1, 4, rng);
  double err = 0.0;
  switch (GetParam()) {
    case 0: err = primitive_check([](Tape&, auto& v) { return num::matmul(v[0], v[1]); }, {a, c}, 1); break;
    case 1: err = primitive_check([](Tape&, auto& v) { return num::matmul_nt(v[0], v[1]); }, {a, b}, 2); break;
    case 2: err = primitive_check([](Tape&, auto& v) { return num::add(v[0], v[1]); }, {a, b}, 3); break;
    case 3: err = primitive_check([](Tape&, auto& v) { return num::sub(v[0], v[1]); }, {a, b}, 4); break;
    case 4: err = primitive_check([](Tape&, auto& v) { return num::mul(v[0], v[1]); }, {a, b}, 5); break;
    case 5: err = primitive_check([](Tape&, auto& v) { return num::scale(v[0], -1.7); }, {a}, 6); break;
    case 6: err = primitive_check([](Tape&, auto& v) { return num::add_bias(v[0], v[1]); }, {a, row}, 7); break;
    case 7: err = primitive_check([](Tape&, auto& v) { return num::sigmoid(v[0]); }, {a}, 8); break;
    case 8: err = primitive_check([](Tape&, auto& v) { return num::tanh(v[0]); }, {a}, 9); break;
    case 9: err = primitive_check([](Tape&, auto& v) { return num::relu(v[0]); }, {a}, 10); break;
    case 10: err = primitive_check([](Tape&, auto& v) { return num::exp(v[0]); }, {a}, 11); break;
    case 11: err = primitive_check([](Tape&, auto& v) { return num::concat(v[0], v[1]); }, {a, b}, 12); break;
    case 12: err = primitive_check([](Tape&, auto& v) { return num::slice_cols(v[0], 1, 3); }, {a}, 13); break;
    case 13: err = primitive_check([](Tape&, auto& v) { return num::softmax(v[0]); }, {row}, 14); break;
    case 14: err = primitive_check([](Tape&, auto& v) { return num::weighted_row_sum(v[0], v[1]); },
                                   {random_tensor(1, 3, rng), a}, 15); break;
    case 15: err = primitive_check([](Tape&, auto& v) { return num::sum(v[0]); }, {a}, 16); break;
    case 16: err = primitive_check([](Tape&, auto& v) { return num::dot(v[0], v[1]); }, {a, b}, 17); break;
    case 17: err = primitive_check([](Tape&, auto& v) { return num::clamp(v[0], -1.0, 1.0); }, {a}, 18); break;
    case 18:
      err = primitive_check(
          [](Tape& t, auto& v) {
            const std::vector<num::RowRef> refs = {{v[0], 2}, {}, {v[0], 0}, {v[0], 2}};
            return num::assemble_rows(t, refs, 4);
          },
          {a}, 19);
      break;
  }
  EXPECT_LT(err, 1e-6);
}

INSTANTIATE_TEST_SUITE_P(AllPrimitives, PrimitiveGradient, ::testing::Range(0, 19));

TEST(AssembleRows, MissingSourceGivesZeroRow) {
  Tape tape;
  const Var a = tape.leaf(Tensor::matrix(2, 2, {1.0, 2.0, 3.0, 4.0}));
  const std::vector<num::RowRef> refs = {{a, 1}, {}};
  const Var out = num::assemble_rows(tape, refs, 2);
  EXPECT_EQ(out.value().at(0, 0), 3.0);
  EXPECT_EQ(out.value().at(1, 1), 0.0);
}

TEST(WeightedRowSum, InvariantUnderJointPermutation) {
  CounterRng rng(21);
  const Tensor w = random_tensor(1, 5, rng, 0.0, 1.0);
  const Tensor rows = random_tensor(5, 7, rng);
  Tensor w2 = Tensor::zeros(1, 5), rows2 = Tensor::zeros(5, 7);
  const std::size_t perm[5] = {3, 0, 4, 1, 2};
  for (std::size_t i = 0; i < 5; ++i) {
    w2[i] = w[perm[i]];
    for (std::size_t j = 0; j < 7; ++j) rows2.at(i, j) = rows.at(perm[i], j);
  }
  Tape tape;
  const Var a = num::weighted_row_sum(tape.leaf(w), tape.leaf(rows));
  const Var b = num::weighted_row_sum(tape.leaf(w2), tape.leaf(rows2));
  EXPECT_TRUE(num::bitwise_equal(a.value(), b.value()));
}

TEST(Tape, UntrackedTapeKeepsValuesWithoutGradients) {
  Tape tape(false);
  const Var x = tape.leaf(Tensor::row({1.0, -1.0}));
  const Var y = num::relu(x);
  EXPECT_FALSE(tape.requires_grad(y));
  EXPECT_EQ(y.value()[0], 1.0);
}
