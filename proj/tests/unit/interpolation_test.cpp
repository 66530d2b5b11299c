#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "support.hpp"
#include "wmn/error.hpp"
#include "wmn/interpolation.hpp"

namespace {

using namespace wmn;
using oracle::CMat;

// Frequencies of the one-sided indices, built independently: 0, 1, -1, 2, -2, ...
std::vector<long> frequency_list(std::size_t p) {
  std::vector<long> k{0};
  for (long m = 1; k.size() < p; ++m) {
    k.push_back(m);
    if (k.size() < p) k.push_back(-m);
  }
  return k;
}

// Dense features and weights over the flattened multi-index grid.
struct DenseModel {
  CMat H;
  Eigen::VectorXd w;
};

DenseModel dense_model(std::size_t d, std::size_t n, std::size_t p, double q, WeightKind kind) {
  const auto freq = frequency_list(p);
  std::size_t N = 1, P = 1;
  for (std::size_t a = 0; a < d; ++a) N *= n, P *= p;
  DenseModel m{CMat(N, P), Eigen::VectorXd(P)};
  for (std::size_t c = 0; c < P; ++c) {
    double sep = 1.0, sq = 0.0;
    std::size_t cc = c;
    std::vector<long> k(d);
    for (std::size_t a = d; a-- > 0;) {
      k[a] = freq[cc % p];
      cc /= p;
      sep /= 1.0 + std::abs(double(k[a]));
      sq += double(k[a]) * double(k[a]);
    }
    const double w = kind == WeightKind::Separable ? sep : 1.0 / (1.0 + std::sqrt(sq));
    m.w(c) = std::pow(w, q);
    for (std::size_t row = 0; row < N; ++row) {
      std::size_t rr = row;
      double phase = 0.0;
      for (std::size_t a = d; a-- > 0;) {
        phase += double(k[a]) * double(rr % n) / double(n);
        rr /= n;
      }
      m.H(row, c) = std::polar(1.0, 2.0 * std::numbers::pi * phase);
    }
  }
  return m;
}

TEST(Frequencies, OrderingIsABijection) {
  EXPECT_EQ(symmetric_frequency(0), 0);
  EXPECT_EQ(symmetric_frequency(1), 1);
  EXPECT_EQ(symmetric_frequency(2), -1);
  EXPECT_EQ(symmetric_frequency(5), 3);
  const auto ref = frequency_list(301);
  std::set<long> seen;
  for (std::size_t i = 0; i < 301; ++i) {
    EXPECT_EQ(symmetric_frequency(i), ref[i]);
    EXPECT_EQ(one_sided_index(symmetric_frequency(i)), i);
    seen.insert(symmetric_frequency(i));
  }
  EXPECT_EQ(seen.size(), 301u);
}

TEST(Weights, SeparableAndEuclidean) {
  EXPECT_DOUBLE_EQ(TensorWeight::axis_weight(0), 1.0);
  EXPECT_DOUBLE_EQ(TensorWeight::axis_weight(4), 1.0 / 3.0);
  const TensorWeight sep(2, 5, WeightKind::Separable);
  const TensorWeight euc(2, 5, WeightKind::Euclidean);
  // flat index 3 * 5 + 4 is k = (2, -2)
  EXPECT_DOUBLE_EQ(sep.at(19), 1.0 / 9.0);
  EXPECT_DOUBLE_EQ(euc.at(19), 1.0 / (1.0 + std::sqrt(8.0)));
  const auto pw = sep.powers(2.0);
  ASSERT_EQ(pw.size(), 25u);
  EXPECT_DOUBLE_EQ(pw[19], 1.0 / 81.0);
}

TEST(Targets, Lookup) {
  const auto c = builtin_target("cubic1d");
  EXPECT_EQ(c.dimension, 1u);
  const double x = 0.5;
  EXPECT_DOUBLE_EQ(c.eval(std::span<const double>(&x, 1)), 2.5 * (0.125 - 0.5));
  const auto cos2d = builtin_target("cos2d");
  EXPECT_EQ(cos2d.dimension, 2u);
  EXPECT_EQ(cos2d.domain.origin, 0.0);
  EXPECT_EQ(cos2d.domain.length, 1.0);
  const double xy[2] = {0.1, 0.2};
  EXPECT_DOUBLE_EQ(cos2d.eval(xy), std::cos(6.28 * (0.2 + 0.6)));
  auto at = [](const TargetFunction& f, std::vector<double> x) { return f.eval(x); };
  EXPECT_EQ(at(c, {0.0}), 0.0);
  EXPECT_EQ(at(c, {1.0}), 0.0);
  EXPECT_EQ(at(cos2d, {0.0, 0.0}), 1.0);
  const auto stage = builtin_target("stage1d");
  EXPECT_EQ(at(stage, {-0.5}), -1.0);
  EXPECT_EQ(at(stage, {0.5}), 1.0);
  EXPECT_EQ(at(stage, {0.0}), 1.0);
  try {
    builtin_target("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Lookup);
  }
}

TEST(Samples, GridPoints) {
  const auto pts = sample_points(2, 3, PeriodicDomain{0.0, 1.0});
  ASSERT_EQ(pts.size(), 18u);
  EXPECT_DOUBLE_EQ(pts[2 * 5], 1.0 / 3.0);      // point (1, 2)
  EXPECT_DOUBLE_EQ(pts[2 * 5 + 1], 2.0 / 3.0);
  const auto one = sample_points(1, 4, PeriodicDomain{});
  EXPECT_EQ(one, (std::vector<double>{-1.0, -0.5, 0.0, 0.5}));
}

TEST(Fit, MatchesDenseOracle) {
  oracle::Gen gen(101);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = gen.size(1, 2);
    const std::size_t n = gen.size(2, d == 1 ? 12 : 5);
    const auto method = gen.pick(std::vector<FitMethod>{FitMethod::LeastSquares, FitMethod::PlainMinNorm,
                                                        FitMethod::WeightedMinNorm});
    const std::size_t p = method == FitMethod::LeastSquares ? gen.size(1, n) : gen.size(n, 3 * n);
    const auto kind = gen.coin() ? WeightKind::Separable : WeightKind::Euclidean;
    const double q = method == FitMethod::WeightedMinNorm ? gen.real(0.0, 3.0) : 0.0;

    InterpolationProblem prob;
    prob.d = d;
    prob.n_axis = n;
    prob.p_axis = p;
    prob.D_axis = 3 * n;
    prob.q = q;
    prob.weight = kind;
    prob.samples = gen.normal_vec(prob.sample_count());
    const auto fit = fit_interpolant(prob, method);

    const auto m = dense_model(d, n, p, q, kind);
    const CVector ref = m.w.asDiagonal() * oracle::pinv(m.H * m.w.asDiagonal()) * prob.samples;
    EXPECT_LT((fit.coefficients - ref).norm(), 1e-9 * (1.0 + ref.norm()))
        << "d=" << d << " n=" << n << " p=" << p << " q=" << q << " " << to_string(method) << " "
        << to_string(kind);
    if (method != FitMethod::LeastSquares) EXPECT_LT(sample_residual(fit, prob), 1e-9 * (1.0 + prob.samples.norm()));
  }
}

TEST(Fit, SquareSystemMethodsCoincide) {
  const auto target = builtin_target("cubic1d");
  auto prob = make_problem(target, 15, 15, 1000, 2.0);
  const auto ls = fit_interpolant(prob, FitMethod::LeastSquares);
  const auto plain = fit_interpolant(prob, FitMethod::PlainMinNorm);
  const auto weighted = fit_interpolant(prob, FitMethod::WeightedMinNorm);
  EXPECT_LT((ls.coefficients - plain.coefficients).norm(), 1e-8);
  EXPECT_LT((ls.coefficients - weighted.coefficients).norm(), 1e-8);
}

TEST(Fit, RegimeChecks) {
  const auto prob = make_problem(builtin_target("stage1d"), 10, 12, 100, 1.0);
  EXPECT_THROW(fit_interpolant(prob, FitMethod::LeastSquares), Error);
  auto small = prob;
  small.p_axis = 5;
  EXPECT_THROW(fit_interpolant(small, FitMethod::WeightedMinNorm), Error);
}

TEST(Fit, NoiseIsSeededAndRelative) {
  const auto target = builtin_target("stage1d");
  const auto clean = make_problem(target, 30, 30, 100, 0.0, 0.0);
  const auto a = make_problem(target, 30, 30, 100, 0.0, 0.1, 5);
  const auto b = make_problem(target, 30, 30, 100, 0.0, 0.1, 5);
  const auto c = make_problem(target, 30, 30, 100, 0.0, 0.1, 6);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
  const double rms = (a.samples - clean.samples).norm() / std::sqrt(30.0);
  EXPECT_GT(rms, 0.03);
  EXPECT_LT(rms, 0.3);
}

TEST(Evaluate, FastMatchesReferenceAndInterpolates) {
  oracle::Gen gen(107);
  for (std::size_t d : {1u, 2u, 3u}) {
    Interpolant f;
    f.d = d;
    f.p_axis = 5;
    f.domain = PeriodicDomain{gen.real(-2, 2), gen.real(0.5, 3)};
    std::size_t P = 1;
    for (std::size_t a = 0; a < d; ++a) P *= f.p_axis;
    f.coefficients = gen.normal_vec(P);
    std::vector<double> pts(40 * d);
    for (auto& x : pts) x = gen.real(-3, 3);
    const auto fast = evaluate_interpolant(f, pts);
    const auto serial = evaluate_interpolant(f, pts, Execution::Serial);
    const auto ref = reference::evaluate_interpolant(f, pts);
    for (std::size_t i = 0; i < fast.size(); ++i) {
      EXPECT_NEAR(std::abs(fast[i] - ref[i]), 0.0, 1e-11);
      EXPECT_EQ(fast[i], serial[i]);
    }
  }
  // evaluating at the samples reproduces the data
  auto prob = make_problem(builtin_target("cos2d"), 6, 9, 50, 1.0);
  const auto fit = fit_interpolant(prob, FitMethod::WeightedMinNorm);
  const auto at_samples = evaluate_interpolant(fit, sample_points(2, 6, prob.domain));
  for (std::size_t i = 0; i < at_samples.size(); ++i) EXPECT_NEAR(std::abs(at_samples[i] - prob.samples(i)), 0.0, 1e-9);
}

TEST(Norms, WeightedNormDefinition) {
  Interpolant f;
  f.d = 1;
  f.p_axis = 3;
  f.coefficients = CVector::Ones(3);
  // weights 1, 1/2, 1/2 -> Sigma^{-1} theta = (1, 2, 2)
  EXPECT_DOUBLE_EQ(weighted_norm(f, 1.0, WeightKind::Separable), 3.0);
  EXPECT_DOUBLE_EQ(weighted_norm(f, 0.0, WeightKind::Separable), std::sqrt(3.0));
}

TEST(Kronecker, FeaturesMatchDenseModel) {
  const auto m = dense_model(2, 3, 4, 0.0, WeightKind::Separable);
  EXPECT_LT((kronecker_features(2, 3, 4) - m.H).norm(), 1e-12);
}

}  // namespace
