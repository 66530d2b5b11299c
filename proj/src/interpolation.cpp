#include "wmn/interpolation.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "wmn/error.hpp"
#include "wmn/estimators.hpp"

namespace wmn {
namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

// Row-major digits of flat in base `radix`, most significant first.
void digits(std::size_t flat, std::size_t radix, std::span<std::size_t> out) {
  for (std::size_t a = out.size(); a-- > 0;) {
    out[a] = flat % radix;
    flat /= radix;
  }
}

CMatrix axis_features(std::size_t n_axis, std::size_t p_axis) {
  CMatrix F(static_cast<Eigen::Index>(n_axis), static_cast<Eigen::Index>(p_axis));
  for (std::size_t j = 0; j < n_axis; ++j) {
    for (std::size_t i = 0; i < p_axis; ++i) {
      const long k = symmetric_frequency(i);
      const long m = ((k * static_cast<long>(j)) % static_cast<long>(n_axis) + static_cast<long>(n_axis)) %
                     static_cast<long>(n_axis);
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n_axis);
      F(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::polar(1.0, angle);
    }
  }
  return F;
}

// Applies M along `axis` of a row-major tensor whose extent on every axis is
// `extent` except that `axis` has M.cols().
CVector mode_product(const CVector& tensor, const CMatrix& M, std::size_t d, std::size_t axis,
                     std::vector<std::size_t>& shape) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= shape[a];
  for (std::size_t a = axis + 1; a < d; ++a) inner *= shape[a];
  const auto in = static_cast<std::size_t>(M.cols());
  const auto out_extent = static_cast<std::size_t>(M.rows());
  CVector result = CVector::Zero(static_cast<Eigen::Index>(outer * out_extent * inner));
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t r = 0; r < out_extent; ++r)
      for (std::size_t s = 0; s < in; ++s) {
        const cplx m = M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s));
        if (m == cplx{}) continue;
        const std::size_t src = (o * in + s) * inner;
        const std::size_t dst = (o * out_extent + r) * inner;
        for (std::size_t c = 0; c < inner; ++c)
          result(static_cast<Eigen::Index>(dst + c)) += m * tensor(static_cast<Eigen::Index>(src + c));
      }
  shape[axis] = out_extent;
  return result;
}

CVector apply_each_axis(const CVector& tensor, const CMatrix& M, std::size_t d) {
  std::vector<std::size_t> shape(d, static_cast<std::size_t>(M.cols()));
  CVector current = tensor;
  for (std::size_t a = 0; a < d; ++a) current = mode_product(current, M, d, a, shape);
  return current;
}

void check_problem(const InterpolationProblem& pr) {
  if (pr.d == 0 || pr.n_axis == 0 || pr.p_axis == 0) {
    throw Error(ErrorKind::InvalidConfiguration, "interpolation needs d, n_axis, p_axis >= 1");
  }
  if (pr.D_axis != 0 && pr.p_axis > pr.D_axis) {
    throw Error(ErrorKind::InvalidConfiguration, "p_axis exceeds the ambient D_axis");
  }
  if (static_cast<std::size_t>(pr.samples.size()) != pr.sample_count()) {
    throw Error(ErrorKind::InvalidConfiguration, "sample count differs from n_axis^d");
  }
  if (!(pr.domain.length > 0.0)) throw Error(ErrorKind::InvalidConfiguration, "domain length must be positive");
}

}  // namespace

const char* to_string(FitMethod method) noexcept {
  switch (method) {
    case FitMethod::LeastSquares: return "least_squares";
    case FitMethod::PlainMinNorm: return "plain_min_norm";
    case FitMethod::WeightedMinNorm: return "weighted_min_norm";
  }
  return "unknown";
}

const char* to_string(WeightKind kind) noexcept {
  return kind == WeightKind::Separable ? "separable" : "euclidean";
}

long symmetric_frequency(std::size_t index) noexcept {
  const auto i = static_cast<long>(index);
  return (i % 2 == 1) ? (i + 1) / 2 : -(i / 2);
}

std::size_t one_sided_index(long frequency) noexcept {
  return frequency > 0 ? static_cast<std::size_t>(2 * frequency - 1) : static_cast<std::size_t>(-2 * frequency);
}

TargetFunction builtin_target(std::string_view name) {
  if (name == "stage1d") {
    return {"stage1d", 1, {-1.0, 2.0}, [](std::span<const double> x) { return x[0] < 0.0 ? -1.0 : 1.0; }};
  }
  if (name == "cubic1d") {
    return {"cubic1d", 1, {-1.0, 2.0},
            [](std::span<const double> x) { return 2.5 * (x[0] * x[0] * x[0] - x[0]); }};
  }
  if (name == "cos2d") {
    return {"cos2d", 2, {0.0, 1.0},
            [](std::span<const double> x) { return std::cos(6.28 * (2.0 * x[0] + 3.0 * x[1])); }};
  }
  throw Error(ErrorKind::Lookup, "unknown target '" + std::string(name) + "' (stage1d, cubic1d, cos2d)");
}

TensorWeight::TensorWeight(std::size_t d, std::size_t p_axis, WeightKind kind)
    : d_(d), p_axis_(p_axis), kind_(kind) {}

double TensorWeight::axis_weight(std::size_t index) {
  return 1.0 / (1.0 + static_cast<double>(std::labs(symmetric_frequency(index))));
}

double TensorWeight::at(std::size_t flat_index) const {
  std::vector<std::size_t> idx(d_);
  digits(flat_index, p_axis_, idx);
  if (kind_ == WeightKind::Separable) {
    double w = 1.0;
    for (auto i : idx) w *= axis_weight(i);
    return w;
  }
  double norm2 = 0.0;
  for (auto i : idx) {
    const auto k = static_cast<double>(symmetric_frequency(i));
    norm2 += k * k;
  }
  return 1.0 / (1.0 + std::sqrt(norm2));
}

std::vector<double> TensorWeight::powers(double exponent) const {
  std::vector<double> out(ipow(p_axis_, d_));
  for (std::size_t f = 0; f < out.size(); ++f) out[f] = std::pow(at(f), exponent);
  return out;
}

std::size_t InterpolationProblem::sample_count() const { return ipow(n_axis, d); }
std::size_t InterpolationProblem::feature_count() const { return ipow(p_axis, d); }

std::vector<double> sample_points(std::size_t d, std::size_t n_axis, const PeriodicDomain& domain) {
  const std::size_t count = ipow(n_axis, d);
  std::vector<double> pts(count * d);
  std::vector<std::size_t> idx(d);
  for (std::size_t f = 0; f < count; ++f) {
    digits(f, n_axis, idx);
    for (std::size_t a = 0; a < d; ++a) {
      pts[f * d + a] = domain.origin + domain.length * static_cast<double>(idx[a]) / static_cast<double>(n_axis);
    }
  }
  return pts;
}

InterpolationProblem make_problem(const TargetFunction& target, std::size_t n_axis, std::size_t p_axis,
                                  std::size_t D_axis, double q, double noise_sigma, std::uint64_t noise_seed,
                                  WeightKind weight) {
  if (!(noise_sigma >= 0.0)) throw Error(ErrorKind::InvalidConfiguration, "noise_sigma must be >= 0");
  InterpolationProblem pr;
  pr.d = target.dimension;
  pr.n_axis = n_axis;
  pr.p_axis = p_axis;
  pr.D_axis = D_axis;
  pr.q = q;
  pr.weight = weight;
  pr.domain = target.domain;
  const auto pts = sample_points(pr.d, n_axis, pr.domain);
  const std::size_t count = pr.sample_count();
  pr.samples = CVector(static_cast<Eigen::Index>(count));
  double amplitude = 0.0;
  for (std::size_t f = 0; f < count; ++f) {
    const double v = target.eval(std::span<const double>(pts.data() + f * pr.d, pr.d));
    pr.samples(static_cast<Eigen::Index>(f)) = v;
    amplitude = std::max(amplitude, std::abs(v));
  }
  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> normal(0.0, noise_sigma * amplitude);
    for (std::size_t f = 0; f < count; ++f) pr.samples(static_cast<Eigen::Index>(f)) += normal(rng);
  }
  check_problem(pr);
  return pr;
}

CMatrix kronecker_features(std::size_t d, std::size_t n_axis, std::size_t p_axis) {
  const CMatrix F1 = axis_features(n_axis, p_axis);
  CMatrix H = F1;
  for (std::size_t a = 1; a < d; ++a) {
    CMatrix next(H.rows() * F1.rows(), H.cols() * F1.cols());
    for (Eigen::Index i = 0; i < H.rows(); ++i)
      for (Eigen::Index k = 0; k < H.cols(); ++k)
        next.block(i * F1.rows(), k * F1.cols(), F1.rows(), F1.cols()) = H(i, k) * F1;
    H = std::move(next);
  }
  return H;
}

Interpolant fit_interpolant(const InterpolationProblem& problem, FitMethod method) {
  check_problem(problem);
  const std::size_t n = problem.n_axis;
  const std::size_t p = problem.p_axis;
  if (method == FitMethod::LeastSquares && p > n) {
    throw Error(ErrorKind::WrongRegime, "least squares needs p_axis <= n_axis");
  }
  if (method != FitMethod::LeastSquares && p < n) {
    throw Error(ErrorKind::WrongRegime, "min-norm interpolation needs p_axis >= n_axis");
  }

  Interpolant out;
  out.d = problem.d;
  out.p_axis = p;
  out.domain = problem.domain;
  out.method = method;
  out.weight = problem.weight;
  // LS solutions do not depend on the weight; the min-norm ones use q = 0 for plain.
  out.q = method == FitMethod::WeightedMinNorm ? problem.q : 0.0;

  const bool separable = problem.d == 1 || problem.weight == WeightKind::Separable ||
                         method != FitMethod::WeightedMinNorm || out.q == 0.0;
  if (problem.d == 1) {
    const TensorWeight w(1, p, problem.weight);
    out.coefficients = scaled_pinv_solve(axis_features(n, p), w.powers(out.q), problem.samples);
  } else if (separable) {
    // pinv of a Kronecker product factorises axis by axis
    const CMatrix F1 = axis_features(n, p);
    Eigen::VectorXd scale(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) scale(static_cast<Eigen::Index>(i)) = std::pow(TensorWeight::axis_weight(i), out.q);
    const CMatrix scaled = F1 * scale.asDiagonal();
    Eigen::BDCSVD<CMatrix> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const CMatrix pinv = scale.asDiagonal() * svd.solve(CMatrix::Identity(F1.rows(), F1.rows()));
    out.coefficients = apply_each_axis(problem.samples, pinv, problem.d);
  } else {
    const TensorWeight w(problem.d, p, problem.weight);
    out.coefficients = scaled_pinv_solve(kronecker_features(problem.d, n, p), w.powers(out.q), problem.samples);
  }
  return out;
}

std::vector<cplx> evaluate_interpolant(const Interpolant& f, std::span<const double> points, Execution exec) {
  const std::size_t d = f.d;
  const std::size_t p = f.p_axis;
  if (points.size() % d != 0) throw Error(ErrorKind::InvalidConfiguration, "point buffer is not a multiple of d");
  const std::size_t count = points.size() / d;
  const double omega = 2.0 * std::numbers::pi / f.domain.length;

  std::vector<cplx> values(count);
  const auto total = static_cast<long long>(count);
#pragma omp parallel if (exec == Execution::Parallel)
  {
    std::vector<cplx> phase(p);
    std::vector<cplx> work;
#pragma omp for schedule(static)
    for (long long m = 0; m < total; ++m) {
      const double* x = points.data() + static_cast<std::size_t>(m) * d;
      // contract the coefficient tensor from the last axis inwards
      work.assign(f.coefficients.data(), f.coefficients.data() + f.coefficients.size());
      std::size_t extent = work.size();
      for (std::size_t a = d; a-- > 0;) {
        const double base = omega * (x[a] - f.domain.origin);
        for (std::size_t i = 0; i < p; ++i) phase[i] = std::polar(1.0, base * static_cast<double>(symmetric_frequency(i)));
        const std::size_t rows = extent / p;
        for (std::size_t r = 0; r < rows; ++r) {
          cplx acc{};
          for (std::size_t i = 0; i < p; ++i) acc += work[r * p + i] * phase[i];
          work[r] = acc;
        }
        extent = rows;
      }
      values[static_cast<std::size_t>(m)] = work[0];
    }
  }
  return values;
}

double sample_residual(const Interpolant& f, const InterpolationProblem& problem) {
  const CMatrix F1 = axis_features(problem.n_axis, f.p_axis);
  const CVector fitted = apply_each_axis(f.coefficients, F1, f.d);
  return (fitted - problem.samples).norm();
}

double weighted_norm(const Interpolant& f, double q, WeightKind kind) {
  const TensorWeight w(f.d, f.p_axis, kind);
  const auto inv = w.powers(-q);
  double total = 0.0;
  for (Eigen::Index i = 0; i < f.coefficients.size(); ++i) {
    total += inv[static_cast<std::size_t>(i)] * inv[static_cast<std::size_t>(i)] * std::norm(f.coefficients(i));
  }
  return std::sqrt(total);
}

namespace reference {

std::vector<cplx> evaluate_interpolant(const Interpolant& f, std::span<const double> points) {
  const std::size_t d = f.d;
  const std::size_t count = points.size() / d;
  const double omega = 2.0 * std::numbers::pi / f.domain.length;
  std::vector<std::size_t> idx(d);
  std::vector<cplx> values(count);
  for (std::size_t m = 0; m < count; ++m) {
    cplx acc{};
    for (Eigen::Index c = 0; c < f.coefficients.size(); ++c) {
      digits(static_cast<std::size_t>(c), f.p_axis, idx);
      double angle = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        angle += omega * static_cast<double>(symmetric_frequency(idx[a])) * (points[m * d + a] - f.domain.origin);
      }
      acc += f.coefficients(c) * std::exp(cplx(0.0, angle));
    }
    values[m] = acc;
  }
  return values;
}

}  // namespace reference

}  // namespace wmn
