#pragma once

// Trigonometric interpolation of sampled functions with truncated Fourier
// series, in one or more dimensions.
//
// Frequencies are stored on a one-sided index set. Index i maps to the
// symmetric frequency 0, 1, -1, 2, -2, ... (i odd: (i+1)/2, i even: -i/2),
// so the first p = 2m+1 indices cover k = -m..m and any p is allowed.
// On the periodic box [origin, origin + length)^d the basis function for the
// multi-index k is exp(2 pi i k . (x - origin) / length), and the samples sit
// at origin + length * j / n_axis along every axis.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wmn/circulant.hpp"
#include "wmn/parallel.hpp"

namespace wmn {

enum class FitMethod { LeastSquares, PlainMinNorm, WeightedMinNorm };
enum class WeightKind { Separable, Euclidean };

const char* to_string(FitMethod method) noexcept;
const char* to_string(WeightKind kind) noexcept;

long symmetric_frequency(std::size_t index) noexcept;
std::size_t one_sided_index(long frequency) noexcept;

struct PeriodicDomain {
  double origin = -1.0;
  double length = 2.0;

  bool operator==(const PeriodicDomain&) const = default;
};

struct TargetFunction {
  std::string name;
  std::size_t dimension = 1;
  PeriodicDomain domain;
  std::function<double(std::span<const double>)> eval;
};

/// stage1d (sign step on [-1, 1)), cubic1d (2.5 (x^3 - x) on [-1, 1)) and
/// cos2d (cos(6.28 (2x + 3y)) on [0, 1)^2). Throws Lookup for other names.
TargetFunction builtin_target(std::string_view name);

// Weight entries Sigma_[k] on the truncated frequency box, flattened
// row-major over the one-sided indices.
class TensorWeight {
 public:
  TensorWeight(std::size_t d, std::size_t p_axis, WeightKind kind);

  std::size_t dimension() const noexcept { return d_; }
  std::size_t p_axis() const noexcept { return p_axis_; }
  WeightKind kind() const noexcept { return kind_; }
  /// Separable: prod_i (1 + |k_i|)^{-1}. Euclidean: (1 + ||k||_2)^{-1}.
  double at(std::size_t flat_index) const;
  /// Per-axis factor (1 + |k|)^{-1}.
  static double axis_weight(std::size_t index);
  std::vector<double> powers(double exponent) const;

 private:
  std::size_t d_;
  std::size_t p_axis_;
  WeightKind kind_;
};

struct InterpolationProblem {
  std::size_t d = 1;
  std::size_t n_axis = 0;
  std::size_t p_axis = 0;
  std::size_t D_axis = 0;
  double q = 0.0;
  WeightKind weight = WeightKind::Separable;
  PeriodicDomain domain;
  CVector samples;  // n_axis^d values, row-major over the sample multi-index

  std::size_t sample_count() const;
  std::size_t feature_count() const;
};

/// Sample coordinates (n_axis^d points, d doubles each, row-major).
std::vector<double> sample_points(std::size_t d, std::size_t n_axis, const PeriodicDomain& domain);

/// Samples a target on the equispaced grid and adds N(0, (noise_sigma * A)^2)
/// noise, A being the largest absolute sample.
InterpolationProblem make_problem(const TargetFunction& target, std::size_t n_axis, std::size_t p_axis,
                                  std::size_t D_axis, double q, double noise_sigma = 0.0,
                                  std::uint64_t noise_seed = 0, WeightKind weight = WeightKind::Separable);

struct Interpolant {
  std::size_t d = 1;
  std::size_t p_axis = 0;
  PeriodicDomain domain;
  FitMethod method = FitMethod::WeightedMinNorm;
  double q = 0.0;
  WeightKind weight = WeightKind::Separable;
  CVector coefficients;  // p_axis^d, one-sided index order
};

/// LeastSquares needs p_axis <= n_axis, the min-norm methods p_axis >= n_axis.
/// PlainMinNorm ignores problem.q. In d > 1 the separable weight (and least
/// squares) use pinv(A (x) B) = pinv(A) (x) pinv(B); the Euclidean weight
/// falls back to a dense solve over the flattened Kronecker features.
Interpolant fit_interpolant(const InterpolationProblem& problem, FitMethod method);

/// Dense n_axis^d x p_axis^d Kronecker feature matrix.
CMatrix kronecker_features(std::size_t d, std::size_t n_axis, std::size_t p_axis);

/// Values of the interpolant at points (d doubles per point).
std::vector<cplx> evaluate_interpolant(const Interpolant& f, std::span<const double> points,
                                       Execution exec = Execution::Parallel);

/// ||H theta - y|| on the training samples.
double sample_residual(const Interpolant& f, const InterpolationProblem& problem);

/// ||Sigma^{-q} theta|| with the given weight kind and exponent.
double weighted_norm(const Interpolant& f, double q, WeightKind kind);

namespace reference {

/// Term-by-term serial evaluation of the truncated series.
std::vector<cplx> evaluate_interpolant(const Interpolant& f, std::span<const double> points);

}  // namespace reference

}  // namespace wmn
