#pragma once

// Empirical risk of the estimators under random r-decaying coefficients.
//
// Every trial draws from its own engine seeded by (seed, trial index), so a
// trial's sample does not depend on which thread runs it or in what order.

#include <cstdint>
#include <random>
#include <vector>

#include "wmn/circulant.hpp"
#include "wmn/model.hpp"
#include "wmn/parallel.hpp"

namespace wmn {

enum class CoefficientModel { ComplexGaussian, RealGaussian };

const char* to_string(CoefficientModel model) noexcept;

struct McConfig {
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  CoefficientModel coefficient_model = CoefficientModel::ComplexGaussian;
  double confidence = 0.8;

  bool operator==(const McConfig&) const = default;
};

struct McRiskEstimate {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> samples;  // ||theta - theta_hat||^2 per trial, in trial order
};

struct TailRow {
  double t = 0.0;
  double empirical_tail = 0.0;
  double bound_tail = 0.0;      // min(1, 2 exp(-min(t^2/T^2, t/T)))
  double standard_error = 0.0;  // binomial, at probability bound_tail
  bool dominated = false;       // empirical_tail <= bound_tail + 3 standard_error
};

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial);

/// theta_j = sqrt(c_r) t_j^r g_j with g standard (complex or real) normal, so
/// E[theta] = 0 and E[theta theta^*] = c_r Sigma^{2r}.
CVector sample_theta(const Spectrum& spectrum, CoefficientModel model, std::mt19937_64& rng);

/// One trial: sample theta, observe y = F theta on all D columns, fit with the
/// regime-appropriate estimator (least squares for p <= n, weighted min-norm
/// otherwise, on the circulant path when p is a multiple of n), return
/// ||theta - theta_hat||^2.
double trial_risk(const Spectrum& spectrum, const GridConfig& grid, double q, CoefficientModel model,
                  std::uint64_t seed, std::uint64_t trial);

McRiskEstimate empirical_risk(const Spectrum& spectrum, const GridConfig& grid, double q,
                              const McConfig& mc, Execution exec = Execution::Parallel);

/// Mean and percentile interval of already computed samples.
McRiskEstimate summarize(std::vector<double> samples, double confidence);

/// Empirical frequency of | ||theta - theta_hat||^2 - expected risk | > t per t.
std::vector<TailRow> concentration_check(const Spectrum& spectrum, const GridConfig& grid, double q,
                                         const std::vector<double>& t_grid, const McConfig& mc,
                                         Execution exec = Execution::Parallel);

namespace reference {

/// Serial oracle for trial_risk: same random draws, but observations come
/// from the dense feature matrix and the fit from the dense SVD (or dense QR
/// for p <= n).
double trial_risk(const Spectrum& spectrum, const GridConfig& grid, double q, CoefficientModel model,
                  std::uint64_t seed, std::uint64_t trial);

McRiskEstimate empirical_risk(const Spectrum& spectrum, const GridConfig& grid, double q,
                              const McConfig& mc);

}  // namespace reference

}  // namespace wmn
