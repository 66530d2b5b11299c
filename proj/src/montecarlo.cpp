#include "wmn/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "wmn/error.hpp"
#include "wmn/estimators.hpp"
#include "wmn/risktheory.hpp"

namespace wmn {
namespace {

void check_config(const McConfig& mc) {
  if (mc.trials == 0) throw Error(ErrorKind::InvalidConfiguration, "trials must be >= 1");
  if (!(mc.confidence > 0.0 && mc.confidence < 1.0)) {
    throw Error(ErrorKind::InvalidConfiguration, "confidence must lie in (0, 1)");
  }
}

// Linear interpolation between order statistics (the usual "type 7" rule).
double quantile(const std::vector<double>& sorted, double level) {
  if (sorted.size() == 1) return sorted.front();
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

const char* to_string(CoefficientModel model) noexcept {
  switch (model) {
    case CoefficientModel::ComplexGaussian: return "complex_gaussian";
    case CoefficientModel::RealGaussian: return "real_gaussian";
  }
  return "unknown";
}

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

CVector sample_theta(const Spectrum& spectrum, CoefficientModel model, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t D = spectrum.dimension();
  const double root_cr = std::sqrt(spectrum.cr());
  const double r = spectrum.decay();
  CVector theta(static_cast<Eigen::Index>(D));
  for (std::size_t j = 0; j < D; ++j) {
    const double scale = root_cr * std::pow(spectrum.t(j), r);
    cplx g;
    if (model == CoefficientModel::ComplexGaussian) {
      const double re = normal(rng);
      const double im = normal(rng);
      g = cplx(re, im) / std::numbers::sqrt2;
    } else {
      g = cplx(normal(rng), 0.0);
    }
    theta(static_cast<Eigen::Index>(j)) = scale * g;
  }
  return theta;
}

double trial_risk(const Spectrum& spectrum, const GridConfig& grid, double q, CoefficientModel model,
                  std::uint64_t seed, std::uint64_t trial) {
  auto rng = trial_engine(seed, trial);
  const CVector theta = sample_theta(spectrum, model, rng);
  const CVector y = synthesize(grid.n, std::span<const cplx>(theta.data(), grid.D));
  EstimatorResult fit;
  if (grid.p <= grid.n) {
    fit = least_squares(y, grid);
  } else {
    fit = weighted_minnorm(y, spectrum, grid, q, grid.l ? SolverPath::CirculantFFT : SolverPath::DenseSVD);
  }
  return (theta - fit.theta_hat).squaredNorm();
}

McRiskEstimate summarize(std::vector<double> samples, double confidence) {
  if (samples.empty()) throw Error(ErrorKind::InvalidConfiguration, "no samples to summarize");
  McRiskEstimate out;
  // fixed left-to-right order keeps the mean bit-identical across schedules
  double total = 0.0;
  for (double s : samples) total += s;
  out.mean = total / static_cast<double>(samples.size());
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double alpha = 0.5 * (1.0 - confidence);
  // percentile bounds can miss the mean for very skewed samples
  out.ci_low = std::min(quantile(sorted, alpha), out.mean);
  out.ci_high = std::max(quantile(sorted, 1.0 - alpha), out.mean);
  out.samples = std::move(samples);
  return out;
}

McRiskEstimate empirical_risk(const Spectrum& spectrum, const GridConfig& grid, double q,
                              const McConfig& mc, Execution exec) {
  check_config(mc);
  if (spectrum.dimension() != grid.D) {
    throw Error(ErrorKind::InvalidConfiguration, "spectrum dimension differs from grid D");
  }
  auto samples = indexed_map<double>(
      mc.trials,
      [&](std::size_t i) { return trial_risk(spectrum, grid, q, mc.coefficient_model, mc.seed, i); },
      exec);
  return summarize(std::move(samples), mc.confidence);
}

std::vector<TailRow> concentration_check(const Spectrum& spectrum, const GridConfig& grid, double q,
                                         const std::vector<double>& t_grid, const McConfig& mc,
                                         Execution exec) {
  const double r = spectrum.decay();
  if (!(q > 0.5) || !(r >= q)) {
    throw Error(ErrorKind::OutOfRegime, "concentration check needs r >= q > 1/2");
  }
  if (grid.p < grid.n) throw Error(ErrorKind::WrongRegime, "concentration check is for p >= n");
  const auto estimate = empirical_risk(spectrum, grid, q, mc, exec);
  const double trials = static_cast<double>(estimate.samples.size());
  // deviations are measured from the exact expected risk
  const double center = grid.aligned() ? risk_closed(spectrum, grid, q) : risk_trace(spectrum, grid, q);

  std::vector<TailRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    TailRow row;
    row.t = t;
    std::size_t exceed = 0;
    for (double s : estimate.samples) exceed += std::abs(s - center) > t ? 1 : 0;
    row.empirical_tail = static_cast<double>(exceed) / trials;
    row.bound_tail = std::min(1.0, concentration_bound(r, q, t).tail);
    row.standard_error = std::sqrt(row.bound_tail * (1.0 - row.bound_tail) / trials);
    row.dominated = row.empirical_tail <= row.bound_tail + 3.0 * row.standard_error;
    rows.push_back(row);
  }
  return rows;
}

namespace reference {

double trial_risk(const Spectrum& spectrum, const GridConfig& grid, double q, CoefficientModel model,
                  std::uint64_t seed, std::uint64_t trial) {
  auto rng = trial_engine(seed, trial);
  const CVector theta = sample_theta(spectrum, model, rng);
  const CMatrix F = FourierFeatures(grid.n, {0, grid.D}).dense();
  const CVector y = F * theta;
  const auto p = static_cast<Eigen::Index>(grid.p);
  const CMatrix F_T = F.leftCols(p);

  CVector theta_hat = CVector::Zero(theta.size());
  if (grid.p <= grid.n) {
    theta_hat.head(p) = F_T.householderQr().solve(y);
  } else {
    std::vector<double> scale(grid.p);
    for (std::size_t k = 0; k < grid.p; ++k) scale[k] = std::pow(spectrum.t(k), q);
    theta_hat.head(p) = scaled_pinv_solve(F_T, scale, y);
  }
  return (theta - theta_hat).squaredNorm();
}

McRiskEstimate empirical_risk(const Spectrum& spectrum, const GridConfig& grid, double q,
                              const McConfig& mc) {
  check_config(mc);
  std::vector<double> samples(mc.trials);
  for (std::size_t i = 0; i < mc.trials; ++i) {
    samples[i] = reference::trial_risk(spectrum, grid, q, mc.coefficient_model, mc.seed, i);
  }
  return summarize(std::move(samples), mc.confidence);
}

}  // namespace reference

}  // namespace wmn
