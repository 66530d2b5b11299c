#include "wmn/risktheory.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "wmn/circulant.hpp"
#include "wmn/error.hpp"

namespace wmn {
namespace {

constexpr std::size_t kCompensatedThreshold = std::size_t{1} << 16;

// Plain or Kahan-compensated accumulation depending on problem size.
class Accumulator {
 public:
  explicit Accumulator(bool compensated) : compensated_(compensated) {}

  void add(double v) {
    if (!compensated_) {
      sum_ += v;
      return;
    }
    const double y = v - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }

  double value() const { return sum_; }

 private:
  bool compensated_;
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// sum_{nu in [nu_begin, nu_end)} t_{k + n nu}^u, ascending nu.
double alias_sum(const Spectrum& s, std::size_t k, std::size_t n, std::size_t nu_begin,
                 std::size_t nu_end, double u) {
  Accumulator acc(s.dimension() >= kCompensatedThreshold);
  for (std::size_t nu = nu_begin; nu < nu_end; ++nu) acc.add(std::pow(s.t(k + n * nu), u));
  return acc.value();
}

// sum_{j in [begin, end)} t_j^u, smallest terms first.
double tail_sum(const Spectrum& s, std::size_t begin, std::size_t end, double u) {
  Accumulator acc(s.dimension() >= kCompensatedThreshold);
  for (std::size_t j = end; j-- > begin;) acc.add(std::pow(s.t(j), u));
  return acc.value();
}

void check_dimension(const Spectrum& s, const GridConfig& g) {
  if (s.dimension() != g.D) {
    std::ostringstream msg;
    msg << "spectrum has D=" << s.dimension() << " but grid has D=" << g.D;
    throw Error(ErrorKind::InvalidConfiguration, msg.str());
  }
}

void check_aligned_over(const GridConfig& g) {
  if (!g.l || !g.tau) {
    throw Error(ErrorKind::StructureViolation, "closed form needs p = l n and D = tau n");
  }
}

void check_q(double q) {
  if (!(q >= 0.0) || !std::isfinite(q)) throw Error(ErrorKind::OutOfRegime, "q must be finite and >= 0");
}

double finalize(double risk, bool& clamped) {
  clamped = false;
  if (risk >= 0.0) return risk;
  if (risk >= -kNegativeRiskTolerance) {
    clamped = true;
    return 0.0;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "negative risk " << risk;
  throw Error(ErrorKind::NumericalInconsistency, msg.str());
}

double finalize(double risk) {
  bool clamped = false;
  return finalize(risk, clamped);
}

Eigen::VectorXd powers(const Spectrum& s, std::size_t begin, std::size_t end, double u, double scale = 1.0) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(end - begin));
  for (std::size_t j = begin; j < end; ++j) v(static_cast<Eigen::Index>(j - begin)) = scale * std::pow(s.t(j), u);
  return v;
}

}  // namespace

RiskBreakdown risk_over_closed(const Spectrum& spectrum, const GridConfig& grid, double q) {
  check_dimension(spectrum, grid);
  if (grid.p < grid.n) throw Error(ErrorKind::WrongRegime, "overparameterized closed form needs p >= n");
  check_aligned_over(grid);
  check_q(q);
  const double r = spectrum.decay();
  const std::size_t n = grid.n;
  const std::size_t l = *grid.l;
  const std::size_t tau = *grid.tau;

  Accumulator P(grid.D >= kCompensatedThreshold), Q1(grid.D >= kCompensatedThreshold),
      Q2(grid.D >= kCompensatedThreshold);
  for (std::size_t k = 0; k < n; ++k) {
    const double a2q = alias_sum(spectrum, k, n, 0, l, 2.0 * q);
    const double a2q2r = alias_sum(spectrum, k, n, 0, l, 2.0 * q + 2.0 * r);
    const double a4q = alias_sum(spectrum, k, n, 0, l, 4.0 * q);
    const double a2r = alias_sum(spectrum, k, n, 0, l, 2.0 * r);
    const double c2r = alias_sum(spectrum, k, n, l, tau, 2.0 * r);
    P.add(a2q2r / a2q);
    Q1.add(a4q * a2r / (a2q * a2q));
    Q2.add(a4q * c2r / (a2q * a2q));
  }
  RiskBreakdown out;
  out.P_q = spectrum.cr() * P.value();
  out.Q_q1 = spectrum.cr() * Q1.value();
  out.Q_q2 = spectrum.cr() * Q2.value();
  out.risk = finalize(1.0 - 2.0 * out.P_q + out.Q_q1 + out.Q_q2, out.clamped);
  return out;
}

double risk_over_plain(const Spectrum& spectrum, const GridConfig& grid) {
  check_dimension(spectrum, grid);
  if (grid.p < grid.n) throw Error(ErrorKind::WrongRegime, "overparameterized closed form needs p >= n");
  check_aligned_over(grid);
  const double ratio = static_cast<double>(grid.n) / static_cast<double>(grid.p);
  const double tail = spectrum.cr() * tail_sum(spectrum, grid.p, grid.D, 2.0 * spectrum.decay());
  return finalize(1.0 - ratio + 2.0 * ratio * tail);
}

RiskBreakdown risk_trace_over(const Spectrum& spectrum, const GridConfig& grid, double q) {
  check_dimension(spectrum, grid);
  check_q(q);
  if (grid.p < grid.n) throw Error(ErrorKind::WrongRegime, "overparameterized trace form needs p >= n");
  const double r = spectrum.decay();
  const double cr = spectrum.cr();

  const CMatrix F_T = FourierFeatures(grid.n, {0, grid.p}).dense();
  const Eigen::VectorXd wq = powers(spectrum, 0, grid.p, q);
  const Eigen::VectorXd k_T = powers(spectrum, 0, grid.p, 2.0 * r, cr);

  // With Sigma^q F_T^* = Q R (thin QR) the Gram matrix is A = R^* R, so each
  // A^{-1} splits into two triangular solves and is never formed. This keeps
  // the error at the square root of cond(A).
  const auto n = static_cast<Eigen::Index>(grid.n);
  const auto p = static_cast<Eigen::Index>(grid.p);
  const CMatrix Mt = wq.asDiagonal() * F_T.adjoint();
  const Eigen::HouseholderQR<CMatrix> qr(Mt);
  const CMatrix Q = qr.householderQ() * CMatrix::Identity(p, n);
  const auto R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  const CMatrix WQ = wq.asDiagonal() * Q;

  // tr(Q^* Sigma^{2q} Q Y Y^*) for Y = R^{-*} X
  auto quadratic = [&](const CMatrix& X) {
    const CMatrix Y = R.adjoint().solve(X);
    return (WQ * Y).squaredNorm();
  };

  double trace_K = 0.0;
  for (std::size_t j = grid.D; j-- > 0;) trace_K += spectrum.variance(j);

  RiskBreakdown out;
  out.P_q = Q.rowwise().squaredNorm().dot(k_T);
  out.Q_q1 = quadratic(F_T * k_T.cwiseSqrt().asDiagonal());
  if (grid.p < grid.D) {
    const CMatrix F_Tc = FourierFeatures(grid.n, {grid.p, grid.D}).dense();
    const Eigen::VectorXd k_Tc = powers(spectrum, grid.p, grid.D, 2.0 * r, cr);
    out.Q_q2 = quadratic(F_Tc * k_Tc.cwiseSqrt().asDiagonal());
  }
  out.risk = finalize(trace_K - 2.0 * out.P_q + out.Q_q1 + out.Q_q2, out.clamped);
  return out;
}

double risk_under_closed(const Spectrum& spectrum, const GridConfig& grid) {
  check_dimension(spectrum, grid);
  if (grid.p > grid.n) throw Error(ErrorKind::WrongRegime, "underparameterized closed form needs p <= n");
  if (!grid.tau) throw Error(ErrorKind::StructureViolation, "underparameterized closed form needs D = tau n");
  const double two_r = 2.0 * spectrum.decay();
  const std::size_t n = grid.n;
  Accumulator acc(grid.D >= kCompensatedThreshold);
  acc.add(tail_sum(spectrum, grid.p, grid.D, two_r));
  for (std::size_t k = 1; k < *grid.tau; ++k) acc.add(tail_sum(spectrum, k * n, k * n + grid.p, two_r));
  return finalize(spectrum.cr() * acc.value());
}

double risk_trace_under(const Spectrum& spectrum, const GridConfig& grid) {
  check_dimension(spectrum, grid);
  if (grid.p > grid.n) throw Error(ErrorKind::WrongRegime, "underparameterized trace form needs p <= n");
  if (grid.p == grid.D) return 0.0;
  const double cr = spectrum.cr();
  const double two_r = 2.0 * spectrum.decay();

  const CMatrix F_T = FourierFeatures(grid.n, {0, grid.p}).dense();
  const CMatrix F_Tc = FourierFeatures(grid.n, {grid.p, grid.D}).dense();
  const Eigen::VectorXd k_Tc = powers(spectrum, grid.p, grid.D, two_r, cr);

  const CMatrix G = F_T.adjoint() * F_T;
  const Eigen::PartialPivLU<CMatrix> lu(G);
  const CMatrix G_inv = lu.inverse();
  const CMatrix projector = F_T * G_inv * G_inv * F_T.adjoint();
  const CMatrix KC = F_Tc * k_Tc.asDiagonal() * F_Tc.adjoint();
  return finalize(k_Tc.sum() + (projector * KC).trace().real());
}

double risk_closed(const Spectrum& spectrum, const GridConfig& grid, double q) {
  if (grid.p <= grid.n) return risk_under_closed(spectrum, grid);
  return risk_over_closed(spectrum, grid, q).risk;
}

double risk_trace(const Spectrum& spectrum, const GridConfig& grid, double q) {
  if (grid.p <= grid.n) return risk_trace_under(spectrum, grid);
  return risk_trace_over(spectrum, grid, q).risk;
}

BoundReport asymptotic_bound(const Spectrum& spectrum, const GridConfig& grid, double q) {
  check_dimension(spectrum, grid);
  check_aligned_over(grid);
  const double r = spectrum.decay();
  if (std::abs(q - r) > 1e-12) throw Error(ErrorKind::OutOfRegime, "rate bound needs q = r");
  if (!(r > 0.5)) throw Error(ErrorKind::OutOfRegime, "rate bound needs r > 1/2");
  if (*grid.l < 2) throw Error(ErrorKind::OutOfRegime, "rate bound needs l >= 2");

  const double e = -2.0 * r + 1.0;
  const double n = static_cast<double>(grid.n);
  const double p = static_cast<double>(grid.p);
  const double l = static_cast<double>(*grid.l);
  const double D = static_cast<double>(grid.D);

  BoundReport out;
  out.d_r = (std::pow(2.0, e) - std::pow(l + 1.0, e)) / (2.0 * r - 1.0);
  const double x = out.d_r * std::pow(n, -2.0 * r);
  const double tail = 1.0 - std::pow(D + 1.0, e);
  out.a = (2.0 + x) / ((1.0 + x) * tail);
  out.b = out.d_r / ((1.0 + x) * tail);
  out.bound = out.a * std::pow(n, e) + out.b * std::pow(n, -2.0 * r) * std::pow(p, e);
  out.large_D_bound = 2.0 * std::pow(n, e) + 2.0 / (2.0 * r - 1.0) * std::pow(2.0 * n, -2.0 * r) * std::pow(p, e);
  return out;
}

ConcentrationBound concentration_bound(double r, double q, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::OutOfRegime, "deviation t must be >= 0");
  if (!(q >= 0.5) || !(r >= q)) throw Error(ErrorKind::OutOfRegime, "concentration bound needs r >= q >= 1/2");
  const double denom = (2.0 * q - 1.0) * (2.0 * q - 1.0) * (4.0 * q - 1.0);
  if (!(4.0 * q - 1.0 > 0.0) || denom == 0.0) {
    throw Error(ErrorKind::SingularConstant, "T_q is unbounded at q = 1/2");
  }
  ConcentrationBound out;
  out.T_q = 4.0 * (2.0 * r - 1.0) * std::sqrt(q * (24.0 * q * q - 17.0 * q + 3.0) / denom);
  if (out.T_q == 0.0) {
    out.tail = t > 0.0 ? 0.0 : 2.0;
    return out;
  }
  const double s = t / out.T_q;
  out.tail = 2.0 * std::exp(-std::min(s * s, s));
  return out;
}

LowestRisks lowest_risks(const Spectrum& spectrum, std::size_t n, double q) {
  const std::size_t D = spectrum.dimension();
  const GridConfig at_n = classify_grid(D, n, n);
  if (!at_n.tau) throw Error(ErrorKind::StructureViolation, "lowest risks need D = tau n");
  const std::size_t tau = *at_n.tau;

  LowestRisks out;
  out.under_star = risk_under_closed(spectrum, at_n);
  out.over_star = std::numeric_limits<double>::infinity();
  for (std::size_t l = tau >= 2 ? 2 : 1; l <= tau; ++l) {
    const double risk = risk_over_closed(spectrum, classify_grid(D, n, l * n), q).risk;
    if (risk < out.over_star) {
      out.over_star = risk;
      out.argmin_p_over = l * n;
    }
  }
  return out;
}

}  // namespace wmn
