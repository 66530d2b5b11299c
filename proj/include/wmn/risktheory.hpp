#pragma once

// Closed-form, eigenvalue-form and trace-form risks of the plain (q = 0) and
// weighted (q > 0) min-norm estimators and of least squares, together with
// the rate and concentration bounds.
//
// All risks assume E[theta] = 0, E[theta theta^*] = c_r Sigma^{2r}, so the
// total variance tr(K) is 1.

#include <cstddef>

#include "wmn/model.hpp"

namespace wmn {

struct RiskBreakdown {
  double P_q = 0.0;
  double Q_q1 = 0.0;
  double Q_q2 = 0.0;
  double risk = 0.0;
  bool clamped = false;  // a value in [-1e-10, 0) was reported as 0
};

struct BoundReport {
  double a = 0.0;
  double b = 0.0;
  double d_r = 0.0;
  double bound = 0.0;
  double large_D_bound = 0.0;
};

struct ConcentrationBound {
  double T_q = 0.0;
  double tail = 0.0;  // 2 exp(-min(t^2/T_q^2, t/T_q)); may exceed 1
};

struct LowestRisks {
  double under_star = 0.0;
  double over_star = 0.0;
  std::size_t argmin_p_over = 0;
};

/// Risks below this magnitude are rounding noise and reported as zero; more
/// negative values throw NumericalInconsistency.
inline constexpr double kNegativeRiskTolerance = 1e-10;

/// Closed form from the circulant eigenvalues. Needs p = l n and D = tau n.
RiskBreakdown risk_over_closed(const Spectrum& spectrum, const GridConfig& grid, double q);

/// q = 0 specialisation: 1 - n/p + (2n/p) c_r sum_{j >= p} t_j^{2r}.
double risk_over_plain(const Spectrum& spectrum, const GridConfig& grid);

/// Dense trace evaluation of P_q, Q_{q,1}, Q_{q,2}; any p >= n.
RiskBreakdown risk_trace_over(const Spectrum& spectrum, const GridConfig& grid, double q);

/// Least-squares risk for p <= n and D = tau n.
double risk_under_closed(const Spectrum& spectrum, const GridConfig& grid);

/// Dense trace form of the least-squares risk; any p <= n.
double risk_trace_under(const Spectrum& spectrum, const GridConfig& grid);

/// Closed-form risk in whichever regime the grid is in (p <= n: least
/// squares, otherwise the weighted min-norm closed form).
double risk_closed(const Spectrum& spectrum, const GridConfig& grid, double q);

/// Trace-form counterpart of risk_closed; also covers unaligned grids.
double risk_trace(const Spectrum& spectrum, const GridConfig& grid, double q);

/// Rate bound a n^{-2r+1} + b n^{-2r} p^{-2r+1} for q = r > 1/2 and l >= 2.
BoundReport asymptotic_bound(const Spectrum& spectrum, const GridConfig& grid, double q);

/// T_q and the two-sided tail for deviations larger than t; needs
/// r >= q > 1/2.
ConcentrationBound concentration_bound(double r, double q, double t);

/// Lowest least-squares risk (at p = n) and lowest weighted min-norm risk
/// over p = 2n, 3n, ..., D. Needs D = tau n.
LowestRisks lowest_risks(const Spectrum& spectrum, std::size_t n, double q);

}  // namespace wmn
