#pragma once

#include <span>

#include "wmn/circulant.hpp"
#include "wmn/model.hpp"

namespace wmn {

enum class SolverPath { DenseSVD, CirculantFFT, NormalEquations };

const char* to_string(SolverPath path) noexcept;

struct EstimatorResult {
  CVector theta_hat;  // length D; coordinates outside T are exactly zero
  double q_used = 0.0;
  SolverPath path = SolverPath::DenseSVD;
  double residual = 0.0;  // ||F_T theta_T - y||
};

/// Weighted minimum-norm interpolant, theta_T = Sigma_T^{2q} F_T^* (F_T Sigma_T^{2q} F_T^*)^{-1} y,
/// i.e. the minimiser of ||Sigma^{-q} theta|| subject to F_T theta_T = y.
///
/// DenseSVD evaluates Sigma^q pinv(F_T Sigma^q) y through an SVD and works for
/// any p >= n. CirculantFFT diagonalises the circulant Gram matrix and needs
/// p to be a multiple of n.
EstimatorResult weighted_minnorm(const CVector& y, const Spectrum& spectrum, const GridConfig& grid,
                                 double q, SolverPath path);

/// Least squares for p <= n. Equispaced features satisfy F_T^* F_T = n I, so
/// theta_T = F_T^* y / n; q plays no role.
EstimatorResult least_squares(const CVector& y, const GridConfig& grid);

/// Norm of the part of Sigma_T^{-2q} theta_T orthogonal to the row space of
/// F_T. Zero (up to rounding) exactly when theta is the weighted min-norm
/// solution.
double minnorm_kkt_check(const EstimatorResult& result, const GridConfig& grid,
                         const Spectrum& spectrum, double q);

/// Generic dense route: scale * pinv(features * diag(scale)) * y, with
/// scale_k = w_k^q supplied by the caller.
CVector scaled_pinv_solve(const CMatrix& features, std::span<const double> scale, const CVector& y);

}  // namespace wmn
