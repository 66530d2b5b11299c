#include "wmn/estimators.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "wmn/error.hpp"

namespace wmn {
namespace {

void check_inputs(const CVector& y, const Spectrum* spectrum, const GridConfig& grid) {
  if (static_cast<std::size_t>(y.size()) != grid.n) {
    throw Error(ErrorKind::InvalidConfiguration, "observation vector length differs from n");
  }
  if (spectrum && spectrum->dimension() != grid.D) {
    throw Error(ErrorKind::InvalidConfiguration, "spectrum dimension differs from grid D");
  }
}

std::vector<double> weight_powers(const Spectrum& spectrum, std::size_t p, double exponent) {
  std::vector<double> w(p);
  for (std::size_t k = 0; k < p; ++k) w[k] = std::pow(spectrum.t(k), exponent);
  return w;
}

double residual_norm(const CVector& theta, std::size_t n, std::size_t p, const CVector& y) {
  const CVector fitted = synthesize(n, std::span<const cplx>(theta.data(), p));
  return (fitted - y).norm();
}

}  // namespace

const char* to_string(SolverPath path) noexcept {
  switch (path) {
    case SolverPath::DenseSVD: return "dense_svd";
    case SolverPath::CirculantFFT: return "circulant_fft";
    case SolverPath::NormalEquations: return "normal_equations";
  }
  return "unknown";
}

CVector scaled_pinv_solve(const CMatrix& features, std::span<const double> scale, const CVector& y) {
  if (static_cast<std::size_t>(features.cols()) != scale.size() || features.rows() != y.size()) {
    throw Error(ErrorKind::InvalidConfiguration, "feature matrix, weights and observations disagree in size");
  }
  const Eigen::Map<const Eigen::VectorXd> s(scale.data(), static_cast<Eigen::Index>(scale.size()));
  const CMatrix scaled = features * s.asDiagonal();
  Eigen::BDCSVD<CMatrix> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const CVector beta = svd.solve(y);
  return s.asDiagonal() * beta;
}

EstimatorResult weighted_minnorm(const CVector& y, const Spectrum& spectrum, const GridConfig& grid,
                                 double q, SolverPath path) {
  check_inputs(y, &spectrum, grid);
  if (grid.p < grid.n) throw Error(ErrorKind::WrongRegime, "min-norm estimation needs p >= n");
  if (!(q >= 0.0)) throw Error(ErrorKind::OutOfRegime, "weight exponent q must be >= 0");

  const std::size_t n = grid.n;
  const std::size_t p = grid.p;
  EstimatorResult out;
  out.theta_hat = CVector::Zero(static_cast<Eigen::Index>(grid.D));
  out.q_used = q;
  out.path = path;

  switch (path) {
    case SolverPath::CirculantFFT: {
      if (!grid.l) {
        throw Error(ErrorKind::StructureViolation, "circulant path needs p to be a multiple of n");
      }
      // theta_k = w_k^{2q} g_{k mod n} / lambda_{k mod n}, with g = F_n^* y and
      // lambda the eigenvalues of A_{2q}.
      const auto lambda = gram_eigenvalues(spectrum, grid, 2.0 * q, GramSide::T);
      const CVector g = adjoint_fold(y);
      std::vector<cplx> ratio(n);
      for (std::size_t s = 0; s < n; ++s) {
        if (lambda[s] == 0.0) throw Error(ErrorKind::SingularSystem, "Gram eigenvalue vanished");
        ratio[s] = g(static_cast<Eigen::Index>(s)) / lambda[s];
      }
      for (std::size_t k = 0; k < p; ++k) {
        out.theta_hat(static_cast<Eigen::Index>(k)) = std::pow(spectrum.t(k), 2.0 * q) * ratio[k % n];
      }
      break;
    }
    case SolverPath::DenseSVD: {
      const auto scale = weight_powers(spectrum, p, q);
      const CMatrix F = FourierFeatures(n, {0, p}).dense();
      out.theta_hat.head(static_cast<Eigen::Index>(p)) = scaled_pinv_solve(F, scale, y);
      break;
    }
    case SolverPath::NormalEquations:
      throw Error(ErrorKind::WrongRegime, "normal equations apply to the underparameterized regime");
  }
  out.residual = residual_norm(out.theta_hat, n, p, y);
  return out;
}

EstimatorResult least_squares(const CVector& y, const GridConfig& grid) {
  check_inputs(y, nullptr, grid);
  if (grid.p > grid.n) throw Error(ErrorKind::WrongRegime, "least squares needs p <= n");
  const std::size_t n = grid.n;
  const std::size_t p = grid.p;
  EstimatorResult out;
  out.theta_hat = CVector::Zero(static_cast<Eigen::Index>(grid.D));
  out.path = SolverPath::NormalEquations;
  const CVector g = adjoint_fold(y);
  out.theta_hat.head(static_cast<Eigen::Index>(p)) = g.head(static_cast<Eigen::Index>(p)) / static_cast<double>(n);
  out.residual = residual_norm(out.theta_hat, n, p, y);
  return out;
}

double minnorm_kkt_check(const EstimatorResult& result, const GridConfig& grid,
                         const Spectrum& spectrum, double q) {
  const auto p = static_cast<Eigen::Index>(grid.p);
  CVector v = result.theta_hat.head(p);
  for (Eigen::Index k = 0; k < p; ++k) v(k) *= std::pow(spectrum.t(static_cast<std::size_t>(k)), -2.0 * q);
  const CMatrix F = FourierFeatures(grid.n, {0, grid.p}).dense();
  const CMatrix gram = F * F.adjoint();
  const CVector coeff = gram.ldlt().solve(F * v);
  const CVector projected = F.adjoint() * coeff;
  return (v - projected).norm();
}

}  // namespace wmn
