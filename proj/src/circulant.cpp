#include "wmn/circulant.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wmn/error.hpp"
#include "wmn/fft.hpp"

namespace wmn {
namespace {

std::vector<cplx> to_std(const CVector& v) { return {v.data(), v.data() + v.size()}; }

CVector to_eigen(const std::vector<cplx>& v) {
  return Eigen::Map<const CVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

cplx FourierFeatures::entry(std::size_t j, std::size_t k) const {
  // reduce j*k mod n first so the phase stays accurate for large indices
  const std::size_t m = (j * k) % n_;
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n_);
  return {std::cos(angle), std::sin(angle)};
}

CMatrix FourierFeatures::dense() const {
  CMatrix F(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(cols_.size()));
  for (std::size_t j = 0; j < n_; ++j)
    for (std::size_t c = 0; c < cols_.size(); ++c)
      F(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = entry(j, cols_.begin + c);
  return F;
}

FourierFeatures feature_matrix(const GridConfig& grid, ColumnRange cols) {
  if (cols.end <= cols.begin || cols.end > grid.D) {
    std::ostringstream msg;
    msg << "column range [" << cols.begin << ", " << cols.end << ") must be non-empty within [0, "
        << grid.D << ")";
    throw Error(ErrorKind::InvalidRange, msg.str());
  }
  return FourierFeatures(grid.n, cols);
}

CVector synthesize(std::size_t n, std::span<const cplx> coeffs, std::size_t begin) {
  std::vector<cplx> folded(n, cplx{0.0, 0.0});
  for (std::size_t c = 0; c < coeffs.size(); ++c) folded[(begin + c) % n] += coeffs[c];
  return to_eigen(fft::forward(folded));
}

CVector adjoint_fold(const CVector& y) { return to_eigen(fft::backward(to_std(y))); }

CirculantGram CirculantGram::from_first_column(std::vector<cplx> column) {
  auto eigen = fft::backward(column);
  return CirculantGram(std::move(column), std::move(eigen));
}

CirculantGram CirculantGram::from_eigenvalues(std::vector<cplx> eigenvalues) {
  auto column = fft::forward(eigenvalues);
  const double inv_n = 1.0 / static_cast<double>(eigenvalues.size());
  for (auto& c : column) c *= inv_n;
  return CirculantGram(std::move(column), std::move(eigenvalues));
}

CVector CirculantGram::multiply(const CVector& x) const {
  auto g = fft::backward(to_std(x));
  for (std::size_t s = 0; s < g.size(); ++s) g[s] *= eigen_[s];
  auto out = fft::forward(g);
  const double inv_n = 1.0 / static_cast<double>(order());
  for (auto& v : out) v *= inv_n;
  return to_eigen(out);
}

CMatrix CirculantGram::dense() const {
  const auto n = static_cast<Eigen::Index>(order());
  CMatrix C(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index m = 0; m < n; ++m) C(j, m) = column_[static_cast<std::size_t>((j - m + n) % n)];
  return C;
}

std::vector<double> gram_eigenvalues(const Spectrum& spectrum, const GridConfig& grid, double u,
                                     GramSide side) {
  if (spectrum.dimension() != grid.D) {
    throw Error(ErrorKind::InvalidConfiguration, "spectrum dimension differs from grid D");
  }
  if (!grid.l) throw Error(ErrorKind::StructureViolation, "A_u needs p to be a multiple of n");
  if (side == GramSide::Tc && !grid.tau) {
    throw Error(ErrorKind::StructureViolation, "C_u needs D to be a multiple of n");
  }
  const std::size_t n = grid.n;
  const std::size_t nu_begin = side == GramSide::T ? 0 : *grid.l;
  const std::size_t nu_end = side == GramSide::T ? *grid.l : *grid.tau;
  std::vector<double> lambda(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double acc = 0.0;
    for (std::size_t nu = nu_begin; nu < nu_end; ++nu) acc += std::pow(spectrum.t(s + n * nu), u);
    lambda[s] = static_cast<double>(n) * acc;
  }
  return lambda;
}

CirculantGram weighted_gram(const Spectrum& spectrum, const GridConfig& grid, double u,
                            GramSide side) {
  auto lambda = gram_eigenvalues(spectrum, grid, u, side);
  return CirculantGram::from_eigenvalues({lambda.begin(), lambda.end()});
}

CVector circulant_solve(const CirculantGram& gram, const CVector& rhs) {
  const std::size_t n = gram.order();
  if (static_cast<std::size_t>(rhs.size()) != n) {
    throw Error(ErrorKind::InvalidConfiguration, "right-hand side length differs from system order");
  }
  const auto& lambda = gram.eigenvalues();
  for (const auto& l : lambda) {
    if (std::abs(l) == 0.0) throw Error(ErrorKind::SingularSystem, "circulant matrix has a zero eigenvalue");
  }
  auto g = fft::backward(to_std(rhs));
  for (std::size_t s = 0; s < n; ++s) g[s] /= lambda[s];
  auto x = fft::forward(g);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& v : x) v *= inv_n;
  return to_eigen(x);
}

}  // namespace wmn
