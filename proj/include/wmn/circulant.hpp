#pragma once

// Equispaced Fourier features F_{j,k} = exp(-2 pi i j k / n) and the
// circulant Gram matrices A_u = F_T Sigma_T^u F_T^*, C_u = F_Tc Sigma_Tc^u F_Tc^*.
//
// The experiments write the features with exp(+2 pi i j k / n). The two
// conventions are complex conjugates of each other, which leaves every Gram
// matrix spectrum and every risk unchanged; this module uses the minus sign.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wmn/model.hpp"

namespace wmn {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct ColumnRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
};

enum class GramSide { T, Tc };

class FourierFeatures {
 public:
  FourierFeatures(std::size_t n, ColumnRange cols) : n_(n), cols_(cols) {}

  std::size_t rows() const noexcept { return n_; }
  ColumnRange columns() const noexcept { return cols_; }

  /// Entry for row j and absolute column index k.
  cplx entry(std::size_t j, std::size_t k) const;
  CMatrix dense() const;

 private:
  std::size_t n_;
  ColumnRange cols_;
};

/// Throws InvalidRange for an empty range or one reaching past D.
FourierFeatures feature_matrix(const GridConfig& grid, ColumnRange cols);

/// y_j = sum_{k in [begin, begin + size)} coeffs_k exp(-2 pi i j k / n), by
/// folding the coefficients mod n and running one length-n FFT.
CVector synthesize(std::size_t n, std::span<const cplx> coeffs, std::size_t begin = 0);

/// g_s = sum_j y_j exp(+2 pi i j s / n), i.e. F_n^* y. Entry k of F^* y for any
/// column set is g_{k mod n}.
CVector adjoint_fold(const CVector& y);

// Circulant matrix C with C_{j,m} = c_{(j - m) mod n}. With F_n the DFT
// matrix, C = F_n diag(lambda) F_n^* / n where
// lambda_s = sum_m c_m exp(+2 pi i m s / n); column s of F_n is eigenvector s.
class CirculantGram {
 public:
  static CirculantGram from_first_column(std::vector<cplx> column);
  static CirculantGram from_eigenvalues(std::vector<cplx> eigenvalues);

  std::size_t order() const noexcept { return column_.size(); }
  const std::vector<cplx>& first_column() const noexcept { return column_; }
  const std::vector<cplx>& eigenvalues() const noexcept { return eigen_; }

  CVector multiply(const CVector& x) const;
  CMatrix dense() const;

 private:
  CirculantGram(std::vector<cplx> column, std::vector<cplx> eigen)
      : column_(std::move(column)), eigen_(std::move(eigen)) {}

  std::vector<cplx> column_;
  std::vector<cplx> eigen_;
};

/// Eigenvalues of A_u (side T) or C_u (side Tc) in DFT frequency order:
/// lambda_s = n * sum_nu t_{s + n nu}^u, nu over [0, l) or [l, tau).
/// Throws StructureViolation when p (side T) or D (side Tc) is not a
/// multiple of n.
std::vector<double> gram_eigenvalues(const Spectrum& spectrum, const GridConfig& grid, double u,
                                     GramSide side);

/// The Gram matrix as a CirculantGram, built from gram_eigenvalues.
CirculantGram weighted_gram(const Spectrum& spectrum, const GridConfig& grid, double u,
                            GramSide side);

/// A^{-1} rhs by forward FFT, pointwise division, inverse FFT. Throws
/// SingularSystem if any eigenvalue vanishes.
CVector circulant_solve(const CirculantGram& gram, const CVector& rhs);

}  // namespace wmn
