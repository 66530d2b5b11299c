#pragma once

// Shared oracles and generators for the unit tests. Nothing here calls into
// the fast paths of the library: risks are computed from the estimator's
// D x D linear map, DFTs by direct summation.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline std::vector<cplx> naive_dft(const std::vector<cplx>& x, int sign) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t s = 0; s < n; ++s) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = sign * 2.0 * std::numbers::pi * double((j * s) % n) / double(n);
      acc += x[j] * cplx(std::cos(angle), std::sin(angle));
    }
    out[s] = acc;
  }
  return out;
}

// F_{j,k} = exp(-2 pi i j k / n), k in [0, cols)
inline CMat naive_features(std::size_t n, std::size_t cols) {
  CMat F(n, cols);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < cols; ++k) {
      const double angle = -2.0 * std::numbers::pi * double((j * k) % n) / double(n);
      F(j, k) = cplx(std::cos(angle), std::sin(angle));
    }
  return F;
}

inline std::vector<double> naive_t(std::size_t D) {
  std::vector<double> t(D);
  for (std::size_t j = 0; j < D; ++j) t[j] = 1.0 / double(j + 1);
  return t;
}

inline double naive_cr(std::size_t D, double r) {
  long double s = 0;
  for (std::size_t j = 0; j < D; ++j) s += std::pow((long double)(j + 1), -2.0L * r);
  return double(1.0L / s);
}

inline CMat pinv(const CMat& A) {
  Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cut = 1e-13 * s(0) * double(std::max(A.rows(), A.cols()));
  Eigen::VectorXd inv(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) inv(i) = s(i) > cut ? 1.0 / s(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

// Expected squared error E||theta - B theta||^2 = ||(I - B) K^{1/2}||_F^2 for
// theta ~ (0, c_r Sigma^{2r}), where B maps theta to the estimate obtained
// from y = F theta: Sigma_T^q pinv(F_T Sigma_T^q) y on the first p
// coordinates (q = 0 and p <= n give the plain pseudoinverse fit).
inline double oracle_risk(std::size_t D, std::size_t n, std::size_t p, double r, double q) {
  const auto t = naive_t(D);
  const double cr = naive_cr(D, r);
  const CMat F = naive_features(n, D);
  CMat FTs = F.leftCols(p);
  Eigen::VectorXd s(p);
  for (std::size_t k = 0; k < p; ++k) s(k) = p > n ? std::pow(t[k], q) : 1.0;
  FTs = FTs * s.asDiagonal();
  const CMat map_T = s.asDiagonal() * pinv(FTs) * F;  // p x D
  CMat E = CMat::Identity(D, D);
  E.topRows(p) -= map_T;
  double risk = 0.0;
  for (std::size_t k = 0; k < D; ++k) risk += cr * std::pow(t[k], 2 * r) * E.col(k).squaredNorm();
  return risk;
}

// Small hand-rolled generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  std::size_t size(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[size(0, v.size() - 1)];
  }
  cplx normal_c() {
    std::normal_distribution<double> g;
    return {g(rng_), g(rng_)};
  }
  CVec normal_vec(std::size_t m) {
    CVec v(m);
    for (std::size_t i = 0; i < m; ++i) v(i) = normal_c();
    return v;
  }
  bool coin() { return size(0, 1) == 1; }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
