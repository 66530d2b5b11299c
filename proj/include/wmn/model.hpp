#pragma once

// Spectral model: decay sequence t_j = (j+1)^-1, its normaliser c_r, and the
// (D, n, p) sampling grid. Indexing is 0-based throughout.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wmn {

class Spectrum {
 public:
  std::size_t dimension() const noexcept { return t_.size(); }
  double decay() const noexcept { return decay_r_; }
  double cr() const noexcept { return cr_; }
  std::span<const double> t() const noexcept { return t_; }
  double t(std::size_t j) const { return t_.at(j); }

  // Diagonal of the coefficient covariance K = c_r Sigma^{2r}.
  double variance(std::size_t j) const;

  friend Spectrum build_spectrum(std::size_t D, double r);

 private:
  Spectrum(std::vector<double> t, double r, double cr)
      : t_(std::move(t)), decay_r_(r), cr_(cr) {}

  std::vector<double> t_;
  double decay_r_;
  double cr_;
};

/// Builds t and c_r = 1 / sum_j t_j^{2r}. The sum runs from the smallest term
/// up. Throws InvalidDimension for D = 0 and OutOfRegime for r < 0.
Spectrum build_spectrum(std::size_t D, double r);

struct CrBounds {
  double lower;
  double upper;
};

/// Integral-comparison sandwich for c_r; requires r > 1/2.
CrBounds cr_bounds(std::size_t D, double r);

enum class Regime { Under, OverAligned, OverGeneral };

const char* to_string(Regime regime) noexcept;

struct GridConfig {
  std::size_t D = 0;
  std::size_t n = 0;
  std::size_t p = 0;
  std::optional<std::size_t> tau;  // D = tau * n
  std::optional<std::size_t> l;    // p = l * n
  Regime regime = Regime::Under;

  bool aligned() const noexcept { return tau.has_value() && l.has_value(); }
};

GridConfig classify_grid(std::size_t D, std::size_t n, std::size_t p);

// Coefficient covariance paired with the estimation weight exponent q.
class CoefficientCovariance {
 public:
  CoefficientCovariance(Spectrum spectrum, double q_weight);

  const Spectrum& spectrum() const noexcept { return spectrum_; }
  double q_weight() const noexcept { return q_weight_; }
  double entry(std::size_t j) const { return spectrum_.variance(j); }
  double trace() const;

 private:
  Spectrum spectrum_;
  double q_weight_;
};

}  // namespace wmn
