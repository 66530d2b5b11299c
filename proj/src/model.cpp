#include "wmn/model.hpp"

#include <cmath>
#include <sstream>

#include "wmn/error.hpp"

namespace wmn {

double Spectrum::variance(std::size_t j) const {
  return cr_ * std::pow(t_.at(j), 2.0 * decay_r_);
}

Spectrum build_spectrum(std::size_t D, double r) {
  if (D == 0) throw Error(ErrorKind::InvalidDimension, "spectrum needs D >= 1");
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::OutOfRegime, "decay exponent r must be finite and >= 0");
  }
  std::vector<double> t(D);
  for (std::size_t j = 0; j < D; ++j) t[j] = 1.0 / static_cast<double>(j + 1);

  // smallest terms first
  double total = 0.0;
  for (std::size_t j = D; j-- > 0;) total += std::pow(t[j], 2.0 * r);
  return Spectrum(std::move(t), r, 1.0 / total);
}

CrBounds cr_bounds(std::size_t D, double r) {
  if (D == 0) throw Error(ErrorKind::InvalidDimension, "cr_bounds needs D >= 1");
  if (!(r > 0.5)) throw Error(ErrorKind::OutOfRegime, "cr_bounds requires r > 1/2");
  const double e = -2.0 * r + 1.0;
  const double Dd = static_cast<double>(D);
  return {(2.0 * r - 1.0) / (2.0 * r - std::pow(Dd, e)),
          (2.0 * r - 1.0) / (1.0 - std::pow(Dd + 1.0, e))};
}

const char* to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::Under: return "under";
    case Regime::OverAligned: return "over_aligned";
    case Regime::OverGeneral: return "over_general";
  }
  return "unknown";
}

GridConfig classify_grid(std::size_t D, std::size_t n, std::size_t p) {
  if (D == 0 || n == 0 || p == 0 || p > D || n > D) {
    std::ostringstream msg;
    msg << "grid (D=" << D << ", n=" << n << ", p=" << p << ") needs 1 <= p <= D and 1 <= n <= D";
    throw Error(ErrorKind::InvalidConfiguration, msg.str());
  }
  GridConfig g;
  g.D = D;
  g.n = n;
  g.p = p;
  if (D % n == 0) g.tau = D / n;
  if (p % n == 0) g.l = p / n;
  if (p <= n) {
    g.regime = Regime::Under;
  } else if (g.l) {
    g.regime = Regime::OverAligned;
  } else {
    g.regime = Regime::OverGeneral;
  }
  return g;
}

CoefficientCovariance::CoefficientCovariance(Spectrum spectrum, double q_weight)
    : spectrum_(std::move(spectrum)), q_weight_(q_weight) {
  if (!(q_weight >= 0.0)) throw Error(ErrorKind::OutOfRegime, "weight exponent q must be >= 0");
}

double CoefficientCovariance::trace() const {
  double total = 0.0;
  for (std::size_t j = spectrum_.dimension(); j-- > 0;) total += spectrum_.variance(j);
  return total;
}

}  // namespace wmn
