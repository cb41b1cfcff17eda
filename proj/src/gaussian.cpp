#include "thermoprobe/gaussian.hpp"

#include <cmath>
#include <string>

#include "thermoprobe/spectra.hpp"

namespace thermoprobe {

CovarianceMatrix::CovarianceMatrix(const Eigen::Matrix2d& m) : m_(m) {
  if (!m.allFinite()) throw Error(Errc::unphysical_covariance, "covariance has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (std::abs(m(0, 1) - m(1, 0)) > 1e-12 * scale) {
    throw Error(Errc::unphysical_covariance, "covariance is not symmetric");
  }
  m_(1, 0) = m_(0, 1);
  if (!(m_(0, 0) > 0.0) || !(m_.determinant() >= 1.0 - 1e-10)) {
    throw Error(Errc::unphysical_covariance,
                "covariance violates det >= 1 (det = " + std::to_string(m_.determinant()) + ")");
  }
}

CovarianceMatrix CovarianceMatrix::thermal(double gap, double temperature) {
  require_positive_temperature(temperature, "CovarianceMatrix::thermal");
  if (!(gap > 0.0)) throw Error(Errc::invalid_argument, "CovarianceMatrix::thermal: gap must be positive");
  const double coth = 1.0 / std::tanh(0.5 * gap / temperature);
  return CovarianceMatrix(coth * Eigen::Matrix2d::Identity());
}

CovarianceMatrix CovarianceMatrix::squeezed(double s) {
  if (!(s > 0.0)) throw Error(Errc::invalid_argument, "CovarianceMatrix::squeezed: s must be positive");
  return CovarianceMatrix(Eigen::Vector2d(s, 1.0 / s).asDiagonal().toDenseMatrix());
}

double fidelity_gaussian(const CovarianceMatrix& s1, const CovarianceMatrix& s2) {
  return gaussian_fidelity<double>(s1.matrix(), s2.matrix());
}

double infidelity_gaussian(const CovarianceMatrix& s1, const CovarianceMatrix& s2) {
  using Mat = Eigen::Matrix<long double, 2, 2>;
  const Mat a = s1.matrix().cast<long double>();
  const Mat b = s2.matrix().cast<long double>();
  return static_cast<double>(1.0L - gaussian_fidelity<long double>(a, b));
}

QfiValue qfi_harmonic_equilibrium(double gap, double temperature) {
  require_positive_temperature(temperature, "qfi_harmonic_equilibrium");
  if (!(gap > 0.0)) throw Error(Errc::invalid_argument, "qfi_harmonic_equilibrium: gap must be positive");
  const double y = 0.5 * gap / temperature;
  // csch^2 y = 4 e^{-2y} / (1 - e^{-2y})^2, finite for large y.
  const double one_minus = -std::expm1(-2.0 * y);
  const double csch2 = 4.0 * std::exp(-2.0 * y) / (one_minus * one_minus);
  const double t2 = temperature * temperature;
  return {gap * gap / (4.0 * t2 * t2) * csch2, temperature, "ho"};
}

double oscillator_rate(const DissipationModel& m, OscillatorRate rate) {
  return rate == OscillatorRate::net_damping ? m.oscillator_damping() : m.decay_rate();
}

CovarianceMatrix evolve_covariance(const CovarianceMatrix& sigma0, const DissipationModel& m, double t,
                                   OscillatorRate rate) {
  if (!std::isfinite(t)) throw Error(Errc::invalid_argument, "evolve_covariance: time must be finite");
  if (t < 0.0) throw Error(Errc::negative_time, "evolve_covariance: time must be >= 0");
  const double relaxed = -std::expm1(-oscillator_rate(m, rate) * t);
  const Eigen::Matrix2d target = CovarianceMatrix::thermal(m.gap(), m.temperature()).matrix();
  return CovarianceMatrix(sigma0.matrix() + relaxed * (target - sigma0.matrix()));
}

QfiValue qfi_harmonic_transient(const CovarianceMatrix& sigma0, const DissipationModel& m, double dt,
                                RateTemperature treatment, OscillatorRate rate) {
  if (!(dt > 0.0)) throw Error(Errc::invalid_argument, "qfi_harmonic_transient: dt must be positive");
  const double frozen_rate = oscillator_rate(m, rate);
  const auto family = [&](double t) {
    const DissipationModel at = m.at_temperature(t);
    const double k = treatment == RateTemperature::frozen ? frozen_rate : oscillator_rate(at, rate);
    const double relaxed = -std::expm1(-k * dt);
    const Eigen::Matrix2d target = CovarianceMatrix::thermal(m.gap(), t).matrix();
    return CovarianceMatrix(sigma0.matrix() + relaxed * (target - sigma0.matrix()));
  };
  QfiValue q = qfi_bures_oracle_gaussian(family, m.temperature());
  q.probe = "ho";
  return q;
}

std::vector<double> qfi_harmonic_transient_curve(const CovarianceMatrix& sigma0, const DissipationModel& m,
                                                 std::span<const double> dt_grid, RateTemperature treatment,
                                                 OscillatorRate rate) {
  std::vector<double> out;
  out.reserve(dt_grid.size());
  for (double dt : dt_grid) out.push_back(qfi_harmonic_transient(sigma0, m, dt, treatment, rate).value);
  return out;
}

}  // namespace thermoprobe
