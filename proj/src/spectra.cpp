#include "thermoprobe/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thermoprobe/error.hpp"

namespace thermoprobe {

namespace {

Eigen::VectorXd validated(Eigen::VectorXd e) {
  if (e.size() < 2) throw Error(Errc::invalid_spectrum, "Spectrum: need at least two levels");
  if (!e.allFinite()) throw Error(Errc::invalid_spectrum, "Spectrum: energies must be finite");
  std::sort(e.data(), e.data() + e.size());
  return e;
}

}  // namespace

Spectrum::Spectrum(std::vector<double> energies)
    : energies_(validated(Eigen::Map<const Eigen::VectorXd>(energies.data(), static_cast<Eigen::Index>(energies.size())))) {}

Spectrum::Spectrum(const Eigen::Ref<const Eigen::VectorXd>& energies) : energies_(validated(energies)) {}

Spectrum Spectrum::shifted(double offset) const { return Spectrum(Eigen::VectorXd(energies_.array() + offset)); }

Spectrum Spectrum::scaled(double factor) const { return Spectrum(Eigen::VectorXd(energies_ * factor)); }

std::vector<double> Spectrum::to_vector() const { return {energies_.data(), energies_.data() + energies_.size()}; }

EffectiveTwoLevelSpectrum::EffectiveTwoLevelSpectrum(double gap, int n, int n0) : gap_(gap), n_(n), n0_(n0) {
  if (!(gap > 0.0) || !std::isfinite(gap)) throw Error(Errc::invalid_spectrum, "effective two-level: gap must be positive");
  if (n < 2) throw Error(Errc::invalid_spectrum, "effective two-level: need n >= 2");
  if (n0 < 1 || n0 > n - 1) {
    throw Error(Errc::invalid_spectrum, "effective two-level: n0 = " + std::to_string(n0) + " outside [1, " +
                                            std::to_string(n - 1) + "]");
  }
}

Spectrum EffectiveTwoLevelSpectrum::expand() const {
  Eigen::VectorXd e(n_);
  e.head(n0_).setZero();
  e.tail(n_ - n0_).setConstant(gap_);
  return Spectrum(e);
}

void require_positive_temperature(double temperature, const char* where) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(Errc::non_positive_temperature, std::string(where) + ": temperature must be positive and finite");
  }
}

Eigen::VectorXd gibbs_populations(const Eigen::Ref<const Eigen::VectorXd>& energies, double temperature) {
  require_positive_temperature(temperature, "gibbs_populations");
  // Measuring from the lowest level keeps every exponent <= 0.
  const double floor = energies.minCoeff();
  Eigen::VectorXd w = (-(energies.array() - floor) / temperature).exp();
  return w / w.sum();
}

double log_partition(const Spectrum& s, double temperature) {
  require_positive_temperature(temperature, "log_partition");
  const double floor = s.ground();
  return -floor / temperature + std::log((-(s.energies().array() - floor) / temperature).exp().sum());
}

double ThermalEnsemble::partition() const { return std::exp(log_partition_); }

ThermalEnsemble thermalize(const Spectrum& s, double temperature) {
  require_positive_temperature(temperature, "thermalize");
  return ThermalEnsemble(s, temperature, gibbs_populations(s.energies(), temperature), log_partition(s, temperature));
}

double mean_energy(const ThermalEnsemble& e) { return e.populations().dot(e.spectrum().energies()); }

double energy_second_moment(const ThermalEnsemble& e) {
  return e.populations().dot(e.spectrum().energies().cwiseAbs2());
}

double energy_variance(const ThermalEnsemble& e) {
  const double mean = mean_energy(e);
  return e.populations().dot((e.spectrum().energies().array() - mean).square().matrix());
}

double heat_capacity(const ThermalEnsemble& e) {
  const double t = e.temperature();
  return energy_variance(e) / (t * t);
}

double mean_energy(const EffectiveTwoLevelSpectrum& s, double temperature) {
  require_positive_temperature(temperature, "mean_energy");
  const double x = s.gap() / temperature;
  const double excited = s.excited_degeneracy() * std::exp(-x);
  return temperature * x * excited / (s.n0() + excited);
}

double energy_variance(const EffectiveTwoLevelSpectrum& s, double temperature) {
  require_positive_temperature(temperature, "energy_variance");
  const double x = s.gap() / temperature;
  const double boltz = std::exp(-x);
  const double denom = s.excited_degeneracy() * boltz + s.n0();
  return temperature * temperature * s.n0() * s.excited_degeneracy() * x * x * boltz / (denom * denom);
}

double heat_capacity(const EffectiveTwoLevelSpectrum& s, double temperature) {
  return energy_variance(s, temperature) / (temperature * temperature);
}

}  // namespace thermoprobe
