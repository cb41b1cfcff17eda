#pragma once

// Probe energy spectra and their Gibbs statistics (hbar = k_B = 1).

#include <Eigen/Dense>

#include <vector>

namespace thermoprobe {

/// Energies of an N-level probe, N >= 2, kept in ascending order.
/// Degenerate levels are stored explicitly.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> energies);
  explicit Spectrum(const Eigen::Ref<const Eigen::VectorXd>& energies);

  const Eigen::VectorXd& energies() const noexcept { return energies_; }
  Eigen::Index size() const noexcept { return energies_.size(); }
  double ground() const noexcept { return energies_[0]; }
  double top() const noexcept { return energies_[energies_.size() - 1]; }

  Spectrum shifted(double offset) const;
  Spectrum scaled(double factor) const;

  std::vector<double> to_vector() const;

 private:
  Eigen::VectorXd energies_;
};

/// Two distinct energies: n0 levels at 0 and n - n0 levels at `gap`.
class EffectiveTwoLevelSpectrum {
 public:
  EffectiveTwoLevelSpectrum(double gap, int n, int n0);

  double gap() const noexcept { return gap_; }
  int n() const noexcept { return n_; }
  int n0() const noexcept { return n0_; }
  int excited_degeneracy() const noexcept { return n_ - n0_; }

  Spectrum expand() const;

 private:
  double gap_;
  int n_;
  int n0_;
};

class ThermalEnsemble {
 public:
  const Spectrum& spectrum() const noexcept { return spectrum_; }
  double temperature() const noexcept { return temperature_; }
  const Eigen::VectorXd& populations() const noexcept { return populations_; }
  double log_partition() const noexcept { return log_partition_; }
  double partition() const;

 private:
  friend ThermalEnsemble thermalize(const Spectrum& s, double temperature);
  ThermalEnsemble(Spectrum s, double t, Eigen::VectorXd p, double log_z)
      : spectrum_(std::move(s)), temperature_(t), populations_(std::move(p)), log_partition_(log_z) {}

  Spectrum spectrum_;
  double temperature_;
  Eigen::VectorXd populations_;
  double log_partition_;
};

/// Gibbs populations. Throws NonPositiveTemperature unless T > 0.
ThermalEnsemble thermalize(const Spectrum& s, double temperature);

/// Gibbs populations for energies measured from the ground level; the
/// workhorse behind thermalize, also used by the dynamics module.
Eigen::VectorXd gibbs_populations(const Eigen::Ref<const Eigen::VectorXd>& energies, double temperature);

double log_partition(const Spectrum& s, double temperature);

double mean_energy(const ThermalEnsemble& e);
double energy_second_moment(const ThermalEnsemble& e);
double energy_variance(const ThermalEnsemble& e);
double heat_capacity(const ThermalEnsemble& e);

// Closed forms for the effective two-level family, x = gap / T.
double mean_energy(const EffectiveTwoLevelSpectrum& s, double temperature);
double energy_variance(const EffectiveTwoLevelSpectrum& s, double temperature);
double heat_capacity(const EffectiveTwoLevelSpectrum& s, double temperature);

void require_positive_temperature(double temperature, const char* where);

}  // namespace thermoprobe
