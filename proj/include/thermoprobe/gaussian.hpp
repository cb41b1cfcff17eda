#pragma once

// Single-mode Gaussian probes with zero first moments, in the convention where
// the vacuum covariance is the identity and a thermal mode has
// sigma_T = coth(gap / 2T) * 1.

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

#include "thermoprobe/dynamics.hpp"
#include "thermoprobe/error.hpp"
#include "thermoprobe/information.hpp"

namespace thermoprobe {

class CovarianceMatrix {
 public:
  /// Throws UnphysicalCovariance unless m is finite, symmetric (1e-12
  /// relative) and det m >= 1 - 1e-10.
  explicit CovarianceMatrix(const Eigen::Matrix2d& m);

  static CovarianceMatrix vacuum() { return CovarianceMatrix(Eigen::Matrix2d::Identity()); }
  static CovarianceMatrix thermal(double gap, double temperature);
  /// diag(s, 1/s), a squeezed vacuum.
  static CovarianceMatrix squeezed(double s);

  const Eigen::Matrix2d& matrix() const noexcept { return m_; }
  double determinant() const { return m_.determinant(); }
  bool pure(double tol = 1e-10) const { return std::abs(determinant() - 1.0) <= tol; }

 private:
  Eigen::Matrix2d m_;
};

struct GaussianProbe {
  CovarianceMatrix covariance = CovarianceMatrix::vacuum();
  double frequency = 1.0;
};

/// 2 / (sqrt(D + L) - sqrt L) with D = det(s1 + s2), L = (det s1 - 1)(det s2 - 1),
/// evaluated as 2 (sqrt(D + L) + sqrt L) / D. L is clamped at 0.
template <class Scalar>
Scalar gaussian_fidelity(const Eigen::Matrix<Scalar, 2, 2>& s1, const Eigen::Matrix<Scalar, 2, 2>& s2) {
  using std::sqrt;
  const Scalar delta = (s1 + s2).determinant();
  Scalar lambda = (s1.determinant() - Scalar(1)) * (s2.determinant() - Scalar(1));
  if (lambda < Scalar(0)) lambda = Scalar(0);
  const Scalar f = Scalar(2) * (sqrt(delta + lambda) + sqrt(lambda)) / delta;
  return f > Scalar(1) ? Scalar(1) : f;
}

double fidelity_gaussian(const CovarianceMatrix& s1, const CovarianceMatrix& s2);

/// 1 - fidelity_gaussian, carried out in long double.
double infidelity_gaussian(const CovarianceMatrix& s1, const CovarianceMatrix& s2);

/// gap^2 / (4 T^4) csch^2(gap / 2T).
QfiValue qfi_harmonic_equilibrium(double gap, double temperature);

/// QFI of a covariance family T -> sigma(T) from the curvature of the Gaussian
/// fidelity at T.
template <class Family>
QfiValue qfi_bures_oracle_gaussian(Family&& family, double temperature) {
  const CovarianceMatrix reference = family(temperature);
  const auto infidelity = [&](double delta) { return infidelity_gaussian(reference, family(temperature + delta)); };
  return {qfi_from_infidelity(infidelity, temperature), temperature, "gaussian"};
}

/// Damping rate of the mode. net_damping is G (1 - e^{-x}) = gamma gap^3, the
/// rate at which the bosonic master equation relaxes the second moments;
/// downward uses G itself.
enum class OscillatorRate { net_damping, downward };

/// full differentiates through the temperature dependence of the rate;
/// frozen keeps the rate at its working-point value.
enum class RateTemperature { full, frozen };

double oscillator_rate(const DissipationModel& m, OscillatorRate rate = OscillatorRate::net_damping);

/// e^{-k t} sigma0 + (1 - e^{-k t}) sigma_T. Throws NegativeTime for t < 0.
CovarianceMatrix evolve_covariance(const CovarianceMatrix& sigma0, const DissipationModel& m, double t,
                                   OscillatorRate rate = OscillatorRate::net_damping);

QfiValue qfi_harmonic_transient(const CovarianceMatrix& sigma0, const DissipationModel& m, double dt,
                                RateTemperature treatment = RateTemperature::full,
                                OscillatorRate rate = OscillatorRate::net_damping);

std::vector<double> qfi_harmonic_transient_curve(const CovarianceMatrix& sigma0, const DissipationModel& m,
                                                 std::span<const double> dt_grid,
                                                 RateTemperature treatment = RateTemperature::full,
                                                 OscillatorRate rate = OscillatorRate::net_damping);

}  // namespace thermoprobe
