#pragma once

// Fidelity and Fisher-information primitives shared by the equilibrium,
// dynamics and Gaussian modules.

#include <Eigen/Dense>

#include <string>

#include "thermoprobe/numerics.hpp"

namespace thermoprobe {

struct QfiValue {
  double value = 0.0;        // units of 1/temperature^2
  double temperature = 0.0;
  std::string probe;
};

/// Uhlmann fidelity of two commuting states with spectra p, q (same basis):
/// (sum_n sqrt(p_n q_n))^2.
double bhattacharyya_fidelity(const Eigen::Ref<const Eigen::VectorXd>& p, const Eigen::Ref<const Eigen::VectorXd>& q);

/// 1 - fidelity, computed from sum (sqrt p - sqrt q)^2 so it keeps full
/// relative precision for nearby distributions.
double bhattacharyya_infidelity(const Eigen::Ref<const Eigen::VectorXd>& p, const Eigen::Ref<const Eigen::VectorXd>& q);

/// sum_n (dp_n)^2 / p_n. Levels with p_n == 0 and dp_n == 0 contribute nothing.
double classical_fisher_information(const Eigen::Ref<const Eigen::VectorXd>& p,
                                    const Eigen::Ref<const Eigen::VectorXd>& dp);

/// QFI of a qubit family from its Bloch vector r and derivative dr:
/// |dr|^2 + (r.dr)^2 / (1 - |r|^2). Throws SingularState when |r| is within
/// 1e-12 of the sphere and r.dr does not vanish.
double qubit_qfi(const Eigen::Vector3d& r, const Eigen::Vector3d& dr);

inline constexpr double kQfiRelativeStep = 1e-4;

/// F = -2 d^2 fid(T, T + delta)/d delta^2 at delta = 0, evaluated as
/// +2 d^2 (1 - fid)/d delta^2 with step h = 1e-4 T and one Richardson level.
/// `infidelity(delta)` must return 1 - fid(rho_T, rho_{T+delta}).
template <class Infidelity>
double qfi_from_infidelity(Infidelity&& infidelity, double temperature) {
  return 2.0 * central_diff(infidelity, 0.0, kQfiRelativeStep * temperature, Derivative::second);
}

}  // namespace thermoprobe
