#pragma once

// Thermal sensitivity of fully thermalized probes: the QFI of Gibbs states,
// the optimal effective two-level gap, and the second-order certificate that
// this gap maximizes the energy variance.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "thermoprobe/information.hpp"
#include "thermoprobe/numerics.hpp"
#include "thermoprobe/spectra.hpp"

namespace thermoprobe {

/// F = Var(H) / T^4 for a Gibbs state.
QfiValue qfi_thermal(const ThermalEnsemble& e);

/// Gibbs QFI of an effective two-level probe (any ground degeneracy), from
/// the closed-form variance.
double qfi_effective_two_level(const EffectiveTwoLevelSpectrum& s, double temperature);

/// QFI of the non-degenerate-ground family as a function of x = gap / T at
/// fixed gap: x^4 e^x (N-1) / (gap^2 (N-1+e^x)^2).
double qfi_degenerate_excited(int n, double x, double gap);

/// Fidelity-curvature QFI of the Gibbs family {rho_T} of `s`, independent of
/// the variance formula.
QfiValue qfi_bures_oracle(const Spectrum& s, double temperature);

/// d Var(H) / d eps_i for every level.
Eigen::VectorXd variance_gradient(const Spectrum& s, double temperature);

/// (eps_i - eps_j)[eps_i + eps_j - 2(<H> + T)] for all pairs i < j in
/// row-major pair order. Vanishes at stationary spectra.
std::vector<double> stationarity_residual(const Spectrum& s, double temperature);

/// Exact second derivatives d^2 Var(H) / d eps_i d eps_j.
SymmetricMatrix variance_hessian(const Spectrum& s, double temperature);

/// e^x - ((n - n0) / n0) (x + 2) / (x - 2); its root above 2 is x*.
double optimal_gap_equation(double x, int n, int n0);

struct OptimalGapResult {
  double x_star = 0.0;
  double gap = 0.0;  // T * x_star
  int n = 0;
  int n0 = 0;
  double temperature = 0.0;
  double variance_at_optimum = 0.0;
  double qfi_at_optimum = 0.0;
  double residual = 0.0;  // optimal_gap_equation at x_star
};

OptimalGapResult optimal_gap(int n, int n0, double temperature);

/// Hessian entries of an effective two-level optimum (n0 = 1) in the
/// block layout [[a, c...], [c, b, d...], ...], closed form in x*.
struct HessianBlocks {
  double a = 0.0;  // ground-ground
  double b = 0.0;  // excited diagonal
  double c = 0.0;  // ground-excited
  double d = 0.0;  // excited-excited, distinct levels
};

HessianBlocks hessian_blocks_closed_form(int n, double x_star);

struct HessianCertificate {
  int n = 0;
  double x_star = 0.0;
  double temperature = 0.0;
  SymmetricMatrix hessian{1};
  HessianBlocks blocks;            // read off the assembled matrix
  HessianBlocks blocks_closed_form;
  Eigen::VectorXd eigenvalues;     // Jacobi, ascending
  Eigen::MatrixXd eigenvectors;

  // Closed-form spectrum of the full Hessian.
  double lambda_excited = 0.0;  // -(x*-2)/(2(N-1)), multiplicity N-2
  double lambda_shift = 0.0;    // -N(x*^2-4)/(8(N-1)), nondegenerate
  // Nondegenerate eigenvalue of the (N-1)x(N-1) block with the ground level
  // held fixed: -(x*^2-4)/(8(N-1)).
  double lambda_pinned = 0.0;

  /// {lambda_excited x (N-2), lambda_shift, 0}, ascending.
  Eigen::VectorXd analytic_eigenvalues() const;
  /// Eigenvalues of the ground-pinned block: {lambda_excited x (N-2), lambda_pinned}, ascending.
  Eigen::VectorXd pinned_block_eigenvalues() const;

  int zero_modes(double tolerance = 1e-8) const;
  bool negative_semidefinite(double tolerance = 1e-8) const;
};

/// Assembles the variance Hessian at the n0 = 1 optimum and diagonalizes it.
/// Throws DimensionTooSmall for n < 2.
HessianCertificate hessian_certificate(int n, double temperature);

struct EquilibriumSeries {
  std::string label;  // "2", "4", ... or "ho"
  int n = 0;          // 0 for the harmonic oscillator
  std::vector<double> temperature;
  std::vector<double> qfi;
  std::vector<double> qfi_normalized;  // qfi / max over the scan
};

/// Optimal N-level QFI (and the harmonic QFI) along T = gap / x for each x
/// in the grid. Rows are ordered by increasing T. Includes the harmonic
/// series last when `include_harmonic` is set.
std::vector<EquilibriumSeries> qfi_equilibrium_scan(const std::vector<int>& n_list, const std::vector<double>& x_grid,
                                                    double gap, bool include_harmonic = true);

/// Width of the region where ys >= max(ys)/2, with linear interpolation of
/// the two crossings. xs must be ascending.
double full_width_half_maximum(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace thermoprobe
