#include "thermoprobe/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "thermoprobe/error.hpp"
#include "thermoprobe/gaussian.hpp"

namespace thermoprobe {

QfiValue qfi_thermal(const ThermalEnsemble& e) {
  const double t = e.temperature();
  return {energy_variance(e) / (t * t * t * t), t, "gibbs"};
}

double qfi_effective_two_level(const EffectiveTwoLevelSpectrum& s, double temperature) {
  const double t2 = temperature * temperature;
  return energy_variance(s, temperature) / (t2 * t2);
}

double qfi_degenerate_excited(int n, double x, double gap) {
  if (n < 2) throw Error(Errc::dimension_too_small, "qfi_degenerate_excited: need n >= 2");
  if (!(x > 0.0) || !(gap > 0.0)) throw Error(Errc::invalid_argument, "qfi_degenerate_excited: x and gap must be positive");
  const double m = n - 1;
  const double boltz = std::exp(-x);
  const double denom = m * boltz + 1.0;
  return x * x * x * x * m * boltz / (gap * gap * denom * denom);
}

QfiValue qfi_bures_oracle(const Spectrum& s, double temperature) {
  require_positive_temperature(temperature, "qfi_bures_oracle");
  const Eigen::VectorXd p = gibbs_populations(s.energies(), temperature);
  auto infidelity = [&](double delta) {
    return bhattacharyya_infidelity(p, gibbs_populations(s.energies(), temperature + delta));
  };
  return {qfi_from_infidelity(infidelity, temperature), temperature, "gibbs (fidelity curvature)"};
}

Eigen::VectorXd variance_gradient(const Spectrum& s, double temperature) {
  const ThermalEnsemble e = thermalize(s.shifted(-s.ground()), temperature);
  const Eigen::VectorXd& eps = e.spectrum().energies();
  const Eigen::VectorXd& p = e.populations();
  const double h1 = mean_energy(e);
  const double h2 = energy_second_moment(e);
  const double t = temperature;
  Eigen::VectorXd grad(eps.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i) {
    grad[i] = p[i] / t * (h2 - 2.0 * h1 * h1 + eps[i] * (2.0 * t - eps[i]) + 2.0 * h1 * (eps[i] - t));
  }
  return grad;
}

std::vector<double> stationarity_residual(const Spectrum& s, double temperature) {
  const ThermalEnsemble e = thermalize(s, temperature);
  const double level = 2.0 * (mean_energy(e) + temperature);
  const Eigen::VectorXd& eps = s.energies();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(eps.size() * (eps.size() - 1) / 2));
  for (Eigen::Index i = 0; i < eps.size(); ++i) {
    for (Eigen::Index j = i + 1; j < eps.size(); ++j) {
      out.push_back((eps[i] - eps[j]) * (eps[i] + eps[j] - level));
    }
  }
  return out;
}

SymmetricMatrix variance_hessian(const Spectrum& s, double temperature) {
  // The variance is shift invariant, so evaluate with the ground level at 0.
  const ThermalEnsemble e = thermalize(s.shifted(-s.ground()), temperature);
  const Eigen::VectorXd& eps = e.spectrum().energies();
  const Eigen::VectorXd& p = e.populations();
  const double h1 = mean_energy(e);
  const double h2 = energy_second_moment(e);
  const double t = temperature;
  const double t2 = t * t;

  SymmetricMatrix hess(eps.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i) {
    const double ei = eps[i];
    const double quadratic = 2.0 * (h2 - 3.0 * h1 * h1 - 4.0 * t * h1 - t2) + 8.0 * (t + h1) * ei - 4.0 * ei * ei;
    const double linear = 2.0 * t2 + 2.0 * h1 * (2.0 * t + h1) - h2 - 2.0 * (2.0 * t + h1) * ei + ei * ei;
    hess(i, i) = p[i] * p[i] / t2 * quadratic + p[i] / t2 * linear;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double sum = ei + eps[j];
      hess(i, j) = p[i] * p[j] / t2 *
                   (4.0 * h1 * (sum - 2.0 * t) + sum * (4.0 * t - sum) + 2.0 * h2 - 6.0 * h1 * h1 - 2.0 * t2);
    }
  }
  return hess;
}

double optimal_gap_equation(double x, int n, int n0) {
  const double ratio = static_cast<double>(n - n0) / n0;
  return std::exp(x) - ratio * (x + 2.0) / (x - 2.0);
}

OptimalGapResult optimal_gap(int n, int n0, double temperature) {
  require_positive_temperature(temperature, "optimal_gap");
  if (n < 2) throw Error(Errc::dimension_too_small, "optimal_gap: need n >= 2");
  if (n0 < 1 || n0 > n - 1) {
    throw Error(Errc::invalid_argument,
                "optimal_gap: n0 = " + std::to_string(n0) + " outside [1, " + std::to_string(n - 1) + "]");
  }
  const double ratio = static_cast<double>(n - n0) / n0;
  // The right-hand side falls from +inf at x = 2 while e^x grows: one crossing.
  const double lo = 2.0 + 1e-9;
  const double hi = 2.0 + std::max(0.0, std::log(4.0 * ratio)) + 10.0;
  const double tol = 1e-12 * (1.0 + ratio);
  // Bracket on (x - 2)(e^x - r(x+2)/(x-2)): same root, but without the pole
  // that makes the slope explode when r is small and x* crowds 2.
  const BracketedRoot root =
      find_root([&](double x) { return (x - 2.0) * std::exp(x) - ratio * (x + 2.0); }, lo, hi, tol);

  OptimalGapResult out;
  out.x_star = root.root;
  out.gap = temperature * root.root;
  out.n = n;
  out.n0 = n0;
  out.temperature = temperature;
  const EffectiveTwoLevelSpectrum probe(out.gap, n, n0);
  out.variance_at_optimum = energy_variance(probe, temperature);
  out.qfi_at_optimum = qfi_effective_two_level(probe, temperature);
  out.residual = optimal_gap_equation(root.root, n, n0);
  return out;
}

HessianBlocks hessian_blocks_closed_form(int n, double x_star) {
  const double m = n - 1;
  const double xm = x_star - 2.0;
  const double xx = x_star * x_star - 4.0;
  HessianBlocks out;
  out.a = -xx / 8.0;
  out.b = -xm * (4.0 * n - 6.0 + x_star) / (8.0 * m * m);
  out.c = xx / (8.0 * m);
  out.d = -xm * xm / (8.0 * m * m);
  return out;
}

Eigen::VectorXd HessianCertificate::analytic_eigenvalues() const {
  Eigen::VectorXd out(n);
  out.head(n - 2).setConstant(lambda_excited);
  out[n - 2] = lambda_shift;
  out[n - 1] = 0.0;
  std::sort(out.data(), out.data() + out.size());
  return out;
}

Eigen::VectorXd HessianCertificate::pinned_block_eigenvalues() const {
  Eigen::VectorXd out(n - 1);
  out.head(n - 2).setConstant(lambda_excited);
  out[n - 2] = lambda_pinned;
  std::sort(out.data(), out.data() + out.size());
  return out;
}

int HessianCertificate::zero_modes(double tolerance) const {
  const double scale = std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
  return static_cast<int>((eigenvalues.array().abs() <= tolerance * scale).count());
}

bool HessianCertificate::negative_semidefinite(double tolerance) const {
  const double scale = std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
  return eigenvalues.maxCoeff() <= tolerance * scale;
}

HessianCertificate hessian_certificate(int n, double temperature) {
  if (n < 2) throw Error(Errc::dimension_too_small, "hessian_certificate: need n >= 2");
  const OptimalGapResult opt = optimal_gap(n, 1, temperature);

  HessianCertificate cert;
  cert.n = n;
  cert.x_star = opt.x_star;
  cert.temperature = temperature;
  cert.hessian = variance_hessian(EffectiveTwoLevelSpectrum(opt.gap, n, 1).expand(), temperature);
  cert.blocks.a = cert.hessian(0, 0);
  cert.blocks.b = cert.hessian(1, 1);
  cert.blocks.c = cert.hessian(0, 1);
  cert.blocks.d = n >= 3 ? cert.hessian(1, 2) : std::numeric_limits<double>::quiet_NaN();
  cert.blocks_closed_form = hessian_blocks_closed_form(n, opt.x_star);

  const SymmetricEigensystem eig = eigensystem_symmetric(cert.hessian);
  cert.eigenvalues = eig.values;
  cert.eigenvectors = eig.vectors;

  const double m = n - 1;
  const double xx = opt.x_star * opt.x_star - 4.0;
  cert.lambda_excited = -(opt.x_star - 2.0) / (2.0 * m);
  cert.lambda_shift = -n * xx / (8.0 * m);
  cert.lambda_pinned = -xx / (8.0 * m);
  return cert;
}

std::vector<EquilibriumSeries> qfi_equilibrium_scan(const std::vector<int>& n_list, const std::vector<double>& x_grid,
                                                    double gap, bool include_harmonic) {
  if (!(gap > 0.0)) throw Error(Errc::invalid_argument, "qfi_equilibrium_scan: gap must be positive");
  for (double x : x_grid) {
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(Errc::invalid_argument, "qfi_equilibrium_scan: x grid must be positive");
  }
  std::vector<double> xs = x_grid;
  std::sort(xs.begin(), xs.end(), std::greater<>());  // ascending temperature

  auto make_series = [&](std::string label, int n, auto&& qfi_at) {
    EquilibriumSeries s;
    s.label = std::move(label);
    s.n = n;
    for (double x : xs) {
      s.temperature.push_back(gap / x);
      s.qfi.push_back(qfi_at(x));
    }
    const double peak = s.qfi.empty() ? 1.0 : *std::max_element(s.qfi.begin(), s.qfi.end());
    for (double q : s.qfi) s.qfi_normalized.push_back(peak > 0.0 ? q / peak : 0.0);
    return s;
  };

  std::vector<EquilibriumSeries> out;
  for (int n : n_list) {
    if (n < 2) throw Error(Errc::dimension_too_small, "qfi_equilibrium_scan: need n >= 2");
    out.push_back(make_series(std::to_string(n), n, [&](double x) { return qfi_degenerate_excited(n, x, gap); }));
  }
  if (include_harmonic) {
    out.push_back(make_series("ho", 0, [&](double x) { return qfi_harmonic_equilibrium(gap, gap / x).value; }));
  }
  return out;
}

double full_width_half_maximum(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3) throw Error(Errc::invalid_argument, "full_width_half_maximum: bad input");
  const auto peak_it = std::max_element(ys.begin(), ys.end());
  const auto peak = static_cast<std::size_t>(peak_it - ys.begin());
  const double half = 0.5 * *peak_it;

  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double t = (half - ys[inside]) / (ys[outside] - ys[inside]);
    return xs[inside] + t * (xs[outside] - xs[inside]);
  };

  std::size_t left = peak;
  while (left > 0 && ys[left - 1] >= half) --left;
  std::size_t right = peak;
  while (right + 1 < ys.size() && ys[right + 1] >= half) ++right;
  if (left == 0 || right + 1 == ys.size()) {
    throw Error(Errc::invalid_argument, "full_width_half_maximum: half maximum not bracketed by the grid");
  }
  return crossing(right, right + 1) - crossing(left, left - 1);
}

}  // namespace thermoprobe
