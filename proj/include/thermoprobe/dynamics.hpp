#pragma once

// Partly thermalized probes: Markovian relaxation of qubit and degenerate
// N-level probes in contact with a bosonic sample with flat spectral density,
// the transient thermal QFI of the evolved probe, and the F/dt figure of merit
// for sequential prepare-couple-measure protocols.

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "thermoprobe/information.hpp"
#include "thermoprobe/spectra.hpp"

namespace thermoprobe {

/// Relaxation of a probe with gap `gap` coupled (strength gamma, J(w) = gamma)
/// to a sample at temperature T. Downward rate G = gamma gap^3 / (1 - e^{-x}),
/// upward rate G e^{-x}, x = gap / T.
class DissipationModel {
 public:
  DissipationModel(double gap, double temperature, double coupling);

  double gap() const noexcept { return gap_; }
  double temperature() const noexcept { return temperature_; }
  double coupling() const noexcept { return coupling_; }
  double x() const noexcept { return gap_ / temperature_; }

  double decay_rate() const;       // G_{gap,T}
  double excitation_rate() const;  // e^{-x} G_{gap,T}
  /// Qubit population relaxation time: 1/tau = G (1 + e^{-x}) = gamma gap^3 coth(x/2).
  double relaxation_time() const;
  /// Net damping of a harmonic mode: G (1 - e^{-x}) = gamma gap^3.
  double oscillator_damping() const;

  /// Same gap and coupling, different sample temperature.
  DissipationModel at_temperature(double temperature) const { return {gap_, temperature, coupling_}; }

 private:
  double gap_;
  double temperature_;
  double coupling_;
};

/// Two-level probe state as a Bloch vector, r_z = p_excited - p_ground.
class QubitState {
 public:
  explicit QubitState(const Eigen::Vector3d& bloch);

  static QubitState ground() { return QubitState({0.0, 0.0, -1.0}); }
  static QubitState excited() { return QubitState({0.0, 0.0, 1.0}); }
  /// (|g> + |e>)/sqrt 2.
  static QubitState plus() { return QubitState({1.0, 0.0, 0.0}); }
  static QubitState thermal(double gap, double temperature);

  const Eigen::Vector3d& bloch() const noexcept { return bloch_; }
  double excited_population() const { return 0.5 * (1.0 + bloch_.z()); }
  double ground_population() const { return 0.5 * (1.0 - bloch_.z()); }

 private:
  Eigen::Vector3d bloch_;
};

/// Populations of a probe diagonal in its energy basis; index 0 is the
/// (non-degenerate) ground level.
class DiagonalState {
 public:
  explicit DiagonalState(const Eigen::Ref<const Eigen::VectorXd>& populations);

  static DiagonalState ground(int n);
  /// Gibbs state of one ground level plus n - 1 degenerate levels at `gap`.
  static DiagonalState thermal(int n, double gap, double temperature);

  const Eigen::VectorXd& populations() const noexcept { return populations_; }
  Eigen::Index size() const noexcept { return populations_.size(); }
  double excited_population() const { return populations_.tail(size() - 1).sum(); }

 private:
  Eigen::VectorXd populations_;
};

/// dr/dt = drift r + offset in the interaction picture.
struct BlochGenerator {
  Eigen::Matrix3d drift;
  Eigen::Vector3d offset;

  Eigen::Vector3d operator()(const Eigen::Vector3d& r) const { return drift * r + offset; }
};

BlochGenerator qubit_generator(const DissipationModel& m);

/// dp/dt = W p for one ground level exchanging population with n - 1
/// degenerate excited levels.
Eigen::MatrixXd rate_matrix(int n, const DissipationModel& m);

/// Largest relaxation rate of the n-level rate matrix (n = 2 gives 1/tau).
double fastest_rate(int n, const DissipationModel& m);

/// Default RK4 step: relaxation time / 200.
inline constexpr double kStepsPerRelaxationTime = 200.0;

/// Schrodinger-picture state after time t; RK4 step min(max_step, tau/200).
/// Throws NegativeTime for t < 0.
QubitState evolve_qubit(const QubitState& prep, const DissipationModel& m, double t,
                        double max_step = std::numeric_limits<double>::infinity());

/// States at each of the ascending `times`, integrating with steps no longer
/// than `step` on every segment. The step partition depends only on `times`
/// and `step`, so trajectories for neighbouring temperatures are comparable.
std::vector<QubitState> evolve_qubit(const QubitState& prep, const DissipationModel& m, std::span<const double> times,
                                     double step);

DiagonalState evolve_nlevel(const DiagonalState& prep, const EffectiveTwoLevelSpectrum& spectrum,
                            const DissipationModel& m, double t,
                            double max_step = std::numeric_limits<double>::infinity());

std::vector<DiagonalState> evolve_nlevel(const DiagonalState& prep, const DissipationModel& m,
                                         std::span<const double> times, double step);

struct Preparation {
  enum class Kind { ground, thermal, plus };

  Kind kind = Kind::ground;
  double temperature = 0.0;  // thermal only

  static Preparation ground() { return {Kind::ground, 0.0}; }
  static Preparation thermal(double t) { return {Kind::thermal, t}; }
  static Preparation plus() { return {Kind::plus, 0.0}; }

  std::string label() const;
};

/// Sequential protocol: total time t_s split into nu = t_s / dt interrogations.
struct ProtocolConfig {
  double total_time = 1.0;
  double interrogation_time = 1.0;
  Preparation preparation;

  ProtocolConfig(double total, double dt, Preparation prep);
  double interrogations() const { return total_time / interrogation_time; }
};

/// Cramer-Rao bound on the temperature uncertainty after nu repetitions.
double temperature_uncertainty_bound(double qfi, double interrogations);

/// Thermal QFI of the probe after contact time dt, differentiating at fixed
/// preparation and coupling (the rates' temperature dependence included).
/// Diagonal preparations use the classical Fisher information of the
/// populations; |+> (n = 2 only) uses the Bloch-vector QFI.
QfiValue qfi_transient(const Preparation& prep, int n, const DissipationModel& m, double dt);

/// qfi_transient on an ascending grid of contact times, sharing trajectories.
std::vector<double> qfi_transient_curve(const Preparation& prep, int n, const DissipationModel& m,
                                        std::span<const double> dt_grid);

/// Qubit ground-state preparation, exact solution of the rate equations:
/// x^2 (e^x (e^s - 1) + (1 + e^x) s csch x)^2 / ((1+e^x)^2 (e^s - 1)(1 + e^x e^s) T^2)
/// with s = dt / tau, evaluated in an overflow-free rearrangement.
double qfi_transient_closed_form_qubit(double x, double dt, double tau, double temperature);

/// lim_{dt -> 0} F_N(dt)/dt = gamma T (N-1) x^5 e^{2x} / (e^x - 1)^3 for ground preparations.
double ultimate_rate(int n, double x, double coupling, double temperature);

/// Root of e^x (5 - x) = 5 + 2x in (0, 5): the x maximizing ultimate_rate for every N.
double optimal_short_time_ratio();

struct ProtocolOptimum {
  double best_dt = 0.0;
  double best_rate = 0.0;  // F/dt at best_dt
  /// Grid maximum sits at the smallest dt and the rate keeps growing as dt -> 0.
  bool supremum_at_zero = false;
  /// Analytic dt -> 0 limit (ground preparations), NaN otherwise.
  double zero_limit_rate = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> grid_rates;
};

/// Maximizes F(dt)/dt: grid argmax, then golden-section refinement in log dt
/// between the neighbouring grid points when the maximum is interior.
ProtocolOptimum optimize_protocol(const DissipationModel& m, const Preparation& prep, int n,
                                  std::span<const double> dt_grid);

struct TransientSeriesSpec {
  Preparation preparation;
  int n = 2;
};

struct TransientSeries {
  std::string prep;
  int n = 2;
  std::vector<double> dt;
  std::vector<double> fisher_rate;  // F(dt)/dt
};

/// F/dt for every (preparation, n) on a common grid; series are evaluated
/// concurrently on up to `threads` threads, output order follows `specs`.
std::vector<TransientSeries> transient_scan(const std::vector<TransientSeriesSpec>& specs, const DissipationModel& m,
                                            std::span<const double> dt_grid, unsigned threads = 1);

}  // namespace thermoprobe
