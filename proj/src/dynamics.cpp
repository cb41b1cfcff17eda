#include "thermoprobe/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <charconv>
#include <cmath>
#include <thread>

#include "thermoprobe/error.hpp"
#include "thermoprobe/numerics.hpp"

namespace thermoprobe {

namespace {

void require_finite_positive(double v, const char* what) {
  if (!(std::isfinite(v) && v > 0.0)) {
    throw Error(Errc::invalid_argument, std::string(what) + " must be positive and finite");
  }
}

void require_time(double t, const char* where) {
  if (!std::isfinite(t)) throw Error(Errc::invalid_argument, std::string(where) + ": time must be finite");
  if (t < 0.0) throw Error(Errc::negative_time, std::string(where) + ": time must be >= 0");
}

void require_times(std::span<const double> times, const char* where) {
  double previous = 0.0;
  for (double t : times) {
    require_time(t, where);
    if (t < previous) throw Error(Errc::invalid_argument, std::string(where) + ": times must be ascending");
    previous = t;
  }
}

Eigen::Vector3d rotate_z(const Eigen::Vector3d& r, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * r.x() - s * r.y(), s * r.x() + c * r.y(), r.z()};
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Integrates y' = rhs(y) through the ascending `times`, calling record(k, y)
// at each one. Each segment uses ceil(length / step) equal steps.
template <class State, class Rhs, class Record>
void integrate_through(Rhs&& rhs, State y, std::span<const double> times, double step, Record&& record) {
  double t = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double segment = times[k] - t;
    y = integrate_ode_steps(rhs, std::move(y), segment, rk4_step_count(segment, step));
    t = times[k];
    record(k, y);
  }
}

void check_n(int n, const char* where) {
  if (n < 2) throw Error(Errc::dimension_too_small, std::string(where) + ": need N >= 2");
}

}  // namespace

DissipationModel::DissipationModel(double gap, double temperature, double coupling)
    : gap_(gap), temperature_(temperature), coupling_(coupling) {
  require_finite_positive(gap, "gap");
  require_positive_temperature(temperature, "DissipationModel");
  require_finite_positive(coupling, "coupling");
}

double DissipationModel::decay_rate() const { return coupling_ * gap_ * gap_ * gap_ / -std::expm1(-x()); }

double DissipationModel::excitation_rate() const { return coupling_ * gap_ * gap_ * gap_ / std::expm1(x()); }

double DissipationModel::relaxation_time() const {
  return std::tanh(0.5 * x()) / (coupling_ * gap_ * gap_ * gap_);
}

double DissipationModel::oscillator_damping() const { return coupling_ * gap_ * gap_ * gap_; }

QubitState::QubitState(const Eigen::Vector3d& bloch) : bloch_(bloch) {
  if (!bloch.allFinite()) throw Error(Errc::non_finite_state, "QubitState: non-finite Bloch vector");
  if (bloch.norm() > 1.0 + 1e-12) throw Error(Errc::invalid_argument, "QubitState: |r| > 1");
}

QubitState QubitState::thermal(double gap, double temperature) {
  require_positive_temperature(temperature, "QubitState::thermal");
  return QubitState({0.0, 0.0, -std::tanh(0.5 * gap / temperature)});
}

DiagonalState::DiagonalState(const Eigen::Ref<const Eigen::VectorXd>& populations) : populations_(populations) {
  if (populations_.size() < 2) throw Error(Errc::dimension_too_small, "DiagonalState: need N >= 2");
  if (!populations_.allFinite()) throw Error(Errc::non_finite_state, "DiagonalState: non-finite population");
  if (populations_.minCoeff() < -1e-12) throw Error(Errc::invalid_argument, "DiagonalState: negative population");
  if (std::abs(populations_.sum() - 1.0) > 1e-10) {
    throw Error(Errc::invalid_argument, "DiagonalState: populations must sum to 1");
  }
}

DiagonalState DiagonalState::ground(int n) {
  check_n(n, "DiagonalState::ground");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  p[0] = 1.0;
  return DiagonalState(p);
}

DiagonalState DiagonalState::thermal(int n, double gap, double temperature) {
  check_n(n, "DiagonalState::thermal");
  const EffectiveTwoLevelSpectrum s(gap, n, 1);
  return DiagonalState(thermalize(s.expand(), temperature).populations());
}

BlochGenerator qubit_generator(const DissipationModel& m) {
  const double down = m.decay_rate();
  const double up = m.excitation_rate();
  const double k = down + up;
  BlochGenerator g;
  g.drift = Eigen::Vector3d(-0.5 * k, -0.5 * k, -k).asDiagonal();
  g.offset = Eigen::Vector3d(0.0, 0.0, up - down);
  return g;
}

Eigen::MatrixXd rate_matrix(int n, const DissipationModel& m) {
  check_n(n, "rate_matrix");
  const double down = m.decay_rate();
  const double up = m.excitation_rate();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  w(0, 0) = -(n - 1) * up;
  for (int i = 1; i < n; ++i) {
    w(0, i) = down;
    w(i, 0) = up;
    w(i, i) = -down;
  }
  return w;
}

double fastest_rate(int n, const DissipationModel& m) {
  check_n(n, "fastest_rate");
  return m.decay_rate() + (n - 1) * m.excitation_rate();
}

std::vector<QubitState> evolve_qubit(const QubitState& prep, const DissipationModel& m, std::span<const double> times,
                                     double step) {
  require_times(times, "evolve_qubit");
  const BlochGenerator g = qubit_generator(m);
  std::vector<QubitState> out;
  out.reserve(times.size());
  integrate_through(g, Eigen::Vector3d(prep.bloch()), times, step, [&](std::size_t k, const Eigen::Vector3d& r) {
    out.emplace_back(rotate_z(r, m.gap() * times[k]));
  });
  return out;
}

QubitState evolve_qubit(const QubitState& prep, const DissipationModel& m, double t, double max_step) {
  require_time(t, "evolve_qubit");
  const double step = std::min(max_step, m.relaxation_time() / kStepsPerRelaxationTime);
  const double times[] = {t};
  return evolve_qubit(prep, m, times, step).front();
}

std::vector<DiagonalState> evolve_nlevel(const DiagonalState& prep, const DissipationModel& m,
                                         std::span<const double> times, double step) {
  require_times(times, "evolve_nlevel");
  const Eigen::MatrixXd w = rate_matrix(static_cast<int>(prep.size()), m);
  const auto rhs = [&w](const Eigen::VectorXd& p) -> Eigen::VectorXd { return w * p; };
  std::vector<DiagonalState> out;
  out.reserve(times.size());
  integrate_through(rhs, Eigen::VectorXd(prep.populations()), times, step,
                    [&](std::size_t, const Eigen::VectorXd& p) { out.emplace_back(p); });
  return out;
}

DiagonalState evolve_nlevel(const DiagonalState& prep, const EffectiveTwoLevelSpectrum& spectrum,
                            const DissipationModel& m, double t, double max_step) {
  require_time(t, "evolve_nlevel");
  if (spectrum.n0() != 1 || spectrum.n() != prep.size()) {
    throw Error(Errc::invalid_argument, "evolve_nlevel: need a non-degenerate ground level and matching dimension");
  }
  if (std::abs(spectrum.gap() - m.gap()) > 1e-12 * m.gap()) {
    throw Error(Errc::invalid_argument, "evolve_nlevel: spectrum gap differs from the model gap");
  }
  const int n = spectrum.n();
  const double step = std::min(max_step, 1.0 / (fastest_rate(n, m) * kStepsPerRelaxationTime));
  const double times[] = {t};
  return evolve_nlevel(prep, m, times, step).front();
}

std::string Preparation::label() const {
  switch (kind) {
    case Kind::ground:
      return "ground";
    case Kind::plus:
      return "plus";
    case Kind::thermal:
      return "thermal_" + shortest(temperature);
  }
  return "unknown";
}

ProtocolConfig::ProtocolConfig(double total, double dt, Preparation prep)
    : total_time(total), interrogation_time(dt), preparation(prep) {
  require_finite_positive(total, "total time");
  require_finite_positive(dt, "interrogation time");
  if (dt > total) throw Error(Errc::invalid_argument, "ProtocolConfig: interrogation time exceeds total time");
}

double temperature_uncertainty_bound(double qfi, double interrogations) {
  if (!(qfi > 0.0) || !(interrogations > 0.0)) {
    throw Error(Errc::invalid_argument, "temperature_uncertainty_bound: need positive QFI and repetitions");
  }
  return 1.0 / std::sqrt(interrogations * qfi);
}

std::vector<double> qfi_transient_curve(const Preparation& prep, int n, const DissipationModel& m,
                                        std::span<const double> dt_grid) {
  check_n(n, "qfi_transient");
  require_times(dt_grid, "qfi_transient");
  const double temperature = m.temperature();
  const std::size_t k = dt_grid.size();
  // One step partition for all four temperatures of the difference stencil.
  const double step = 1.0 / (fastest_rate(n, m) * kStepsPerRelaxationTime);
  std::vector<double> fisher(k);

  if (prep.kind == Preparation::Kind::plus) {
    if (n != 2) throw Error(Errc::invalid_argument, "qfi_transient: |+> preparation needs N = 2");
    const QubitState start = QubitState::plus();
    const auto trajectory = [&](double t) {
      const auto states = evolve_qubit(start, m.at_temperature(t), dt_grid, step);
      Eigen::VectorXd flat(3 * k);
      for (std::size_t i = 0; i < k; ++i) flat.segment<3>(3 * i) = states[i].bloch();
      return flat;
    };
    const Eigen::VectorXd r = trajectory(temperature);
    const Eigen::VectorXd dr = central_diff(trajectory, temperature, kQfiRelativeStep * temperature);
    for (std::size_t i = 0; i < k; ++i) {
      fisher[i] = qubit_qfi(r.segment<3>(3 * i), dr.segment<3>(3 * i));
    }
    return fisher;
  }

  const DiagonalState start = prep.kind == Preparation::Kind::ground
                                  ? DiagonalState::ground(n)
                                  : DiagonalState::thermal(n, m.gap(), prep.temperature);
  const auto trajectory = [&](double t) {
    const auto states = evolve_nlevel(start, m.at_temperature(t), dt_grid, step);
    Eigen::VectorXd flat(n * k);
    for (std::size_t i = 0; i < k; ++i) flat.segment(n * i, n) = states[i].populations();
    return flat;
  };
  const Eigen::VectorXd p = trajectory(temperature);
  const Eigen::VectorXd dp = central_diff(trajectory, temperature, kQfiRelativeStep * temperature);
  for (std::size_t i = 0; i < k; ++i) {
    fisher[i] = classical_fisher_information(p.segment(n * i, n), dp.segment(n * i, n));
  }
  return fisher;
}

QfiValue qfi_transient(const Preparation& prep, int n, const DissipationModel& m, double dt) {
  const double grid[] = {dt};
  return {qfi_transient_curve(prep, n, m, grid).front(), m.temperature(), prep.label()};
}

double qfi_transient_closed_form_qubit(double x, double dt, double tau, double temperature) {
  require_positive_temperature(temperature, "qfi_transient_closed_form_qubit");
  require_finite_positive(x, "x");
  require_finite_positive(tau, "tau");
  require_time(dt, "qfi_transient_closed_form_qubit");
  if (dt == 0.0) return 0.0;
  // Divide numerator and denominator by e^{2x} e^{2s}; u = 1 - e^{-s}.
  const double s = dt / tau;
  const double u = -std::expm1(-s);
  const double ex = std::exp(-x);
  const double c = 2.0 / std::expm1(x);
  const double bracket = u + c * s * std::exp(-s);
  return x * x * ex * bracket * bracket /
         ((1.0 + ex) * (1.0 + ex) * u * (1.0 + ex * std::exp(-s)) * temperature * temperature);
}

double ultimate_rate(int n, double x, double coupling, double temperature) {
  check_n(n, "ultimate_rate");
  require_finite_positive(x, "x");
  require_positive_temperature(temperature, "ultimate_rate");
  const double one_minus = -std::expm1(-x);
  return coupling * temperature * (n - 1) * std::pow(x, 5) * std::exp(-x) / (one_minus * one_minus * one_minus);
}

double optimal_short_time_ratio() {
  const auto f = [](double x) { return std::exp(x) * (5.0 - x) - (5.0 + 2.0 * x); };
  return find_root(f, 0.1, 4.999, 1e-13).root;
}

ProtocolOptimum optimize_protocol(const DissipationModel& m, const Preparation& prep, int n,
                                  std::span<const double> dt_grid) {
  if (dt_grid.empty()) throw Error(Errc::invalid_argument, "optimize_protocol: empty grid");
  if (dt_grid.front() <= 0.0) throw Error(Errc::invalid_argument, "optimize_protocol: grid must start above 0");
  ProtocolOptimum out;
  const auto fisher = qfi_transient_curve(prep, n, m, dt_grid);
  out.grid_rates.resize(fisher.size());
  for (std::size_t i = 0; i < fisher.size(); ++i) out.grid_rates[i] = fisher[i] / dt_grid[i];

  const auto best = std::max_element(out.grid_rates.begin(), out.grid_rates.end());
  const std::size_t k = static_cast<std::size_t>(best - out.grid_rates.begin());
  out.best_dt = dt_grid[k];
  out.best_rate = *best;
  out.supremum_at_zero = k == 0;
  if (prep.kind == Preparation::Kind::ground) {
    out.zero_limit_rate = ultimate_rate(n, m.x(), m.coupling(), m.temperature());
  }
  if (k == 0 || k + 1 == dt_grid.size()) return out;

  // Golden section on log dt between the grid neighbours.
  const auto rate = [&](double log_dt) {
    const double dt = std::exp(log_dt);
    return qfi_transient(prep, n, m, dt).value / dt;
  };
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(dt_grid[k - 1]);
  double b = std::log(dt_grid[k + 1]);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = rate(c);
  double fd = rate(d);
  while (b - a > 1e-7) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = rate(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = rate(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double fx = rate(x);
  if (fx > out.best_rate) {
    out.best_rate = fx;
    out.best_dt = std::exp(x);
  }
  return out;
}

std::vector<TransientSeries> transient_scan(const std::vector<TransientSeriesSpec>& specs, const DissipationModel& m,
                                            std::span<const double> dt_grid, unsigned threads) {
  std::vector<TransientSeries> out(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        const auto fisher = qfi_transient_curve(specs[i].preparation, specs[i].n, m, dt_grid);
        TransientSeries& s = out[i];
        s.prep = specs[i].preparation.label();
        s.n = specs[i].n;
        s.dt.assign(dt_grid.begin(), dt_grid.end());
        s.fisher_rate.resize(fisher.size());
        for (std::size_t j = 0; j < fisher.size(); ++j) s.fisher_rate[j] = fisher[j] / dt_grid[j];
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned pool = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(std::max<std::size_t>(specs.size(), 1)));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < pool; ++t) workers.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace thermoprobe
