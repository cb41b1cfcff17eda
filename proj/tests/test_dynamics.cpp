#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "thermoprobe/dynamics.hpp"
#include "thermoprobe/equilibrium.hpp"
#include "thermoprobe/error.hpp"

using namespace thermoprobe;

namespace {

constexpr double kXTilde = 4.8887092350471315;

DissipationModel fig2_model() { return {kXTilde, 1.0, 1e-3}; }

}  // namespace

TEST(Model, RatesAndRelaxationTime) {
  const DissipationModel m(2.0, 0.8, 0.01);
  const double x = 2.0 / 0.8;
  const double g = 0.01 * 8.0 / (1.0 - std::exp(-x));
  EXPECT_NEAR(m.decay_rate(), g, 1e-15 * g);
  EXPECT_NEAR(m.excitation_rate(), g * std::exp(-x), 1e-15 * g);
  EXPECT_NEAR(1.0 / m.relaxation_time(), g * (1.0 + std::exp(-x)), 1e-14 * g);
  EXPECT_NEAR(1.0 / m.relaxation_time(), 0.08 / std::tanh(0.5 * x), 1e-14);
  EXPECT_NEAR(m.oscillator_damping(), g * (1.0 - std::exp(-x)), 1e-15);
  EXPECT_NEAR(fastest_rate(2, m), 1.0 / m.relaxation_time(), 1e-15);
}

TEST(Model, Validation) {
  EXPECT_THROW(DissipationModel(0.0, 1.0, 1.0), Error);
  EXPECT_THROW(DissipationModel(1.0, 1.0, 0.0), Error);
  try {
    DissipationModel(1.0, 0.0, 1.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::non_positive_temperature);
  }
}

TEST(Model, CouplingOnlyRescalesTime) {
  const DissipationModel a(1.5, 1.0, 1e-3);
  const DissipationModel b(1.5, 1.0, 2e-3);
  EXPECT_NEAR(b.relaxation_time(), 0.5 * a.relaxation_time(), 1e-15);
  for (double s : {0.1, 1.0, 4.0}) {
    EXPECT_NEAR(qfi_transient(Preparation::ground(), 2, a, s * a.relaxation_time()).value,
                qfi_transient(Preparation::ground(), 2, b, s * b.relaxation_time()).value, 1e-9);
  }
}

TEST(States, Validation) {
  EXPECT_THROW(QubitState({0.8, 0.8, 0.0}), Error);
  EXPECT_NO_THROW(QubitState({0.0, 0.0, 1.0 + 1e-13}));
  EXPECT_THROW(DiagonalState(Eigen::Vector2d(0.7, 0.7)), Error);
  EXPECT_THROW(DiagonalState(Eigen::Vector2d(1.1, -0.1)), Error);
  const QubitState t = QubitState::thermal(1.0, 0.5);
  EXPECT_NEAR(t.excited_population(), std::exp(-2.0) / (1.0 + std::exp(-2.0)), 1e-15);
}

TEST(Generator, GibbsStateIsFixedPoint) {
  const DissipationModel m(1.3, 0.7, 0.05);
  const QubitState g = QubitState::thermal(1.3, 0.7);
  EXPECT_LT(qubit_generator(m)(g.bloch()).norm(), 1e-12);
  for (int n : {2, 3, 10}) {
    const Eigen::VectorXd p = DiagonalState::thermal(n, 1.3, 0.7).populations();
    EXPECT_LT((rate_matrix(n, m) * p).cwiseAbs().maxCoeff(), 1e-12) << n;
    EXPECT_LT((rate_matrix(n, m).colwise().sum()).cwiseAbs().maxCoeff(), 1e-15) << n;
  }
}

TEST(Qubit, GroundPreparationMatchesAnalyticSolution) {
  const DissipationModel m(2.0, 1.0, 0.02);
  const double tau = m.relaxation_time();
  for (double s : {0.0, 0.01, 0.3, 1.0, 3.0}) {
    const QubitState r = evolve_qubit(QubitState::ground(), m, s * tau);
    EXPECT_NEAR(r.excited_population(), oracle::excited_population_from_ground(2.0, s * tau, tau), 1e-11) << s;
  }
}

TEST(Qubit, RelaxesToGibbsAndCoherencesDecayAtHalfRate) {
  const DissipationModel m(2.0, 1.0, 0.02);
  const double tau = m.relaxation_time();
  const QubitState late = evolve_qubit(QubitState::plus(), m, 50.0 * tau);
  EXPECT_NEAR(late.bloch().z(), QubitState::thermal(2.0, 1.0).bloch().z(), 1e-10);
  const double t = 0.7 * tau;
  const QubitState r = evolve_qubit(QubitState::plus(), m, t);
  EXPECT_NEAR(r.bloch().head<2>().norm(), std::exp(-0.5 * t / tau), 1e-11);
  EXPECT_LE(r.bloch().norm(), 1.0 + 1e-12);
}

TEST(Qubit, SchrodingerPictureRotationAboutZ) {
  const DissipationModel m(2.0, 1.0, 0.02);
  const double t = 0.37 * m.relaxation_time();
  const QubitState r = evolve_qubit(QubitState::plus(), m, t);
  const double phase = std::atan2(r.bloch().y(), r.bloch().x());
  EXPECT_NEAR(std::remainder(phase - 2.0 * t, 2.0 * M_PI), 0.0, 1e-10);
  // The rotation leaves populations alone.
  EXPECT_NEAR(r.bloch().z(), evolve_qubit(QubitState({0, 0, 0}), m, t).bloch().z(), 1e-14);
}

TEST(Qubit, SemigroupProperty) {
  const DissipationModel m(1.1, 0.9, 0.05);
  const double tau = m.relaxation_time();
  const QubitState start({0.3, -0.4, 0.2});
  const QubitState once = evolve_qubit(start, m, 1.3 * tau);
  const QubitState twice = evolve_qubit(evolve_qubit(start, m, 0.5 * tau), m, 0.8 * tau);
  EXPECT_LT((once.bloch() - twice.bloch()).norm(), 1e-10);
}

TEST(Qubit, TrajectoryAgreesWithSinglePoints) {
  const DissipationModel m(1.1, 0.9, 0.05);
  const double tau = m.relaxation_time();
  const std::vector<double> times{0.0, 0.2 * tau, tau, 4.0 * tau};
  const auto traj = evolve_qubit(QubitState::plus(), m, times, tau / 400.0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_LT((traj[i].bloch() - evolve_qubit(QubitState::plus(), m, times[i]).bloch()).norm(), 1e-9);
  }
}

TEST(Qubit, NegativeTime) {
  try {
    evolve_qubit(QubitState::ground(), fig2_model(), -1.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::negative_time);
  }
}

TEST(NLevel, TwoLevelCaseMatchesQubitPopulations) {
  const DissipationModel m(1.7, 1.2, 0.03);
  const EffectiveTwoLevelSpectrum s(1.7, 2, 1);
  for (double t : {0.1, 2.0, 10.0}) {
    const DiagonalState p = evolve_nlevel(DiagonalState::ground(2), s, m, t);
    EXPECT_NEAR(p.populations()[1], evolve_qubit(QubitState::ground(), m, t).excited_population(), 1e-12);
  }
}

TEST(NLevel, SymmetryTraceAndLongTimeLimit) {
  const int n = 6;
  const DissipationModel m(1.2, 1.0, 0.1);
  const EffectiveTwoLevelSpectrum s(1.2, n, 1);
  const double tau = 1.0 / fastest_rate(n, m);
  for (double t : {0.3 * tau, 3.0 * tau}) {
    const DiagonalState p = evolve_nlevel(DiagonalState::ground(n), s, m, t);
    EXPECT_NEAR(p.populations().sum(), 1.0, 1e-10);
    EXPECT_GE(p.populations().minCoeff(), -1e-12);
    for (int i = 2; i < n; ++i) EXPECT_NEAR(p.populations()[i], p.populations()[1], 1e-15);
  }
  const double slow = 1.0 / m.decay_rate();
  const DiagonalState late = evolve_nlevel(DiagonalState::ground(n), s, m, 50.0 * std::max(tau, slow));
  const double q = (n - 1) * std::exp(-1.2);
  EXPECT_NEAR(late.excited_population(), q / (1.0 + q), 1e-10);
}

TEST(NLevel, ExcitedPopulationRelaxesAtCollectiveRate) {
  const int n = 4;
  const DissipationModel m(1.0, 0.8, 0.05);
  const double k = fastest_rate(n, m);
  const double q = (n - 1) * std::exp(-1.0 / 0.8);
  const double t = 0.9 / k;
  const DiagonalState p = evolve_nlevel(DiagonalState::ground(n), EffectiveTwoLevelSpectrum(1.0, n, 1), m, t);
  EXPECT_NEAR(p.excited_population(), q / (1.0 + q) * -std::expm1(-k * t), 1e-11);
}

TEST(NLevel, RejectsMismatchedSpectrum) {
  const DissipationModel m(1.0, 1.0, 0.1);
  EXPECT_THROW(evolve_nlevel(DiagonalState::ground(3), EffectiveTwoLevelSpectrum(2.0, 3, 1), m, 1.0), Error);
  EXPECT_THROW(evolve_nlevel(DiagonalState::ground(3), EffectiveTwoLevelSpectrum(1.0, 3, 2), m, 1.0), Error);
  EXPECT_THROW(evolve_nlevel(DiagonalState::ground(3), EffectiveTwoLevelSpectrum(1.0, 4, 1), m, 1.0), Error);
}

TEST(Transient, GroundQubitMatchesExactSolution) {
  for (double x : {1.0, 2.5, kXTilde, 8.0}) {
    const DissipationModel m(x, 1.0, 1e-3);
    const double tau = m.relaxation_time();
    for (double s : {0.01, 0.1, 1.0, 10.0}) {
      const double num = qfi_transient(Preparation::ground(), 2, m, s * tau).value;
      const double ref = oracle::transient_qfi_exact(x, s * tau, tau, 1.0);
      EXPECT_NEAR(num, ref, 1e-7 * ref) << x << " " << s;
      EXPECT_NEAR(qfi_transient_closed_form_qubit(x, s * tau, tau, 1.0), ref, 1e-12 * ref);
    }
  }
}

TEST(Transient, ClosedFormStableAtExtremes) {
  EXPECT_EQ(qfi_transient_closed_form_qubit(2.0, 0.0, 1.0, 1.0), 0.0);
  const double late = qfi_transient_closed_form_qubit(2.0, 1e3, 1.0, 1.0);
  EXPECT_NEAR(late, qfi_degenerate_excited(2, 2.0, 2.0), 1e-12);
  EXPECT_TRUE(std::isfinite(qfi_transient_closed_form_qubit(800.0, 1e-9, 1.0, 1.0)));
  const double tiny = 1e-9;
  const DissipationModel m(kXTilde, 1.0, 1e-3);
  const double tau = m.relaxation_time();
  EXPECT_NEAR(qfi_transient_closed_form_qubit(kXTilde, tiny * tau, tau, 1.0) / (tiny * tau),
              oracle::short_time_rate(2, kXTilde, 1e-3, 1.0), 1e-6 * oracle::short_time_rate(2, kXTilde, 1e-3, 1.0));
}

TEST(Transient, ShortTimeLimit) {
  const DissipationModel m = fig2_model();
  const double dt = 1e-4 * m.relaxation_time();
  for (int n : {2, 4, 10}) {
    const double rate = qfi_transient(Preparation::ground(), n, m, dt).value / dt;
    const double ref = oracle::short_time_rate(n, kXTilde, 1e-3, 1.0);
    EXPECT_NEAR(rate, ref, 1e-3 * ref) << n;
    EXPECT_NEAR(ultimate_rate(n, kXTilde, 1e-3, 1.0), ref, 1e-13 * ref);
  }
}

TEST(Transient, LongTimeLimitIsEquilibriumQfi) {
  for (int n : {2, 5}) {
    const DissipationModel m(1.8, 1.0, 0.01);
    const double slow = 1.0 / std::min(m.decay_rate(), fastest_rate(n, m));
    const double f = qfi_transient(Preparation::ground(), n, m, 40.0 * slow).value;
    const double eq = qfi_degenerate_excited(n, 1.8, 1.8);
    EXPECT_NEAR(f, eq, 1e-8 * eq) << n;
  }
}

TEST(Transient, ThermalPreparationAtSampleTemperature) {
  // A probe prepared in Gibbs(T0) carries information only through what the
  // sample writes into it: F(dt) = (1 - e^{-dt/tau})^2 F_eq.
  const DissipationModel m(2.2, 1.0, 0.01);
  const double tau = m.relaxation_time();
  const double eq = qfi_degenerate_excited(2, 2.2, 2.2);
  for (double s : {0.1, 1.0, 5.0}) {
    const double f = qfi_transient(Preparation::thermal(1.0), 2, m, s * tau).value;
    const double u = -std::expm1(-s);
    EXPECT_NEAR(f, u * u * eq, 1e-8 * eq) << s;
  }
}

TEST(Transient, PlusStateMatchesQubitFidelityCurvature) {
  const DissipationModel m = fig2_model();
  const double tau = m.relaxation_time();
  for (double s : {0.05, 0.8, 3.0}) {
    const double dt = s * tau;
    const auto state = [&](double t) { return evolve_qubit(QubitState::plus(), m.at_temperature(t), dt, tau / 400.0); };
    const Eigen::Vector3d r0 = state(1.0).bloch();
    const auto infid = [&](double d) { return 1.0 - oracle::qubit_fidelity(r0, state(1.0 + d).bloch()); };
    const double h = 1e-3;
    const double curv = (infid(h) + infid(-h)) / (h * h);  // infid(0) == 0
    const double f = qfi_transient(Preparation::plus(), 2, m, dt).value;
    EXPECT_NEAR(f, 2.0 * curv, 1e-4 * f) << s;
  }
}

TEST(Transient, PictureTransformDoesNotChangeQfi) {
  // The QFI of |+> is invariant under the free rotation: compare with an
  // observer co-rotating with the probe (gap-independent Bloch derivative).
  const DissipationModel m = fig2_model();
  const double dt = 0.5 * m.relaxation_time();
  const QubitState r = evolve_qubit(QubitState::plus(), m, dt);
  const Eigen::Vector3d co = Eigen::AngleAxisd(-m.gap() * dt, Eigen::Vector3d::UnitZ()) * r.bloch();
  EXPECT_NEAR(co.y(), 0.0, 1e-12);
  EXPECT_NEAR(r.bloch().norm(), co.norm(), 1e-15);
}

TEST(Transient, PlusPreparationNeedsQubit) {
  EXPECT_THROW(qfi_transient(Preparation::plus(), 3, fig2_model(), 1.0), Error);
}

TEST(Transient, CurveMatchesPointwise) {
  const DissipationModel m = fig2_model();
  const double tau = m.relaxation_time();
  const std::vector<double> grid{0.01 * tau, 0.5 * tau, 2.0 * tau};
  for (const Preparation& p : {Preparation::ground(), Preparation::thermal(0.8), Preparation::plus()}) {
    const auto curve = qfi_transient_curve(p, 2, m, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double single = qfi_transient(p, 2, m, grid[i]).value;
      EXPECT_NEAR(curve[i], single, 1e-8 * single) << p.label() << " " << i;
    }
  }
}

TEST(Limits, OptimalRatio) {
  const double x = optimal_short_time_ratio();
  const double ref =
      oracle::bisect([](double v) { return std::exp(v) * (5.0 - v) - (5.0 + 2.0 * v); }, 0.1, 4.999, 1e-15);
  EXPECT_NEAR(x, ref, 1e-12);
  EXPECT_NEAR(x, kXTilde, 1e-12);
  EXPECT_NEAR(x, 4.885, 5e-3);
}

TEST(Limits, UltimateRateProperties) {
  for (double x : {0.5, 3.0, 7.0}) {
    EXPECT_NEAR(ultimate_rate(10, x, 1e-3, 1.0) / ultimate_rate(2, x, 1e-3, 1.0), 9.0, 1e-13);
    EXPECT_NEAR(ultimate_rate(3, x, 2e-3, 1.0) / ultimate_rate(3, x, 1e-3, 1.0), 2.0, 1e-13);
  }
  EXPECT_NEAR(ultimate_rate(2, 1e-4, 1.0, 1.0) / 1e-8, 1.0, 1e-3);
  // x~ maximizes the rate for every N.
  for (int n : {2, 4, 10}) {
    double best = 0.0;
    double best_x = 0.0;
    for (double x = 4.8; x <= 5.0; x += 1e-7) {
      const double r = ultimate_rate(n, x, 1e-3, 1.0);
      if (r > best) {
        best = r;
        best_x = x;
      }
    }
    EXPECT_NEAR(best_x, kXTilde, 1e-6) << n;
  }
}

TEST(Protocol, GroundPreparationOptimumIsShortestContact) {
  const DissipationModel m = fig2_model();
  const double tau = m.relaxation_time();
  const auto grid = log_space(1e-3 * tau, 20.0 * tau, 200);
  const ProtocolOptimum opt = optimize_protocol(m, Preparation::ground(), 2, grid);
  EXPECT_TRUE(opt.supremum_at_zero);
  EXPECT_EQ(opt.best_dt, grid.front());
  EXPECT_NEAR(opt.zero_limit_rate, oracle::short_time_rate(2, kXTilde, 1e-3, 1.0), 1e-12);
  EXPECT_LT(opt.best_rate, opt.zero_limit_rate);
  for (std::size_t i = 1; i < opt.grid_rates.size(); ++i) EXPECT_LT(opt.grid_rates[i], opt.grid_rates[i - 1]);
}

TEST(Protocol, ThermalPreparationHasInteriorOptimum) {
  const DissipationModel m = fig2_model();
  const double tau = m.relaxation_time();
  const auto grid = log_space(1e-3 * tau, 20.0 * tau, 200);
  for (double tp : {0.8, 0.9}) {
    const ProtocolOptimum opt = optimize_protocol(m, Preparation::thermal(tp), 2, grid);
    EXPECT_FALSE(opt.supremum_at_zero);
    EXPECT_TRUE(std::isnan(opt.zero_limit_rate));
    EXPECT_GT(opt.best_dt, grid.front());
    EXPECT_LT(opt.best_dt, grid.back());
    EXPECT_GE(opt.best_rate, *std::max_element(opt.grid_rates.begin(), opt.grid_rates.end()));
    const double here = qfi_transient(Preparation::thermal(tp), 2, m, opt.best_dt).value / opt.best_dt;
    for (double f : {0.99, 1.01}) {
      const double dt = f * opt.best_dt;
      EXPECT_LE(qfi_transient(Preparation::thermal(tp), 2, m, dt).value / dt, here * (1.0 + 1e-9));
    }
  }
}

TEST(Protocol, GroundDominatesOtherPreparations) {
  const DissipationModel m = fig2_model();
  const double tau = m.relaxation_time();
  const auto grid = log_space(1e-3 * tau, 20.0 * tau, 200);
  const auto ground = qfi_transient_curve(Preparation::ground(), 2, m, grid);
  for (const Preparation& p : {Preparation::thermal(0.8), Preparation::thermal(0.9), Preparation::plus()}) {
    const auto other = qfi_transient_curve(p, 2, m, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_GT(ground[i], other[i]) << p.label() << " " << i;
  }
}

TEST(Protocol, UncertaintyBound) {
  const ProtocolConfig c(100.0, 4.0, Preparation::ground());
  EXPECT_DOUBLE_EQ(c.interrogations(), 25.0);
  EXPECT_DOUBLE_EQ(temperature_uncertainty_bound(4.0, c.interrogations()), 0.1);
  EXPECT_THROW(ProtocolConfig(1.0, 2.0, Preparation::ground()), Error);
  EXPECT_THROW(ProtocolConfig(1.0, 0.0, Preparation::ground()), Error);
}

TEST(Scan, SeriesOrderAndThreadIndependence) {
  const DissipationModel m = fig2_model();
  const double tau = m.relaxation_time();
  const auto grid = log_space(1e-3 * tau, 20.0 * tau, 50);
  const std::vector<TransientSeriesSpec> specs{{Preparation::ground(), 2},        {Preparation::ground(), 4},
                                               {Preparation::ground(), 10},       {Preparation::thermal(0.8), 2},
                                               {Preparation::thermal(0.9), 2},    {Preparation::plus(), 2}};
  const auto one = transient_scan(specs, m, grid, 1);
  const auto many = transient_scan(specs, m, grid, 4);
  ASSERT_EQ(one.size(), specs.size());
  EXPECT_EQ(one[3].prep, "thermal_0.8");
  EXPECT_EQ(one[5].prep, "plus");
  for (std::size_t s = 0; s < one.size(); ++s) {
    EXPECT_EQ(one[s].fisher_rate, many[s].fisher_rate);
    for (double v : one[s].fisher_rate) EXPECT_TRUE(std::isfinite(v) && v > 0.0);
  }
  // Small-dt ordering follows N - 1.
  EXPECT_NEAR(one[1].fisher_rate[0] / one[0].fisher_rate[0], 3.0, 0.01);
  EXPECT_NEAR(one[2].fisher_rate[0] / one[0].fisher_rate[0], 9.0, 0.05);
}

TEST(Scan, ErrorsPropagateFromWorkers) {
  const std::vector<TransientSeriesSpec> specs{{Preparation::ground(), 2}, {Preparation::plus(), 3}};
  const std::vector<double> grid{0.1, 1.0};
  EXPECT_THROW(transient_scan(specs, fig2_model(), grid, 2), Error);
}
