#include "thermoprobe/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "thermoprobe/dynamics.hpp"
#include "thermoprobe/equilibrium.hpp"
#include "thermoprobe/error.hpp"
#include "thermoprobe/gaussian.hpp"
#include "thermoprobe/io.hpp"

namespace thermoprobe::cli {

namespace {

using nlohmann::json;

// Bad configuration; the message names the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void reject(const std::string& field, const std::string& why) {
  throw ConfigError("invalid '" + field + "': " + why);
}

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

// One setting: built-in default, overridden by the config file, overridden by
// the command-line flag.
class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {}

  template <class T>
  void option(const std::string& key, T& storage, const std::string& help) {
    CLI::Option* opt = nullptr;
    if constexpr (std::is_same_v<T, bool>) {
      opt = app_->add_flag("--" + dashed(key), storage, help);
    } else {
      opt = app_->add_option("--" + dashed(key), storage, help);
      if constexpr (requires { storage.begin(); } && !std::is_same_v<T, std::string>) opt->delimiter(',');
    }
    keys_.insert(key);
    resolvers_.push_back([opt, key, &storage](const json& cfg) {
      if (opt->count() > 0 || !cfg.contains(key)) return;
      try {
        storage = cfg.at(key).get<T>();
      } catch (const json::exception&) {
        reject(key, "wrong type in config file");
      }
    });
  }

  void resolve(const json& cfg) const {
    for (const auto& [key, value] : cfg.items()) {
      if (!keys_.contains(key)) reject(key, "unknown config key");
    }
    for (const auto& r : resolvers_) r(cfg);
  }

 private:
  CLI::App* app_;
  std::set<std::string> keys_;
  std::vector<std::function<void(const json&)>> resolvers_;
};

void require_positive(double v, const std::string& field) {
  if (!(std::isfinite(v) && v > 0.0)) reject(field, "must be positive and finite");
}

void require_levels(const std::vector<int>& n, const std::string& field) {
  if (n.empty()) reject(field, "list must not be empty");
  for (int v : n) {
    if (v < 2) reject(field, "every N must be >= 2");
    if (v > 1000) reject(field, "N above 1000 is not supported");
  }
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> out;
  for (int v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

struct Command {
  virtual ~Command() = default;
  virtual Table run(unsigned threads) = 0;
};

struct EquilibriumScan : Command {
  std::vector<int> n{2, 4, 6, 8, 10};
  double gap = 1.0;
  double x_min = 0.1;
  double x_max = 20.0;
  int points = 400;
  bool no_harmonic = false;

  void declare(Settings& s) {
    s.option("n", n, "probe dimensions");
    s.option("gap", gap, "energy gap (oscillator frequency)");
    s.option("x_min", x_min, "smallest gap/T");
    s.option("x_max", x_max, "largest gap/T");
    s.option("points", points, "number of log-spaced x values");
    s.option("no_harmonic", no_harmonic, "omit the harmonic-oscillator series");
  }

  Table run(unsigned) override {
    require_levels(n, "n");
    require_positive(gap, "gap");
    require_positive(x_min, "x_min");
    require_positive(x_max, "x_max");
    if (!(x_max > x_min)) reject("x_max", "must exceed x_min");
    if (points < 2) reject("points", "need at least 2");
    const auto series = qfi_equilibrium_scan(n, log_space(x_min, x_max, points), gap, !no_harmonic);
    Table t{{"N", "T", "qfi", "qfi_normalized"}, {}};
    for (const auto& s : series) {
      const Cell label = s.n > 0 ? Cell(static_cast<long long>(s.n)) : Cell(s.label);
      for (std::size_t i = 0; i < s.temperature.size(); ++i) {
        t.add_row({label, s.temperature[i], s.qfi[i], s.qfi_normalized[i]});
      }
    }
    return t;
  }
};

struct OptimalGap : Command {
  std::vector<int> n = range(2, 10);
  std::vector<int> n0{1};
  double temperature = 1.0;

  void declare(Settings& s) {
    s.option("n", n, "probe dimensions");
    s.option("n0", n0, "ground-level degeneracies");
    s.option("temperature", temperature, "sample temperature");
  }

  Table run(unsigned) override {
    require_levels(n, "n");
    if (n0.empty()) reject("n0", "list must not be empty");
    require_positive(temperature, "temperature");
    for (int levels : n) {
      for (int g : n0) {
        if (g < 1 || g > levels - 1) {
          reject("n0", "N0 = " + std::to_string(g) + " is outside [1, N-1] for N = " + std::to_string(levels));
        }
      }
    }
    Table t{{"N", "N0", "x_star", "gap", "variance_peak", "qfi_peak", "variance_drop"}, {}};
    for (int levels : n) {
      for (int g : n0) {
        const OptimalGapResult r = optimal_gap(levels, g, temperature);
        // Loss of peak variance when one more level joins the ground manifold.
        double drop = std::numeric_limits<double>::quiet_NaN();
        if (g >= 2) drop = optimal_gap(levels, g - 1, temperature).variance_at_optimum - r.variance_at_optimum;
        t.add_row({static_cast<long long>(levels), static_cast<long long>(g), r.x_star, r.gap, r.variance_at_optimum,
                   r.qfi_at_optimum, drop});
      }
    }
    return t;
  }
};

struct HessianCheck : Command {
  std::vector<int> n = range(2, 20);
  double temperature = 1.0;

  void declare(Settings& s) {
    s.option("n", n, "probe dimensions");
    s.option("temperature", temperature, "sample temperature");
  }

  Table run(unsigned) override {
    require_levels(n, "n");
    for (int v : n) {
      if (v > kMaxJacobiDimension) reject("n", "at most " + std::to_string(kMaxJacobiDimension) + " levels");
    }
    require_positive(temperature, "temperature");
    Table t{{"N", "x_star", "lambda_excited", "lambda_shift", "lambda_pinned", "eigenvalue_error", "zero_modes",
             "negative_semidefinite"},
            {}};
    for (int levels : n) {
      const HessianCertificate c = hessian_certificate(levels, temperature);
      const double error = (c.eigenvalues - c.analytic_eigenvalues()).cwiseAbs().maxCoeff();
      t.add_row({static_cast<long long>(levels), c.x_star, c.lambda_excited, c.lambda_shift, c.lambda_pinned, error,
                 static_cast<long long>(c.zero_modes()), static_cast<long long>(c.negative_semidefinite() ? 1 : 0)});
    }
    return t;
  }
};

struct TransientScan : Command {
  double gamma = 1e-3;
  double temperature = 1.0;
  double gap = std::numeric_limits<double>::quiet_NaN();  // unset: optimal short-time ratio times T
  std::vector<int> n{2, 4, 10};
  std::vector<double> t_prep{0.8, 0.9};
  double dt_min = 1e-3;  // in units of the qubit relaxation time
  double dt_max = 20.0;
  int points = 200;
  bool include_plus = false;
  bool include_harmonic = false;
  std::string harmonic_rate = "net";
  bool full_rate = false;

  void declare(Settings& s) {
    s.option("gamma", gamma, "probe-sample coupling");
    s.option("temperature", temperature, "sample temperature");
    s.option("gap", gap, "probe gap (default: optimal short-time ratio times T)");
    s.option("n", n, "dimensions for ground-state preparations");
    s.option("t_prep", t_prep, "temperatures of thermal qubit preparations");
    s.option("dt_min", dt_min, "shortest contact time / tau");
    s.option("dt_max", dt_max, "longest contact time / tau");
    s.option("points", points, "number of log-spaced contact times");
    s.option("include_plus", include_plus, "add the |+> qubit preparation");
    s.option("include_harmonic", include_harmonic, "add a harmonic probe prepared in its ground state");
    s.option("harmonic_rate", harmonic_rate, "oscillator damping: net or downward");
    s.option("full_rate", full_rate, "differentiate through the oscillator rate's temperature dependence");
  }

  Table run(unsigned threads) override {
    require_positive(gamma, "gamma");
    require_positive(temperature, "temperature");
    if (std::isnan(gap)) gap = optimal_short_time_ratio() * temperature;
    require_positive(gap, "gap");
    require_levels(n, "n");
    for (double tp : t_prep) require_positive(tp, "t_prep");
    require_positive(dt_min, "dt_min");
    require_positive(dt_max, "dt_max");
    if (!(dt_max > dt_min)) reject("dt_max", "must exceed dt_min");
    if (points < 2) reject("points", "need at least 2");
    if (harmonic_rate != "net" && harmonic_rate != "downward") reject("harmonic_rate", "expected net or downward");

    const DissipationModel model(gap, temperature, gamma);
    const double tau = model.relaxation_time();
    const auto grid = log_space(dt_min * tau, dt_max * tau, points);

    std::vector<TransientSeriesSpec> specs;
    for (int levels : n) specs.push_back({Preparation::ground(), levels});
    for (double tp : t_prep) specs.push_back({Preparation::thermal(tp), 2});
    if (include_plus) specs.push_back({Preparation::plus(), 2});
    const auto series = transient_scan(specs, model, grid, threads);

    Table t{{"prep", "N", "dt", "fisher_rate"}, {}};
    for (const auto& s : series) {
      for (std::size_t i = 0; i < s.dt.size(); ++i) {
        t.add_row({s.prep, static_cast<long long>(s.n), s.dt[i], s.fisher_rate[i]});
      }
    }
    if (include_harmonic) {
      const auto rate = harmonic_rate == "net" ? OscillatorRate::net_damping : OscillatorRate::downward;
      const auto treatment = full_rate ? RateTemperature::full : RateTemperature::frozen;
      const auto fisher = qfi_harmonic_transient_curve(CovarianceMatrix::vacuum(), model, grid, treatment, rate);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        t.add_row({std::string("ground"), std::string("ho"), grid[i], fisher[i] / grid[i]});
      }
    }
    return t;
  }
};

struct Limits : Command {
  std::vector<int> n{2, 4, 10};
  double gamma = 1e-3;
  double temperature = 1.0;

  void declare(Settings& s) {
    s.option("n", n, "probe dimensions");
    s.option("gamma", gamma, "probe-sample coupling");
    s.option("temperature", temperature, "sample temperature");
  }

  Table run(unsigned) override {
    require_levels(n, "n");
    require_positive(gamma, "gamma");
    require_positive(temperature, "temperature");
    const double x = optimal_short_time_ratio();
    Table t{{"N", "x_tilde", "rate"}, {}};
    for (int levels : n) {
      t.add_row({static_cast<long long>(levels), x, ultimate_rate(levels, x, gamma, temperature)});
    }
    return t;
  }
};

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) reject("config", "cannot open " + path);
  try {
    json cfg = json::parse(in);
    if (!cfg.is_object()) reject("config", "top level must be a JSON object");
    return cfg;
  } catch (const json::parse_error& e) {
    reject("config", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

unsigned thread_budget() {
  const char* env = std::getenv("THERMOPROBE_THREADS");
  if (env == nullptr || *env == '\0') return std::max(1u, std::thread::hardware_concurrency());
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) {
    throw Error(Errc::invalid_argument, "THERMOPROBE_THREADS must be a positive integer");
  }
  return static_cast<unsigned>(v);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal probes for quantum thermometry: equilibrium and transient QFI tables"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format = "csv";

  EquilibriumScan equilibrium;
  OptimalGap gap;
  HessianCheck hessian;
  TransientScan transient;
  Limits limits;

  struct Entry {
    CLI::App* app;
    Command* command;
    std::unique_ptr<Settings> settings;
  };
  std::vector<Entry> entries;
  const auto add = [&](const char* name, const char* help, Command& cmd, auto declare) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto settings = std::make_unique<Settings>(sub);
    sub->add_option("--config", config_path, "JSON file with settings (flags take precedence)");
    settings->option("out", out_path, "output path (default: stdout)");
    settings->option("format", format, "csv or json");
    declare(*settings);
    entries.push_back({sub, &cmd, std::move(settings)});
  };
  add("equilibrium-scan", "optimal N-level and harmonic QFI along a temperature scan", equilibrium,
      [&](Settings& s) { equilibrium.declare(s); });
  add("optimal-gap", "optimal gaps of effective two-level probes", gap, [&](Settings& s) { gap.declare(s); });
  add("hessian-check", "variance Hessian at the optimum and its spectrum", hessian,
      [&](Settings& s) { hessian.declare(s); });
  add("transient-scan", "F/dt of partly thermalized probes versus contact time", transient,
      [&](Settings& s) { transient.declare(s); });
  add("limits", "short-contact limit of F/dt at the optimal gap", limits, [&](Settings& s) { limits.declare(s); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const auto active = std::find_if(entries.begin(), entries.end(), [](const Entry& e) { return e.app->parsed(); });
    const json cfg = config_path.empty() ? json::object() : read_config(config_path);
    active->settings->resolve(cfg);
    if (format != "csv" && format != "json") reject("format", "expected csv or json");
    const unsigned threads = thread_budget();

    const Table table = active->command->run(threads);

    std::ostringstream buffer;
    if (format == "csv") {
      write_csv(buffer, table);
    } else {
      write_json(buffer, table);
    }
    if (out_path.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(out_path, std::ios::binary);
      if (!file) reject("out", "cannot open " + out_path + " for writing");
      file << buffer.str();
      if (!file) reject("out", "write to " + out_path + " failed");
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "thermoprobe: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "thermoprobe: " << e.what() << '\n';
    return is_numerical(e.code()) ? kExitNumerical : kExitConfig;
  } catch (const std::exception& e) {
    err << "thermoprobe: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace thermoprobe::cli
