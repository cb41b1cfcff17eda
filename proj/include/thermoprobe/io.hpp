#pragma once

// Serialization: JSON for configuration objects, CSV/JSON for result tables.
// Floats are written in shortest round-trip form.

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "thermoprobe/dynamics.hpp"
#include "thermoprobe/gaussian.hpp"
#include "thermoprobe/spectra.hpp"

namespace thermoprobe {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

// Spectrum <-> [e1, e2, ...]
void to_json(nlohmann::json& j, const Spectrum& s);
Spectrum spectrum_from_json(const nlohmann::json& j);

// EffectiveTwoLevelSpectrum <-> {"gap": ..., "n": ..., "n0": ...}
void to_json(nlohmann::json& j, const EffectiveTwoLevelSpectrum& s);
EffectiveTwoLevelSpectrum effective_spectrum_from_json(const nlohmann::json& j);

// CovarianceMatrix <-> [[a, b], [b, c]]
void to_json(nlohmann::json& j, const CovarianceMatrix& c);
CovarianceMatrix covariance_from_json(const nlohmann::json& j);

// DissipationModel <-> {"gap": ..., "temperature": ..., "gamma": ...}
void to_json(nlohmann::json& j, const DissipationModel& m);
DissipationModel model_from_json(const nlohmann::json& j);

using Cell = std::variant<std::string, long long, double>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

void write_csv(std::ostream& os, const Table& t);
/// {"columns": [...], "rows": [[...], ...]}; non-finite doubles become null.
void write_json(std::ostream& os, const Table& t);

}  // namespace thermoprobe
