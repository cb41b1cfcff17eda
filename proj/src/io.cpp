#include "thermoprobe/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "thermoprobe/error.hpp"

namespace thermoprobe {

using nlohmann::json;

namespace {

double number_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(Errc::invalid_argument, std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw Error(Errc::invalid_argument, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

int integer_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(Errc::invalid_argument, std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw Error(Errc::invalid_argument, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void to_json(json& j, const Spectrum& s) { j = s.to_vector(); }

Spectrum spectrum_from_json(const json& j) {
  if (!j.is_array()) throw Error(Errc::invalid_argument, "spectrum must be a JSON array of numbers");
  std::vector<double> e;
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(Errc::invalid_argument, "spectrum entries must be numbers");
    e.push_back(v.get<double>());
  }
  return Spectrum(std::move(e));
}

void to_json(json& j, const EffectiveTwoLevelSpectrum& s) { j = {{"gap", s.gap()}, {"n", s.n()}, {"n0", s.n0()}}; }

EffectiveTwoLevelSpectrum effective_spectrum_from_json(const json& j) {
  return {number_field(j, "gap"), integer_field(j, "n"), integer_field(j, "n0")};
}

void to_json(json& j, const CovarianceMatrix& c) {
  const auto& m = c.matrix();
  j = json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

CovarianceMatrix covariance_from_json(const json& j) {
  const auto bad = [] { return Error(Errc::invalid_argument, "covariance must be [[a, b], [b, c]]"); };
  if (!j.is_array() || j.size() != 2) throw bad();
  Eigen::Matrix2d m;
  for (int r = 0; r < 2; ++r) {
    if (!j[r].is_array() || j[r].size() != 2) throw bad();
    for (int c = 0; c < 2; ++c) {
      if (!j[r][c].is_number()) throw bad();
      m(r, c) = j[r][c].get<double>();
    }
  }
  return CovarianceMatrix(m);
}

void to_json(json& j, const DissipationModel& m) {
  j = {{"gap", m.gap()}, {"temperature", m.temperature()}, {"gamma", m.coupling()}};
}

DissipationModel model_from_json(const json& j) {
  return {number_field(j, "gap"), number_field(j, "temperature"), number_field(j, "gamma")};
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw Error(Errc::invalid_argument, "table row has the wrong number of cells");
  rows.push_back(std::move(row));
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << csv_escape(t.columns[c]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      std::visit(
          [&os](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::string>) {
              os << csv_escape(v);
            } else if constexpr (std::is_same_v<V, double>) {
              os << format_double(v);
            } else {
              os << v;
            }
          },
          row[c]);
    }
    os << '\n';
  }
}

void write_json(std::ostream& os, const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const auto& cell : row) {
      std::visit(
          [&r](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) {
              if (std::isfinite(v)) {
                r.push_back(v);
              } else {
                r.push_back(nullptr);
              }
            } else {
              r.push_back(v);
            }
          },
          cell);
    }
    rows.push_back(std::move(r));
  }
  const json doc = {{"columns", t.columns}, {"rows", std::move(rows)}};
  os << doc.dump(1) << '\n';
}

}  // namespace thermoprobe
