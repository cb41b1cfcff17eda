#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thermoprobe {

enum class Errc {
  invalid_argument,
  no_sign_change,
  no_convergence,
  non_finite_state,
  step_too_small,
  dimension_too_small,
  dimension_too_large,
  invalid_spectrum,
  non_positive_temperature,
  negative_time,
  singular_state,
  unphysical_covariance,
};

std::string_view to_string(Errc code) noexcept;

// True for failures that come out of a numerical routine (as opposed to bad input).
bool is_numerical(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace thermoprobe
