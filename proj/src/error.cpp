#include "thermoprobe/error.hpp"

namespace thermoprobe {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::no_sign_change: return "NoSignChange";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::non_finite_state: return "NonFiniteState";
    case Errc::step_too_small: return "StepTooSmall";
    case Errc::dimension_too_small: return "DimensionTooSmall";
    case Errc::dimension_too_large: return "DimensionTooLarge";
    case Errc::invalid_spectrum: return "InvalidSpectrum";
    case Errc::non_positive_temperature: return "NonPositiveTemperature";
    case Errc::negative_time: return "NegativeTime";
    case Errc::singular_state: return "SingularState";
    case Errc::unphysical_covariance: return "UnphysicalCovariance";
  }
  return "Unknown";
}

bool is_numerical(Errc code) noexcept {
  switch (code) {
    case Errc::no_sign_change:
    case Errc::no_convergence:
    case Errc::non_finite_state:
    case Errc::step_too_small:
    case Errc::singular_state:
      return true;
    default:
      return false;
  }
}

}  // namespace thermoprobe
