#include "thermoprobe/information.hpp"

#include <cmath>

#include "thermoprobe/error.hpp"

namespace thermoprobe {

namespace {

void require_same_size(Eigen::Index a, Eigen::Index b, const char* where) {
  if (a != b) throw Error(Errc::invalid_argument, std::string(where) + ": size mismatch");
}

}  // namespace

double bhattacharyya_infidelity(const Eigen::Ref<const Eigen::VectorXd>& p, const Eigen::Ref<const Eigen::VectorXd>& q) {
  require_same_size(p.size(), q.size(), "bhattacharyya_infidelity");
  // 1 - sqrt(F) = (1/2) sum (sqrt p - sqrt q)^2 for normalized p, q, and
  // sqrt p - sqrt q = (p - q) / (sqrt p + sqrt q) avoids the cancellation.
  double half_distance = 0.0;
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    const double denom = std::sqrt(p[n]) + std::sqrt(q[n]);
    if (denom == 0.0) continue;
    const double diff = (p[n] - q[n]) / denom;
    half_distance += diff * diff;
  }
  half_distance *= 0.5;
  // Normalization slack of order 1e-16 in p and q enters here unchanged;
  // it is far below the O(delta^2) signal used by the curvature oracle.
  return half_distance * (2.0 - half_distance);
}

double bhattacharyya_fidelity(const Eigen::Ref<const Eigen::VectorXd>& p, const Eigen::Ref<const Eigen::VectorXd>& q) {
  require_same_size(p.size(), q.size(), "bhattacharyya_fidelity");
  const double overlap = (p.cwiseProduct(q)).cwiseSqrt().sum();
  return overlap * overlap;
}

double classical_fisher_information(const Eigen::Ref<const Eigen::VectorXd>& p,
                                    const Eigen::Ref<const Eigen::VectorXd>& dp) {
  require_same_size(p.size(), dp.size(), "classical_fisher_information");
  double fisher = 0.0;
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    if (p[n] <= 0.0) {
      if (dp[n] != 0.0) throw Error(Errc::singular_state, "classical_fisher_information: p = 0 with dp != 0");
      continue;
    }
    fisher += dp[n] * dp[n] / p[n];
  }
  return fisher;
}

double qubit_qfi(const Eigen::Vector3d& r, const Eigen::Vector3d& dr) {
  const double purity_gap = 1.0 - r.squaredNorm();
  const double projection = r.dot(dr);
  if (purity_gap <= 1e-12) {
    if (std::abs(projection) > 1e-9 * std::max(1.0, dr.norm())) {
      throw Error(Errc::singular_state, "qubit_qfi: Bloch vector on the sphere with a radial derivative");
    }
    return dr.squaredNorm();
  }
  return dr.squaredNorm() + projection * projection / purity_gap;
}

}  // namespace thermoprobe
