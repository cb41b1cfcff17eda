#include "thermoprobe/numerics.hpp"

#include <numeric>
#include <vector>

namespace thermoprobe {

SymmetricMatrix::SymmetricMatrix(Index dimension)
    : dimension_(dimension), packed_(Eigen::VectorXd::Zero(dimension * (dimension + 1) / 2)) {
  if (dimension <= 0) throw Error(Errc::invalid_argument, "SymmetricMatrix: dimension must be positive");
}

SymmetricMatrix SymmetricMatrix::from_dense(const Eigen::Ref<const Eigen::MatrixXd>& m, double tolerance) {
  if (m.rows() != m.cols()) throw Error(Errc::invalid_argument, "SymmetricMatrix: matrix is not square");
  SymmetricMatrix out(m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j <= i; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tolerance) {
        throw Error(Errc::invalid_argument, "SymmetricMatrix: matrix is not symmetric");
      }
      out(i, j) = m(i, j);
    }
  }
  return out;
}

SymmetricMatrix SymmetricMatrix::identity(Index dimension) {
  SymmetricMatrix out(dimension);
  for (Index i = 0; i < dimension; ++i) out(i, i) = 1.0;
  return out;
}

Eigen::MatrixXd SymmetricMatrix::dense() const {
  Eigen::MatrixXd m(dimension_, dimension_);
  for (Index i = 0; i < dimension_; ++i) {
    for (Index j = 0; j < dimension_; ++j) m(i, j) = (*this)(i, j);
  }
  return m;
}

double SymmetricMatrix::frobenius_norm() const { return dense().norm(); }

SymmetricMatrix SymmetricMatrix::permuted(const Eigen::Ref<const Eigen::VectorXi>& perm) const {
  if (perm.size() != dimension_) throw Error(Errc::invalid_argument, "SymmetricMatrix: permutation size mismatch");
  SymmetricMatrix out(dimension_);
  for (Index i = 0; i < dimension_; ++i) {
    for (Index j = 0; j <= i; ++j) out(perm[i], perm[j]) = (*this)(i, j);
  }
  return out;
}

SymmetricEigensystem eigensystem_symmetric(const SymmetricMatrix& m) {
  const Eigen::Index n = m.dimension();
  if (n > kMaxJacobiDimension) {
    throw Error(Errc::dimension_too_large,
                "eigensystem_symmetric: dimension " + std::to_string(n) + " exceeds " +
                    std::to_string(kMaxJacobiDimension));
  }

  Eigen::MatrixXd a = m.dense();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = a.norm();

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off == 0.0 || std::sqrt(off) <= 1e-17 * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle from the stable small-root formula for tan(theta).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) { return a(l, l) < a(r, r); });

  SymmetricEigensystem out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

Eigen::VectorXd eigenvalues_symmetric(const SymmetricMatrix& m) { return eigensystem_symmetric(m).values; }

std::vector<double> log_space(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw Error(Errc::invalid_argument, "log_space: need 0 < lo <= hi, n >= 1");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> lin_space(double lo, double hi, int n) {
  if (!(hi >= lo) || n < 1) throw Error(Errc::invalid_argument, "lin_space: need lo <= hi, n >= 1");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

}  // namespace thermoprobe
