#pragma once

// Small numerical toolbox shared by the physics modules: a bracketing root
// finder, a fixed-step RK4 integrator, Jacobi diagonalization of small
// symmetric matrices and Richardson-refined central differences.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "thermoprobe/error.hpp"

namespace thermoprobe {

struct BracketedRoot {
  double lo = 0.0;
  double hi = 0.0;
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Brent's method: inverse quadratic interpolation and secant steps, falling
/// back to bisection whenever the interpolant leaves the bracket or converges
/// too slowly. Returns once the bracket is no wider than `tol` and
/// |f(root)| <= tol. The result satisfies lo <= root <= hi.
template <class F>
BracketedRoot find_root(F&& f, double lo, double hi, double tol, int max_iterations = 300) {
  if (!(tol > 0.0)) throw Error(Errc::invalid_argument, "find_root: tol must be positive");
  if (!(lo < hi)) throw Error(Errc::invalid_argument, "find_root: need lo < hi");

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb) || fa == 0.0 || fb == 0.0 ||
      std::signbit(fa) == std::signbit(fb)) {
    throw Error(Errc::no_sign_change, "find_root: f(lo) and f(hi) must have strictly opposite signs");
  }

  double c = b;
  double fc = fb;
  double d = b - a;
  double e = d;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    if (std::signbit(fb) == std::signbit(fc) && fb != 0.0) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }

    const double width = std::abs(c - b);
    const bool narrow = width <= tol || fb == 0.0;
    if (narrow && std::abs(fb) <= tol) {
      return {std::min(b, c), std::max(b, c), b, fb, iter};
    }
    if (width <= 4.0 * eps * std::abs(b)) {
      throw Error(Errc::no_convergence,
                  "find_root: bracket collapsed to machine resolution with |f| = " +
                      std::to_string(std::abs(fb)));
    }

    // Once the bracket is narrow enough we only chase the residual, so allow
    // the smallest steps the arithmetic supports.
    const double tol1 = 2.0 * eps * std::abs(b) + (narrow ? std::numeric_limits<double>::min() : 0.25 * tol);
    const double m = 0.5 * (c - b);

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p = 0.0;
      double q = 0.0;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * m * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, m);
    fb = f(b);
    if (!std::isfinite(fb)) {
      throw Error(Errc::no_convergence, "find_root: non-finite function value inside bracket");
    }
  }
  throw Error(Errc::no_convergence, "find_root: iteration cap reached");
}

/// Dense symmetric matrix with each off-diagonal entry stored once
/// (packed lower triangle), so (i,j) and (j,i) are the same number.
class SymmetricMatrix {
 public:
  using Index = Eigen::Index;

  explicit SymmetricMatrix(Index dimension);

  /// Throws InvalidArgument if |m(i,j) - m(j,i)| exceeds `tolerance`; the
  /// lower triangle is kept.
  static SymmetricMatrix from_dense(const Eigen::Ref<const Eigen::MatrixXd>& m, double tolerance = 0.0);
  static SymmetricMatrix identity(Index dimension);

  Index dimension() const noexcept { return dimension_; }

  double operator()(Index i, Index j) const { return packed_[offset(i, j)]; }
  double& operator()(Index i, Index j) { return packed_[offset(i, j)]; }

  Eigen::MatrixXd dense() const;
  double frobenius_norm() const;

  /// P^T M P for the permutation sending index k to perm[k].
  SymmetricMatrix permuted(const Eigen::Ref<const Eigen::VectorXi>& perm) const;

 private:
  Index offset(Index i, Index j) const {
    if (i < j) std::swap(i, j);
    return i * (i + 1) / 2 + j;
  }

  Index dimension_;
  Eigen::VectorXd packed_;
};

inline constexpr Eigen::Index kMaxJacobiDimension = 64;

struct SymmetricEigensystem {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column k belongs to values[k]
};

/// Cyclic Jacobi rotations. Dimension is capped at kMaxJacobiDimension.
SymmetricEigensystem eigensystem_symmetric(const SymmetricMatrix& m);
Eigen::VectorXd eigenvalues_symmetric(const SymmetricMatrix& m);

namespace detail {

inline bool all_finite(double v) { return std::isfinite(v); }

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& v) {
  return v.allFinite();
}

}  // namespace detail

/// Classical RK4 with exactly `steps` equal steps over [0, t_end] for an
/// autonomous system y' = rhs(y). State may be a double or an Eigen vector.
template <class State, class Rhs>
State integrate_ode_steps(Rhs&& rhs, State y, double t_end, long steps) {
  if (!(t_end >= 0.0)) throw Error(Errc::invalid_argument, "integrate_ode: t_end must be >= 0");
  if (t_end == 0.0 || steps <= 0) return y;
  const double h = t_end / static_cast<double>(steps);
  for (long i = 0; i < steps; ++i) {
    const State k1 = rhs(y);
    const State k2 = rhs(State(y + (0.5 * h) * k1));
    const State k3 = rhs(State(y + (0.5 * h) * k2));
    const State k4 = rhs(State(y + h * k3));
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!detail::all_finite(y)) {
      throw Error(Errc::non_finite_state, "integrate_ode: state became non-finite at step " + std::to_string(i));
    }
  }
  return y;
}

/// Number of RK4 steps so that no step exceeds `dt`.
inline long rk4_step_count(double t_end, double dt) {
  if (!(dt > 0.0)) throw Error(Errc::invalid_argument, "integrate_ode: dt must be positive");
  if (!(t_end >= 0.0)) throw Error(Errc::invalid_argument, "integrate_ode: t_end must be >= 0");
  return static_cast<long>(std::ceil(t_end / dt));
}

template <class State, class Rhs>
State integrate_ode(Rhs&& rhs, State y0, double t_end, double dt) {
  return integrate_ode_steps(std::forward<Rhs>(rhs), std::move(y0), t_end, rk4_step_count(t_end, dt));
}

enum class Derivative { first, second };

/// Central difference at steps h and h/2 combined by one Richardson step,
/// leaving an O(h^4) error. Works for scalar- and Eigen-valued f.
template <class F>
auto central_diff(F&& f, double x, double h, Derivative order = Derivative::first)
    -> std::decay_t<std::invoke_result_t<F&, double>> {
  using Result = std::decay_t<std::invoke_result_t<F&, double>>;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (!(h > 0.0) || h < 1e3 * eps * std::abs(x)) {
    throw Error(Errc::step_too_small, "central_diff: step " + std::to_string(h) + " too small at x = " +
                                          std::to_string(x));
  }
  const double half = 0.5 * h;
  if (order == Derivative::first) {
    const Result coarse = (f(x + h) - f(x - h)) / (2.0 * h);
    const Result fine = (f(x + half) - f(x - half)) / (2.0 * half);
    return Result((4.0 * fine - coarse) / 3.0);
  }
  const Result centre = f(x);
  const Result coarse = (f(x + h) - 2.0 * centre + f(x - h)) / (h * h);
  const Result fine = (f(x + half) - 2.0 * centre + f(x - half)) / (half * half);
  return Result((4.0 * fine - coarse) / 3.0);
}

/// n points over [lo, hi], equally spaced in log (lo > 0) or linearly.
std::vector<double> log_space(double lo, double hi, int n);
std::vector<double> lin_space(double lo, double hi, int n);

}  // namespace thermoprobe
