#include "vfence/qp.hpp"
#include "vfence/errors.hpp"

#include <algorithm>
#include <cmath>

namespace vfence {

void validate(const QpParams& p) {
  const double fields[] = {p.alpha, p.beta, p.d_desired, p.d_prev, p.d_min, p.d_max};
  for (double v : fields) {
    if (!std::isfinite(v)) {
      throw DomainError("QpParams: all fields must be finite");
    }
  }
  if (!(p.alpha > 0.0) || !(p.beta > 0.0)) {
    throw DomainError("QpParams: alpha and beta must be positive");
  }
  if (!(p.d_min < p.d_max)) {
    throw DomainError("QpParams: d_min must be strictly below d_max");
  }
}

double cost(const QpParams& p, double d) {
  const double e1 = d - p.d_desired;
  const double e2 = d - p.d_prev;
  return p.alpha * e1 * e1 + p.beta * e2 * e2;
}

double gradient(const QpParams& p, double d) {
  return 2.0 * p.alpha * (d - p.d_desired) + 2.0 * p.beta * (d - p.d_prev);
}

double hessian(const QpParams& p) { return 2.0 * (p.alpha + p.beta); }

double kkt_residual(const QpParams& p, double d, double lambda_lo, double lambda_hi) {
  const double stationarity = std::abs(gradient(p, d) - lambda_lo + lambda_hi);
  const double primal = std::max({0.0, p.d_min - d, d - p.d_max});
  const double dual = std::max({0.0, -lambda_lo, -lambda_hi});
  const double complementarity =
      std::max(std::abs(lambda_lo * (d - p.d_min)), std::abs(lambda_hi * (p.d_max - d)));
  return std::max({stationarity, primal, dual, complementarity});
}

DurationSolution solve_sqp(const QpParams& p, double tol, int max_iter) {
  validate(p);
  if (!(tol > 0.0) || max_iter < 1) {
    throw DomainError("solve_sqp: tol must be positive and max_iter at least 1");
  }

  const double h = hessian(p);
  double d = std::clamp(p.d_prev, p.d_min, p.d_max);
  DurationSolution sol;

  for (int it = 1; it <= max_iter; ++it) {
    d = std::clamp(d - gradient(p, d) / h, p.d_min, p.d_max);

    // The clamp writes the bound value verbatim, so equality is exact here.
    double lo = 0.0;
    double hi = 0.0;
    if (d == p.d_min) {
      lo = gradient(p, d);
    } else if (d == p.d_max) {
      hi = -gradient(p, d);
    }
    // A negative recovered multiplier means that bound is not truly active;
    // clip it and let the residual report the leftover stationarity error.
    lo = std::max(0.0, lo);
    hi = std::max(0.0, hi);

    const double res = kkt_residual(p, d, lo, hi);
    if (res <= tol) {
      sol.d_star = d;
      sol.lambda_lo = lo;
      sol.lambda_hi = hi;
      sol.iterations = it;
      sol.kkt_residual = res;
      return sol;
    }
  }
  throw ConvergenceError("solve_sqp: no KKT point within " + std::to_string(max_iter) +
                         " iterations");
}

double closed_form(const QpParams& p) {
  validate(p);
  const double unconstrained = (p.alpha * p.d_desired + p.beta * p.d_prev) / (p.alpha + p.beta);
  return std::clamp(unconstrained, p.d_min, p.d_max);
}

} // namespace vfence
