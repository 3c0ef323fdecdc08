#pragma once

namespace vfence {

/// Parameters of the scalar motion-duration program
///   minimize  alpha * (d - d_desired)^2 + beta * (d - d_prev)^2
///   subject to  d_min <= d <= d_max
/// Strictly convex for alpha, beta > 0, so the minimizer is unique.
struct QpParams {
  double alpha = 1.0;
  double beta = 0.85;
  double d_desired = 0.0;
  double d_prev = 0.0;
  double d_min = 4.0;
  double d_max = 11.0;
};

/// Throws DomainError unless alpha > 0, beta > 0, d_min < d_max, all finite.
void validate(const QpParams& p);

struct DurationSolution {
  double d_star = 0.0;
  double lambda_lo = 0.0; ///< Multiplier of d >= d_min.
  double lambda_hi = 0.0; ///< Multiplier of d <= d_max.
  int iterations = 0;
  double kkt_residual = 0.0;
};

inline constexpr double kDefaultTol = 1e-8;
inline constexpr int kDefaultMaxIter = 50;

double cost(const QpParams& p, double d);
double gradient(const QpParams& p, double d);
double hessian(const QpParams& p);

/// First-order optimality error of a candidate (d, lambda_lo, lambda_hi):
/// the largest violation among stationarity of the Lagrangian, the bound
/// constraints, multiplier nonnegativity, and complementary slackness.
double kkt_residual(const QpParams& p, double d, double lambda_lo, double lambda_hi);

/// Iterative solve: projected Newton steps from the previous duration, with
/// multipliers recovered from the active bound. Terminates when the KKT
/// residual drops to tol; throws ConvergenceError if max_iter steps do not
/// get there (cannot happen for valid params, where one step is exact).
DurationSolution solve_sqp(const QpParams& p, double tol = kDefaultTol,
                           int max_iter = kDefaultMaxIter);

/// Independent closed form for testing: the unconstrained minimizer
/// (alpha * d_desired + beta * d_prev) / (alpha + beta) clamped to the box.
double closed_form(const QpParams& p);

} // namespace vfence
