#pragma once

#include <stdexcept>

namespace prefetch {

/// Quadratic value form V(b) = alpha1 b1^2 + alpha2 b2^2 + gamma b1 b2
///                            + beta1 b1 + beta2 b2 (no constant term, so
/// evaluation at the origin is always 0).
struct QuadraticCost {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double gamma = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;

  double eval(double b1, double b2) const {
    return alpha1 * b1 * b1 + alpha2 * b2 * b2 + gamma * b1 * b2 + beta1 * b1 +
           beta2 * b2;
  }
};

/// Decision line l(b) = a1 b1 + a2 b2 + a3; the associated rule fetches
/// exactly when l(b) < 0 (ties resolve to not fetching).
struct LinearDecision {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;

  double eval(double b1, double b2) const { return a1 * b1 + a2 * b2 + a3; }
};

/// Coefficients of the closed-form cost of the never-fetch policy
/// (hold until the MT queue runs dry, then fetch):
///   C_N(b) = A b1^2/2 + c b2^2/(2 mu) + b1 b2/mu
///          + [A/2 + (c-1)(1-mu)/mu] b1 + c b2/(2 mu),  A = (1-mu)/mu + 1/s.
QuadraticCost quadratic_of_never_fetch(double s, double mu, double c);

/// C_N evaluated at an integer backlog pair. Requires s, mu in (0,1], c >= 1.
double cost_never_fetch(int b1, int b2, double s, double mu, double c);

/// C_N by the two-branch recursion
///   C(b1, b2) = C(b1, b2-1) + (b1 + c b2)/mu            for b2 > 0,
///   C(b1, 0)  = C(b1-1, 0) + A b1 + (c-1)(1-mu)/mu      for b1 > 0,
/// with C(0,0) = 0. Serves as the independent oracle for the closed form.
double cost_never_fetch_recursive(int b1, int b2, double s, double mu, double c);

/// Fluid-limit branch active at backlog (b1, b2): with drain times
/// T0 = b1/s (CS queue) and T1 = b2/(mu - s) (MT queue, net rate mu - s when
/// s < mu), branch 2 applies when s < mu and the MT queue empties first
/// (T1 < T0); branch 1 otherwise (including every s >= mu case).
int fluid_branch(int b1, int b2, double s, double mu);

/// Coefficients of the fluid approximation to the always-fetch cost:
///   branch 1: (c/mu - (c-1)/s) b1^2/2 + c b2^2/(2 mu) + c b1 b2/mu
///   branch 2: b1^2/(2s) + c b2^2/(2 (mu - s))   (requires s < mu)
/// Branch 2 has gamma = 0 and no linear terms.
QuadraticCost quadratic_of_always_fetch_fluid(double s, double mu, double c,
                                              int branch);

/// Fluid always-fetch cost at (b1, b2), using the branch active there.
double cost_always_fetch_fluid(int b1, int b2, double s, double mu, double c);

/// Exact expected cost of the always-fetch policy (fetch whenever the CS
/// queue is nonempty), evaluated by sweeping the one-slot kernel from the
/// terminal state upward. No closed form exists for this quantity.
double cost_always_fetch_exact(int b1, int b2, double s, double mu, double c);

/// One-step policy improvement of a quadratic cost: the improved policy
/// fetches exactly below the line
///   a1 = gamma - 2 alpha1,
///   a2 = 2 alpha2 - gamma,
///   a3 = alpha1 + (1 - 2 mu) alpha2 - beta1 + beta2 - (1 - mu) gamma.
/// The positive prefactor s of the underlying action-value gap is dropped;
/// the sign, hence the decision, is unchanged.
LinearDecision one_step_improvement_line(const QuadraticCost& q, double mu);

/// The b2 threshold where l(b1, .) crosses zero: -(a1 b1 + a3)/a2 when
/// |a2| > 1e-12; otherwise +infinity when a1 b1 + a3 < 0 (the rule fetches in
/// the whole column) and -infinity otherwise (it never fetches there).
double switchover_boundary(const LinearDecision& line, int b1);

}  // namespace prefetch
