#pragma once

#include "prefetch/model.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace prefetch {

struct SolveOptions {
  double tol = 1e-9;      ///< sup-norm Bellman residual at convergence
  int max_iters = 100000;  ///< sweep budget before giving up
};

/// Thrown when value iteration fails to reach the residual tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

using PolicyGrid = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Optimal value function and greedy policy of the two-parameter model on the
/// triangular grid b1 <= B1max, b1 + b2 <= B1max + B2max. The grid is closed
/// under the transition kernel, so no artificial boundary policy is needed.
struct ReducedSolution {
  double s = 0.0;
  double mu = 0.0;
  double c = 1.0;
  int B1max = 0;
  int B2max = 0;
  Eigen::MatrixXd value;  ///< (B1max+1) x (B1max+B2max+1); zero outside the triangle
  PolicyGrid policy;      ///< Action per state, same layout as value
  int iterations = 0;
  double residual = 0.0;

  int level_cap() const { return B1max + B2max; }
  bool in_grid(int b1, int b2) const {
    return b1 >= 0 && b2 >= 0 && b1 <= B1max && b1 + b2 <= level_cap();
  }
  double V(int b1, int b2) const;
  Action action(int b1, int b2) const;
};

/// Value function and greedy policy of the full model; backlog grid as in
/// ReducedSolution, crossed with the channel and processor state spaces.
struct FullSolution {
  FsmcModel channel;
  FsmcModel processor;
  double c = 1.0;
  int B1max = 0;
  int B2max = 0;
  std::vector<double> value;        ///< flat (b1, b2, j, m) table
  std::vector<std::uint8_t> policy; ///< same layout
  int iterations = 0;
  double residual = 0.0;

  int level_cap() const { return B1max + B2max; }
  bool in_grid(int b1, int b2) const {
    return b1 >= 0 && b2 >= 0 && b1 <= B1max && b1 + b2 <= level_cap();
  }
  std::size_t index(int b1, int b2, int j, int m) const;
  double V(int b1, int b2, int j, int m) const;
  Action action(int b1, int b2, int j, int m) const;
};

/// Solves the two-parameter Bellman equations by Gauss-Seidel value iteration
/// from V = 0, sweeping states by increasing b1 + b2 (closest to the terminal
/// first). Guarantees a sup-norm Bellman residual <= opts.tol and V(0,0) = 0;
/// throws SolverError if the sweep budget runs out.
ReducedSolution solve_reduced(double s, double mu, CostParams params,
                              int B1max, int B2max, SolveOptions opts = {});

/// Full-model analogue of solve_reduced. Requires validate_model to pass.
/// With tasks pending and the terminal drained (b1 > 0, b2 = 0) the fetch
/// action is imposed rather than optimized, mirroring the reduced model
/// where holding there freezes the state; every policy in this family keeps
/// the terminal fed.
FullSolution solve_full(const FsmcModel& channel, const FsmcModel& processor,
                        CostParams params, int B1max, int B2max,
                        SolveOptions opts = {});

/// Decision statistic at an interior state (b1, b2 >= 1):
///   omega = s*mu*[V(b-e2) - V(b-e1)] + s*(1-mu)*[V(b) - V(b-e1+e2)],
/// the gap between the hold and fetch action values. omega <= 0 selects FEbar.
double omega(const ReducedSolution& sol, int b1, int b2);

/// Greedy action recomputed from the stored value table; the solver fills its
/// policy with exactly this rule (interior states via the sign of omega,
/// boundary columns by direct comparison of the two action values). Gaps
/// within 1e-9 of zero count as ties and resolve to FEbar, so indifference
/// sets cannot pick up noise-driven actions.
Action greedy_action(const ReducedSolution& sol, int b1, int b2);
Action greedy_action(const FullSolution& sol, int b1, int b2, int j, int m);

/// Per-column fetch thresholds of a policy grid. psi(b1) is the largest b2
/// with action FE in column b1 (-1 if the column never fetches), capped at
/// B2max so that columns saturated by the triangular truncation compare
/// consistently across b1.
struct SwitchoverCurve {
  Eigen::VectorXi psi;            ///< size B1max + 1
  bool is_switchover = false;     ///< FE set is a prefix per column and psi is non-decreasing
  int prefix_violations = 0;      ///< columns whose FE set is not a prefix {0..psi}
  int monotonicity_violations = 0;
};

SwitchoverCurve extract_switchover_curve(const PolicyGrid& policy, int B1max,
                                         int B2max);
SwitchoverCurve extract_switchover_curve(const ReducedSolution& sol);

}  // namespace prefetch
