#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace prefetch {

/// Per-slot control: fetch one task from the server over the link, or hold.
enum class Action : std::uint8_t { FEbar = 0, FE = 1 };

const char* to_string(Action a);

/// Full system state: queue backlogs plus channel and processor chain states.
/// Indices j and m are zero-based.
struct SystemState {
  int b1 = 0;  ///< tasks pending at the central server (queue 1)
  int b2 = 0;  ///< tasks buffered at the mobile terminal (queue 2)
  int j = 0;   ///< channel state index
  int m = 0;   ///< processor state index

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// Holding costs per slot: 1 per task at the server, c >= 1 per task at the
/// terminal. c is the congestion price that sweeps the tradeoff curve.
struct CostParams {
  double c = 1.0;
};

inline bool is_terminal(int b1, int b2) { return b1 == 0 && b2 == 0; }

/// Finite-state Markov chain with a per-state scalar attribute: the success
/// probability s(j) for the wireless link, or the service rate mu(m) for the
/// terminal processor. The chain advances once per slot regardless of the
/// chosen action. Immutable after construction.
class FsmcModel {
 public:
  /// Throws std::invalid_argument on shape errors (non-square matrix, size
  /// mismatch, empty chain). Value checks live in validate_model so that
  /// diagnostics can be reported rather than thrown.
  FsmcModel(Eigen::MatrixXd transition, Eigen::VectorXd attribute);

  int num_states() const { return static_cast<int>(attribute_.size()); }
  const Eigen::MatrixXd& transition_matrix() const { return transition_; }
  const Eigen::VectorXd& attribute() const { return attribute_; }
  double attr(int state) const { return attribute_(state); }
  double prob(int from, int to) const { return transition_(from, to); }

  /// Stationary distribution of the chain (row vector pi with pi P = pi).
  Eigen::VectorXd stationary_distribution() const;

  /// Single-state chain: the reduced model's constant-parameter special case.
  static FsmcModel single(double attribute_value);

  /// Two-state chain with stay probabilities p11, p22 and attributes a1, a2.
  static FsmcModel two_state(double p11, double p22, double a1, double a2);

 private:
  Eigen::MatrixXd transition_;
  Eigen::VectorXd attribute_;
};

/// Checks row-stochasticity, entry ranges, and strict positivity of every
/// attribute (positive rates are what guarantee the system drains). Returns
/// one human-readable diagnostic per violated invariant; empty means valid.
std::vector<std::string> validate_model(const FsmcModel& channel,
                                        const FsmcModel& processor);

/// Cost accrued in the slot's starting state, before any transition: b1 + c*b2.
double stage_cost(const SystemState& state, const CostParams& params);

/// One entry of a transition distribution over queue backlogs only.
struct QueueTransition {
  int b1;
  int b2;
  double p;
};

/// Exact one-slot backlog kernel for success probability s and service rate
/// mu, zero-probability entries dropped. Boundary behaviour:
///   - b1 == 0: FE is equivalent to FEbar (nothing to fetch).
///   - b2 == 0 under FEbar: backlogs frozen at (b1, 0).
///   - b2 == 0 under FE: a successfully fetched task can be served in the
///     same slot, so (b1-1, 0) carries probability s*mu.
/// Throws std::invalid_argument for the terminal state (0, 0).
std::vector<QueueTransition> queue_transitions(int b1, int b2, Action action,
                                               double s, double mu);

/// One entry of a full-state transition distribution.
struct Transition {
  SystemState to;
  double p;
};

/// Exact one-slot kernel for the full model: the backlog kernel at (s(j),
/// mu(m)) composed with one step of each chain. Zero-probability entries are
/// dropped. Throws std::invalid_argument for terminal states.
std::vector<Transition> transition_distribution(const SystemState& state,
                                                Action action,
                                                const FsmcModel& channel,
                                                const FsmcModel& processor);

}  // namespace prefetch
