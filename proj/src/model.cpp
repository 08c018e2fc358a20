#include "prefetch/model.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace prefetch {

const char* to_string(Action a) { return a == Action::FE ? "FE" : "FEbar"; }

FsmcModel::FsmcModel(Eigen::MatrixXd transition, Eigen::VectorXd attribute)
    : transition_(std::move(transition)), attribute_(std::move(attribute)) {
  if (attribute_.size() == 0) {
    throw std::invalid_argument("FsmcModel: chain must have at least one state");
  }
  if (transition_.rows() != transition_.cols()) {
    throw std::invalid_argument("FsmcModel: transition matrix must be square");
  }
  if (transition_.rows() != attribute_.size()) {
    throw std::invalid_argument(
        "FsmcModel: attribute length must match transition matrix dimension");
  }
}

Eigen::VectorXd FsmcModel::stationary_distribution() const {
  const int n = num_states();
  if (n == 1) return Eigen::VectorXd::Ones(1);
  // Solve pi P = pi, sum(pi) = 1 by replacing one balance equation with the
  // normalization constraint.
  Eigen::MatrixXd a = transition_.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  return a.fullPivLu().solve(rhs);
}

FsmcModel FsmcModel::single(double attribute_value) {
  Eigen::MatrixXd p(1, 1);
  p(0, 0) = 1.0;
  Eigen::VectorXd a(1);
  a(0) = attribute_value;
  return FsmcModel(std::move(p), std::move(a));
}

FsmcModel FsmcModel::two_state(double p11, double p22, double a1, double a2) {
  Eigen::MatrixXd p(2, 2);
  p << p11, 1.0 - p11, 1.0 - p22, p22;
  Eigen::VectorXd a(2);
  a << a1, a2;
  return FsmcModel(std::move(p), std::move(a));
}

namespace {

void validate_chain(const FsmcModel& chain, const std::string& label,
                    std::vector<std::string>& out) {
  const auto& p = chain.transition_matrix();
  for (int i = 0; i < chain.num_states(); ++i) {
    double row_sum = 0.0;
    for (int k = 0; k < chain.num_states(); ++k) {
      const double v = p(i, k);
      if (v < 0.0 || v > 1.0) {
        out.push_back(label + ": transition entry (" + std::to_string(i) + "," +
                      std::to_string(k) + ") outside [0,1]");
      }
      row_sum += v;
    }
    if (std::abs(row_sum - 1.0) > 1e-12) {
      out.push_back(label + ": row " + std::to_string(i) + " sum != 1");
    }
  }
  for (int i = 0; i < chain.num_states(); ++i) {
    const double v = chain.attr(i);
    if (!(v > 0.0)) {
      out.push_back(label + ": rate must be > 0 in state " + std::to_string(i));
    } else if (v > 1.0) {
      out.push_back(label + ": rate must be <= 1 in state " + std::to_string(i));
    }
  }
}

}  // namespace

std::vector<std::string> validate_model(const FsmcModel& channel,
                                        const FsmcModel& processor) {
  std::vector<std::string> diagnostics;
  validate_chain(channel, "channel", diagnostics);
  validate_chain(processor, "processor", diagnostics);
  return diagnostics;
}

double stage_cost(const SystemState& state, const CostParams& params) {
  return state.b1 + params.c * state.b2;
}

std::vector<QueueTransition> queue_transitions(int b1, int b2, Action action,
                                               double s, double mu) {
  if (is_terminal(b1, b2)) {
    throw std::invalid_argument("queue_transitions: terminal state has no transitions");
  }
  if (b1 == 0) action = Action::FEbar;  // nothing to fetch

  std::vector<QueueTransition> out;
  out.reserve(4);
  auto add = [&out](int nb1, int nb2, double p) {
    if (p > 0.0) out.push_back({nb1, nb2, p});
  };

  const double sb = 1.0 - s;
  const double mb = 1.0 - mu;
  if (action == Action::FEbar) {
    if (b2 > 0) {
      add(b1, b2 - 1, mu);
      add(b1, b2, mb);
    } else {
      add(b1, 0, 1.0);  // backlogs frozen; only the chains move
    }
  } else {
    if (b2 > 0) {
      add(b1 - 1, b2, s * mu);
      add(b1, b2 - 1, sb * mu);
      add(b1 - 1, b2 + 1, s * mb);
      add(b1, b2, sb * mb);
    } else {
      add(b1 - 1, 0, s * mu);  // fetched and served within the slot
      add(b1 - 1, 1, s * mb);
      add(b1, 0, sb);
    }
  }
  return out;
}

std::vector<Transition> transition_distribution(const SystemState& state,
                                                Action action,
                                                const FsmcModel& channel,
                                                const FsmcModel& processor) {
  const auto queue = queue_transitions(state.b1, state.b2, action,
                                       channel.attr(state.j),
                                       processor.attr(state.m));
  std::vector<Transition> out;
  out.reserve(queue.size() * channel.num_states() * processor.num_states());
  for (const auto& q : queue) {
    for (int j2 = 0; j2 < channel.num_states(); ++j2) {
      const double pj = channel.prob(state.j, j2);
      if (pj == 0.0) continue;
      for (int m2 = 0; m2 < processor.num_states(); ++m2) {
        const double p = q.p * pj * processor.prob(state.m, m2);
        if (p > 0.0) out.push_back({{q.b1, q.b2, j2, m2}, p});
      }
    }
  }
  return out;
}

}  // namespace prefetch
