#include "prefetch/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace prefetch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Action-value gaps smaller than this resolve to FEbar. Converged values
// carry rounding at the tolerance scale, so a raw sign test would pick
// arbitrary actions on indifference sets (exact ties occur, e.g. at s = mu
// with c near 1) and could break the per-column prefix structure.
constexpr double kTieMargin = 1e-9;
}

double ReducedSolution::V(int b1, int b2) const {
  if (!in_grid(b1, b2)) {
    throw std::out_of_range("ReducedSolution::V: state outside grid");
  }
  return value(b1, b2);
}

Action ReducedSolution::action(int b1, int b2) const {
  if (!in_grid(b1, b2)) {
    throw std::out_of_range("ReducedSolution::action: state outside grid");
  }
  return static_cast<Action>(policy(b1, b2));
}

std::size_t FullSolution::index(int b1, int b2, int j, int m) const {
  const std::size_t cols = static_cast<std::size_t>(level_cap()) + 1;
  const std::size_t jm = static_cast<std::size_t>(channel.num_states()) *
                         static_cast<std::size_t>(processor.num_states());
  return ((static_cast<std::size_t>(b1) * cols + static_cast<std::size_t>(b2)) * jm) +
         static_cast<std::size_t>(j) * processor.num_states() + static_cast<std::size_t>(m);
}

double FullSolution::V(int b1, int b2, int j, int m) const {
  if (!in_grid(b1, b2) || j < 0 || j >= channel.num_states() || m < 0 ||
      m >= processor.num_states()) {
    throw std::out_of_range("FullSolution::V: state outside grid");
  }
  return value[index(b1, b2, j, m)];
}

Action FullSolution::action(int b1, int b2, int j, int m) const {
  if (!in_grid(b1, b2) || j < 0 || j >= channel.num_states() || m < 0 ||
      m >= processor.num_states()) {
    throw std::out_of_range("FullSolution::action: state outside grid");
  }
  return static_cast<Action>(policy[index(b1, b2, j, m)]);
}

double omega(const ReducedSolution& sol, int b1, int b2) {
  if (b1 < 1 || b2 < 1 || !sol.in_grid(b1, b2)) {
    throw std::out_of_range("omega: requires an interior grid state (b1, b2 >= 1)");
  }
  const double s = sol.s;
  const double mu = sol.mu;
  return s * mu * (sol.value(b1, b2 - 1) - sol.value(b1 - 1, b2)) +
         s * (1.0 - mu) * (sol.value(b1, b2) - sol.value(b1 - 1, b2 + 1));
}

Action greedy_action(const ReducedSolution& sol, int b1, int b2) {
  if (!sol.in_grid(b1, b2)) {
    throw std::out_of_range("greedy_action: state outside grid");
  }
  if (b1 == 0) return Action::FEbar;
  if (b2 == 0) {
    const double s = sol.s;
    const double mu = sol.mu;
    const double hold = sol.value(b1, 0);
    const double fetch = s * mu * sol.value(b1 - 1, 0) +
                         s * (1.0 - mu) * sol.value(b1 - 1, 1) +
                         (1.0 - s) * sol.value(b1, 0);
    return fetch < hold ? Action::FE : Action::FEbar;
  }
  return omega(sol, b1, b2) > kTieMargin ? Action::FE : Action::FEbar;
}

ReducedSolution solve_reduced(double s, double mu, CostParams params,
                              int B1max, int B2max, SolveOptions opts) {
  if (!(s > 0.0 && s <= 1.0) || !(mu > 0.0 && mu <= 1.0)) {
    throw std::invalid_argument("solve_reduced: s and mu must lie in (0, 1]");
  }
  if (params.c < 1.0) {
    throw std::invalid_argument("solve_reduced: c must be >= 1");
  }
  if (B1max < 0 || B2max < 0 || opts.tol <= 0.0) {
    throw std::invalid_argument("solve_reduced: bad grid size or tolerance");
  }

  ReducedSolution sol;
  sol.s = s;
  sol.mu = mu;
  sol.c = params.c;
  sol.B1max = B1max;
  sol.B2max = B2max;
  const int cap = sol.level_cap();
  sol.value = Eigen::MatrixXd::Zero(B1max + 1, cap + 1);
  sol.policy = PolicyGrid::Zero(B1max + 1, cap + 1);

  const double sb = 1.0 - s;
  const double mb = 1.0 - mu;
  auto& v = sol.value;

  // In-place Gauss-Seidel value iteration, states ordered by increasing
  // b1 + b2 and by b1 within a level. Each update solves the one-state
  // fixed point per action (the self-loop probability is eliminated), which
  // makes the sweep exact on the acyclic backlog graph: reduced instances
  // converge in one pass.
  auto sweep = [&]() {
    double delta = 0.0;
    for (int level = 1; level <= cap; ++level) {
      const int b1_lo = std::max(0, level - cap);
      const int b1_hi = std::min(level, B1max);
      for (int b1 = b1_lo; b1 <= b1_hi; ++b1) {
        const int b2 = level - b1;
        const double stage = b1 + params.c * b2;
        double hold;
        if (b2 > 0) {
          hold = (stage + mu * v(b1, b2 - 1)) / mu;
        } else {
          hold = kInf;  // holding at (b1, 0) freezes the queues forever
        }
        double fetch = kInf;
        if (b1 > 0) {
          if (b2 > 0) {
            fetch = (stage + s * mu * v(b1 - 1, b2) + sb * mu * v(b1, b2 - 1) +
                     s * mb * v(b1 - 1, b2 + 1)) /
                    (1.0 - sb * mb);
          } else {
            fetch = (stage + s * mu * v(b1 - 1, 0) + s * mb * v(b1 - 1, 1)) / s;
          }
        }
        const double next = std::min(hold, fetch);
        delta = std::max(delta, std::abs(next - v(b1, b2)));
        v(b1, b2) = next;
      }
    }
    return delta;
  };

  // Plain Bellman residual (no self-loop elimination), the contract metric.
  auto residual = [&]() {
    double r = 0.0;
    for (int level = 1; level <= cap; ++level) {
      const int b1_lo = std::max(0, level - cap);
      const int b1_hi = std::min(level, B1max);
      for (int b1 = b1_lo; b1 <= b1_hi; ++b1) {
        const int b2 = level - b1;
        const double stage = b1 + params.c * b2;
        const double hold = b2 > 0 ? mu * v(b1, b2 - 1) + mb * v(b1, b2) : v(b1, 0);
        double fetch = kInf;
        if (b1 > 0) {
          fetch = b2 > 0 ? s * mu * v(b1 - 1, b2) + sb * mu * v(b1, b2 - 1) +
                               s * mb * v(b1 - 1, b2 + 1) + sb * mb * v(b1, b2)
                         : s * mu * v(b1 - 1, 0) + s * mb * v(b1 - 1, 1) + sb * v(b1, 0);
        }
        r = std::max(r, std::abs(stage + std::min(hold, fetch) - v(b1, b2)));
      }
    }
    return r;
  };

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    const double delta = sweep();
    sol.iterations = iter;
    if (delta <= 0.1 * opts.tol) {
      sol.residual = residual();
      if (sol.residual <= opts.tol) {
        for (int level = 1; level <= cap; ++level) {
          const int b1_hi = std::min(level, B1max);
          for (int b1 = std::max(0, level - cap); b1 <= b1_hi; ++b1) {
            sol.policy(b1, level - b1) =
                static_cast<std::uint8_t>(greedy_action(sol, b1, level - b1));
          }
        }
        return sol;
      }
    }
  }
  throw SolverError("solve_reduced: no convergence within max_iters", residual(),
                    sol.iterations);
}

namespace {

// Shared backup machinery for the full model. Reads the value table in
// place, so Gauss-Seidel sweeps see fresh values as they are written.
struct FullWork {
  const FsmcModel& channel;
  const FsmcModel& processor;
  double c;
  int B1max;
  int cap;
  int J;
  int M;
  const std::vector<double>& v;

  std::size_t idx(int b1, int b2, int j, int m) const {
    const std::size_t cols = static_cast<std::size_t>(cap) + 1;
    return ((static_cast<std::size_t>(b1) * cols + b2) * J + j) * M + m;
  }

  // Expectation of V(b1, b2, ., .) over one step of both chains from (j, m).
  double expect(int b1, int b2, int j, int m) const {
    double e = 0.0;
    for (int j2 = 0; j2 < J; ++j2) {
      const double pj = channel.prob(j, j2);
      if (pj == 0.0) continue;
      double inner = 0.0;
      for (int m2 = 0; m2 < M; ++m2) {
        inner += processor.prob(m, m2) * v[idx(b1, b2, j2, m2)];
      }
      e += pj * inner;
    }
    return e;
  }

  // Plain action values (self terms included) from the current table.
  double hold_arg(int b1, int b2, int j, int m) const {
    const double mu = processor.attr(m);
    return b2 > 0 ? mu * expect(b1, b2 - 1, j, m) + (1.0 - mu) * expect(b1, b2, j, m)
                  : expect(b1, 0, j, m);
  }

  double fetch_arg(int b1, int b2, int j, int m) const {
    const double s = channel.attr(j);
    const double mu = processor.attr(m);
    if (b2 > 0) {
      return s * mu * expect(b1 - 1, b2, j, m) +
             (1.0 - s) * mu * expect(b1, b2 - 1, j, m) +
             s * (1.0 - mu) * expect(b1 - 1, b2 + 1, j, m) +
             (1.0 - s) * (1.0 - mu) * expect(b1, b2, j, m);
    }
    return s * mu * expect(b1 - 1, 0, j, m) + s * (1.0 - mu) * expect(b1 - 1, 1, j, m) +
           (1.0 - s) * expect(b1, 0, j, m);
  }
};

}  // namespace

Action greedy_action(const FullSolution& sol, int b1, int b2, int j, int m) {
  if (!sol.in_grid(b1, b2) || j < 0 || j >= sol.channel.num_states() || m < 0 ||
      m >= sol.processor.num_states()) {
    throw std::out_of_range("greedy_action: state outside grid");
  }
  if (b1 == 0) return Action::FEbar;
  if (b2 == 0) return Action::FE;
  FullWork w{sol.channel, sol.processor, sol.c, sol.B1max, sol.level_cap(),
             sol.channel.num_states(), sol.processor.num_states(), sol.value};
  return w.fetch_arg(b1, b2, j, m) < w.hold_arg(b1, b2, j, m) - kTieMargin
             ? Action::FE
             : Action::FEbar;
}

FullSolution solve_full(const FsmcModel& channel, const FsmcModel& processor,
                        CostParams params, int B1max, int B2max, SolveOptions opts) {
  if (const auto diags = validate_model(channel, processor); !diags.empty()) {
    throw std::invalid_argument("solve_full: invalid model: " + diags.front());
  }
  if (params.c < 1.0) {
    throw std::invalid_argument("solve_full: c must be >= 1");
  }
  if (B1max < 0 || B2max < 0 || opts.tol <= 0.0) {
    throw std::invalid_argument("solve_full: bad grid size or tolerance");
  }

  FullSolution sol{channel, processor, params.c, B1max, B2max, {}, {}, 0, 0.0};
  const int cap = sol.level_cap();
  const int J = channel.num_states();
  const int M = processor.num_states();
  const std::size_t total = static_cast<std::size_t>(B1max + 1) * (cap + 1) * J * M;
  sol.value.assign(total, 0.0);
  sol.policy.assign(total, static_cast<std::uint8_t>(Action::FEbar));

  FullWork w{channel, processor, params.c, B1max, cap, J, M, sol.value};

  // Gauss-Seidel sweep with per-state self-loop elimination. Within a backlog
  // level only the chain coupling carries old values, so a handful of sweeps
  // reaches the fixed point.
  auto sweep = [&]() {
    double delta = 0.0;
    for (int level = 1; level <= cap; ++level) {
      const int b1_lo = std::max(0, level - cap);
      const int b1_hi = std::min(level, B1max);
      for (int b1 = b1_lo; b1 <= b1_hi; ++b1) {
        const int b2 = level - b1;
        for (int j = 0; j < J; ++j) {
          for (int m = 0; m < M; ++m) {
            const double stage = b1 + params.c * b2;
            const double s = channel.attr(j);
            const double mu = processor.attr(m);
            const double pq_self = channel.prob(j, j) * processor.prob(m, m);
            const double self_v = w.v[w.idx(b1, b2, j, m)];
            double hold;
            if (b2 > 0) {
              const double arg = mu * w.expect(b1, b2 - 1, j, m) +
                                 (1.0 - mu) * w.expect(b1, b2, j, m);
              const double q = (1.0 - mu) * pq_self;
              hold = (stage + arg - q * self_v) / (1.0 - q);
            } else {
              const double arg = w.expect(b1, 0, j, m);
              const double q = pq_self;
              hold = q < 1.0 ? (stage + arg - q * self_v) / (1.0 - q) : kInf;
            }
            double fetch = kInf;
            if (b1 > 0) {
              if (b2 > 0) {
                const double arg = s * mu * w.expect(b1 - 1, b2, j, m) +
                                   (1.0 - s) * mu * w.expect(b1, b2 - 1, j, m) +
                                   s * (1.0 - mu) * w.expect(b1 - 1, b2 + 1, j, m) +
                                   (1.0 - s) * (1.0 - mu) * w.expect(b1, b2, j, m);
                const double q = (1.0 - s) * (1.0 - mu) * pq_self;
                fetch = (stage + arg - q * self_v) / (1.0 - q);
              } else {
                const double arg = s * mu * w.expect(b1 - 1, 0, j, m) +
                                   s * (1.0 - mu) * w.expect(b1 - 1, 1, j, m) +
                                   (1.0 - s) * w.expect(b1, 0, j, m);
                const double q = (1.0 - s) * pq_self;
                fetch = (stage + arg - q * self_v) / (1.0 - q);
              }
            }
            // A drained terminal with tasks pending always attempts a fetch:
            // admissible policies keep the terminal fed, matching the reduced
            // dynamics where holding at b2 = 0 freezes the state outright.
            const double next =
                (b1 > 0 && b2 == 0) ? fetch : std::min(hold, fetch);
            delta = std::max(delta, std::abs(next - self_v));
            sol.value[w.idx(b1, b2, j, m)] = next;
          }
        }
      }
    }
    return delta;
  };

  auto residual = [&]() {
    double r = 0.0;
    for (int level = 1; level <= cap; ++level) {
      const int b1_hi = std::min(level, B1max);
      for (int b1 = std::max(0, level - cap); b1 <= b1_hi; ++b1) {
        const int b2 = level - b1;
        for (int j = 0; j < J; ++j) {
          for (int m = 0; m < M; ++m) {
            const double stage = b1 + params.c * b2;
            double best;
            if (b1 > 0 && b2 == 0) {
              best = w.fetch_arg(b1, 0, j, m);
            } else {
              best = w.hold_arg(b1, b2, j, m);
              if (b1 > 0) best = std::min(best, w.fetch_arg(b1, b2, j, m));
            }
            r = std::max(r, std::abs(stage + best - w.v[w.idx(b1, b2, j, m)]));
          }
        }
      }
    }
    return r;
  };

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    const double delta = sweep();
    sol.iterations = iter;
    if (delta <= 0.1 * opts.tol) {
      sol.residual = residual();
      if (sol.residual <= opts.tol) {
        for (int level = 1; level <= cap; ++level) {
          const int b1_hi = std::min(level, B1max);
          for (int b1 = std::max(0, level - cap); b1 <= b1_hi; ++b1) {
            const int b2 = level - b1;
            for (int j = 0; j < J; ++j) {
              for (int m = 0; m < M; ++m) {
                sol.policy[sol.index(b1, b2, j, m)] =
                    static_cast<std::uint8_t>(greedy_action(sol, b1, b2, j, m));
              }
            }
          }
        }
        return sol;
      }
    }
  }
  throw SolverError("solve_full: no convergence within max_iters", residual(),
                    sol.iterations);
}

SwitchoverCurve extract_switchover_curve(const PolicyGrid& policy, int B1max,
                                         int B2max) {
  SwitchoverCurve curve;
  const int cap = B1max + B2max;
  curve.psi = Eigen::VectorXi::Constant(B1max + 1, -1);
  for (int b1 = 0; b1 <= B1max; ++b1) {
    const int top = cap - b1;
    int raw = -1;
    for (int b2 = top; b2 >= 0; --b2) {
      if (static_cast<Action>(policy(b1, b2)) == Action::FE) {
        raw = b2;
        break;
      }
    }
    for (int b2 = 0; b2 < raw; ++b2) {
      if (static_cast<Action>(policy(b1, b2)) != Action::FE) {
        ++curve.prefix_violations;
        break;
      }
    }
    curve.psi(b1) = std::min(raw, B2max);
  }
  for (int b1 = 1; b1 <= B1max; ++b1) {
    if (curve.psi(b1) < curve.psi(b1 - 1)) ++curve.monotonicity_violations;
  }
  curve.is_switchover =
      curve.prefix_violations == 0 && curve.monotonicity_violations == 0;
  return curve;
}

SwitchoverCurve extract_switchover_curve(const ReducedSolution& sol) {
  return extract_switchover_curve(sol.policy, sol.B1max, sol.B2max);
}

}  // namespace prefetch
