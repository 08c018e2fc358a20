#include "prefetch/closed_form.hpp"

#include "prefetch/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace prefetch {

namespace {

void check_rates(double s, double mu, double c) {
  if (!(s > 0.0 && s <= 1.0) || !(mu > 0.0 && mu <= 1.0) || !(c >= 1.0)) {
    throw std::invalid_argument("closed form: requires s, mu in (0,1] and c >= 1");
  }
}

}  // namespace

QuadraticCost quadratic_of_never_fetch(double s, double mu, double c) {
  check_rates(s, mu, c);
  const double mb = 1.0 - mu;
  const double A = mb / mu + 1.0 / s;
  QuadraticCost q;
  q.alpha1 = A / 2.0;
  q.alpha2 = c / (2.0 * mu);
  q.gamma = 1.0 / mu;
  q.beta1 = A / 2.0 + (c - 1.0) * mb / mu;
  q.beta2 = c / (2.0 * mu);
  return q;
}

double cost_never_fetch(int b1, int b2, double s, double mu, double c) {
  return quadratic_of_never_fetch(s, mu, c).eval(b1, b2);
}

double cost_never_fetch_recursive(int b1, int b2, double s, double mu, double c) {
  check_rates(s, mu, c);
  const double mb = 1.0 - mu;
  const double A = mb / mu + 1.0 / s;
  double base = 0.0;
  for (int x = 1; x <= b1; ++x) {
    base += A * x + (c - 1.0) * mb / mu;
  }
  double cost = base;
  for (int y = 1; y <= b2; ++y) {
    cost += (b1 + c * y) / mu;
  }
  return cost;
}

int fluid_branch(int b1, int b2, double s, double mu) {
  if (s >= mu) return 1;
  const double t0 = b1 / s;
  const double t1 = b2 / (mu - s);
  return t1 < t0 ? 2 : 1;
}

QuadraticCost quadratic_of_always_fetch_fluid(double s, double mu, double c,
                                              int branch) {
  check_rates(s, mu, c);
  QuadraticCost q;
  if (branch == 1) {
    q.alpha1 = (c / mu - (c - 1.0) / s) / 2.0;
    q.alpha2 = c / (2.0 * mu);
    q.gamma = c / mu;
  } else if (branch == 2) {
    if (s >= mu) {
      throw std::invalid_argument(
          "quadratic_of_always_fetch_fluid: branch 2 requires s < mu");
    }
    q.alpha1 = 1.0 / (2.0 * s);
    q.alpha2 = c / (2.0 * (mu - s));
  } else {
    throw std::invalid_argument(
        "quadratic_of_always_fetch_fluid: branch must be 1 or 2");
  }
  return q;
}

double cost_always_fetch_fluid(int b1, int b2, double s, double mu, double c) {
  const int branch = fluid_branch(b1, b2, s, mu);
  return quadratic_of_always_fetch_fluid(s, mu, c, branch).eval(b1, b2);
}

double cost_always_fetch_exact(int b1, int b2, double s, double mu, double c) {
  check_rates(s, mu, c);
  if (b1 < 0 || b2 < 0) {
    throw std::invalid_argument("cost_always_fetch_exact: negative backlog");
  }
  const int cap = b1 + b2;
  // Column-major triangle C(x, y), x <= b1, x + y <= cap, filled by
  // increasing level so every referenced entry is already final; the x = 0
  // column never fetches by necessity, all other states fetch.
  std::vector<std::vector<double>> table(b1 + 1,
                                         std::vector<double>(cap + 1, 0.0));
  for (int level = 1; level <= cap; ++level) {
    for (int x = std::max(0, level - cap); x <= std::min(level, b1); ++x) {
      const int y = level - x;
      const Action a = x > 0 ? Action::FE : Action::FEbar;
      double rhs = x + c * y;
      double self = 0.0;
      for (const auto& t : queue_transitions(x, y, a, s, mu)) {
        if (t.b1 == x && t.b2 == y) {
          self = t.p;
        } else {
          rhs += t.p * table[t.b1][t.b2];
        }
      }
      table[x][y] = rhs / (1.0 - self);
    }
  }
  return table[b1][b2];
}

LinearDecision one_step_improvement_line(const QuadraticCost& q, double mu) {
  LinearDecision line;
  line.a1 = q.gamma - 2.0 * q.alpha1;
  line.a2 = 2.0 * q.alpha2 - q.gamma;
  line.a3 = q.alpha1 + (1.0 - 2.0 * mu) * q.alpha2 - q.beta1 + q.beta2 -
            (1.0 - mu) * q.gamma;
  return line;
}

double switchover_boundary(const LinearDecision& line, int b1) {
  constexpr double eps = 1e-12;
  const double offset = line.a1 * b1 + line.a3;
  if (std::abs(line.a2) > eps) {
    return -offset / line.a2;
  }
  return offset < 0.0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
}

}  // namespace prefetch
