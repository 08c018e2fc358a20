#include "prefetch/policies.hpp"

#include "prefetch/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace prefetch {

OptPolicy::OptPolicy(std::shared_ptr<const FullSolution> lut)
    : lut_(std::move(lut)) {
  if (!lut_) {
    throw std::invalid_argument("OptPolicy: null lookup table");
  }
}

Action OptPolicy::decide(const Observables& obs, double) const {
  if (obs.b1 == 0) return Action::FEbar;
  return lut_->action(obs.b1, obs.b2, obs.j, obs.m);
}

FonPolicy::FonPolicy(int B1max, int B2max, SolveOptions opts)
    : B1max_(B1max), B2max_(B2max), opts_(opts) {
  if (B1max < 0 || B2max < 0) {
    throw std::invalid_argument("FonPolicy: negative grid size");
  }
}

std::shared_ptr<const ReducedSolution> FonPolicy::lookup(double s, double mu,
                                                         double c) const {
  const Key key{std::llround(s * 1e6), std::llround(mu * 1e6),
                std::llround(c * 1e6)};
  {
    std::shared_lock lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::unique_lock lock(mutex_);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  auto sol = std::make_shared<const ReducedSolution>(
      solve_reduced(s, mu, CostParams{c}, B1max_, B2max_, opts_));
  cache_.emplace(key, sol);
  return sol;
}

Action FonPolicy::decide(const Observables& obs, double) const {
  if (obs.b1 == 0) return Action::FEbar;
  return lookup(obs.s_hat, obs.mu_hat, obs.c_hat)->action(obs.b1, obs.b2);
}

std::size_t FonPolicy::cache_size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

double rand_prob_febar(int b1, int b2, double s, double mu, double c,
                       long long* inversions) {
  if (b1 <= 0) return 1.0;
  const LinearDecision never_line =
      one_step_improvement_line(quadratic_of_never_fetch(s, mu, c), mu);
  const int branch = fluid_branch(b1, b2, s, mu);
  const LinearDecision always_line = one_step_improvement_line(
      quadratic_of_always_fetch_fluid(s, mu, c, branch), mu);
  const double t_never = switchover_boundary(never_line, b1);
  const double t_always = switchover_boundary(always_line, b1);
  double lower = t_never;
  double upper = t_always;
  if (t_always < t_never) {
    lower = t_always;
    upper = t_never;
    if (inversions != nullptr) ++*inversions;
  }
  if (b2 >= upper) return 1.0;
  if (b2 <= lower) return 0.0;
  if (std::isfinite(lower) && std::isfinite(upper)) {
    return (b2 - lower) / (upper - lower);
  }
  return 0.0;
}

Action rand_decide(const Observables& obs, double u, long long* inversions) {
  const double p = rand_prob_febar(obs.b1, obs.b2, obs.s_hat, obs.mu_hat,
                                   obs.c_hat, inversions);
  return u < p ? Action::FEbar : Action::FE;
}

Action RfonPolicy::decide(const Observables& obs, double u) const {
  long long inv = 0;
  const Action a = rand_decide(obs, u, &inv);
  if (inv != 0) inversions_.fetch_add(inv, std::memory_order_relaxed);
  return a;
}

Action AlwaysFetchPolicy::decide(const Observables& obs, double) const {
  return obs.b1 > 0 ? Action::FE : Action::FEbar;
}

Action NeverFetchPolicy::decide(const Observables& obs, double) const {
  return obs.b1 > 0 && obs.b2 == 0 ? Action::FE : Action::FEbar;
}

const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names = {"opt", "fon", "rfon", "always",
                                                 "never"};
  return names;
}

std::unique_ptr<FetchPolicy> make_policy(const std::string& name,
                                         const FsmcModel& channel,
                                         const FsmcModel& processor,
                                         int initial_b1, int initial_b2,
                                         CostParams params) {
  const int B1max = initial_b1;
  const int B2max = initial_b1 + initial_b2;
  if (name == "opt") {
    auto lut = std::make_shared<const FullSolution>(
        solve_full(channel, processor, params, B1max, B2max));
    return std::make_unique<OptPolicy>(lut);
  }
  if (name == "fon") return std::make_unique<FonPolicy>(B1max, B2max);
  if (name == "rfon") return std::make_unique<RfonPolicy>();
  if (name == "always") return std::make_unique<AlwaysFetchPolicy>();
  if (name == "never") return std::make_unique<NeverFetchPolicy>();
  throw std::invalid_argument("make_policy: unknown policy '" + name + "'");
}

}  // namespace prefetch
