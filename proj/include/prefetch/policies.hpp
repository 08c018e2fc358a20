#pragma once

#include "prefetch/model.hpp"
#include "prefetch/solver.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

namespace prefetch {

/// What a policy sees each slot: backlogs, the instantaneous success
/// probability and service rate (perfect estimates of s(j), mu(m)), the
/// congestion price in force, and, for the lookup-table policy only, the true
/// chain indices.
struct Observables {
  int b1 = 0;
  int b2 = 0;
  double s_hat = 1.0;
  double mu_hat = 1.0;
  double c_hat = 1.0;
  int j = -1;
  int m = -1;
};

/// Uniform decision interface. `u` is a pre-drawn uniform variate in [0, 1)
/// supplied by the caller once per decision; deterministic policies ignore
/// it, so every policy consumes exactly one variate per slot.
class FetchPolicy {
 public:
  virtual ~FetchPolicy() = default;
  virtual Action decide(const Observables& obs, double u) const = 0;
  virtual std::string name() const = 0;
};

/// Optimal policy served from a solved full-model lookup table. Throws
/// std::out_of_range if asked about a state outside the solved grid.
class OptPolicy final : public FetchPolicy {
 public:
  explicit OptPolicy(std::shared_ptr<const FullSolution> lut);
  Action decide(const Observables& obs, double u) const override;
  std::string name() const override { return "opt"; }
  const FullSolution& lut() const { return *lut_; }

 private:
  std::shared_ptr<const FullSolution> lut_;
};

/// Fetch-on-need heuristic: treats the instantaneous (s_hat, mu_hat, c_hat)
/// as frozen, solves the two-parameter model at those values, and acts by
/// that solution. Solutions are cached under the parameters quantized to
/// 1e-6 (plus the grid size), so each operating point is solved at most
/// once; the cache accepts concurrent readers.
class FonPolicy final : public FetchPolicy {
 public:
  FonPolicy(int B1max, int B2max, SolveOptions opts = {});
  Action decide(const Observables& obs, double u) const override;
  std::string name() const override { return "fon"; }
  std::size_t cache_size() const;

 private:
  struct Key {
    long long s;
    long long mu;
    long long c;
    friend bool operator<(const Key& a, const Key& b) {
      return std::tie(a.s, a.mu, a.c) < std::tie(b.s, b.mu, b.c);
    }
  };
  std::shared_ptr<const ReducedSolution> lookup(double s, double mu,
                                                double c) const;
  int B1max_;
  int B2max_;
  SolveOptions opts_;
  mutable std::shared_mutex mutex_;
  mutable std::map<Key, std::shared_ptr<const ReducedSolution>> cache_;
};

/// Probability that the randomized cone rule holds (does not fetch) at
/// (b1, b2) under instantaneous parameters (s, mu, c). The cone is bounded
/// by the switchover thresholds of the one-step improvements of the
/// never-fetch cost and the fluid always-fetch cost (branch chosen by the
/// state); the probability is 0 on or below the lower threshold, 1 on or
/// above the upper one, and interpolates linearly in between. If only one
/// threshold is finite the interior falls through to fetching, which keeps
/// the rule free of absorbing no-fetch states. When the always-fetch
/// threshold lies below the never-fetch one the two are swapped and
/// *inversions (when given) is incremented.
double rand_prob_febar(int b1, int b2, double s, double mu, double c,
                       long long* inversions = nullptr);

/// One randomized cone decision; u is a uniform variate in [0, 1).
Action rand_decide(const Observables& obs, double u,
                   long long* inversions = nullptr);

/// Randomized fetch-on-need: the cone rule applied at the instantaneous
/// operating point, replacing FON's inner solve with two line evaluations.
class RfonPolicy final : public FetchPolicy {
 public:
  Action decide(const Observables& obs, double u) const override;
  std::string name() const override { return "rfon"; }
  long long inversions() const { return inversions_.load(); }

 private:
  mutable std::atomic<long long> inversions_{0};
};

/// Fetches whenever the CS queue is nonempty.
class AlwaysFetchPolicy final : public FetchPolicy {
 public:
  Action decide(const Observables& obs, double u) const override;
  std::string name() const override { return "always"; }
};

/// Fetches only when the MT queue is empty (and the CS queue is not).
class NeverFetchPolicy final : public FetchPolicy {
 public:
  Action decide(const Observables& obs, double u) const override;
  std::string name() const override { return "never"; }
};

/// Stable CLI identifiers: {"opt", "fon", "rfon", "always", "never"}.
const std::vector<std::string>& policy_names();

/// Builds a policy by name for a run over the given models, initial
/// backlogs, and congestion price. "opt" solves the full model on the grid
/// B1max = initial_b1, B2max = initial_b1 + initial_b2 (the exact reachable
/// set of the draining system); "fon"/"rfon" read their parameters from the
/// per-slot observables. Unknown names throw std::invalid_argument.
std::unique_ptr<FetchPolicy> make_policy(const std::string& name,
                                         const FsmcModel& channel,
                                         const FsmcModel& processor,
                                         int initial_b1, int initial_b2,
                                         CostParams params);

}  // namespace prefetch
