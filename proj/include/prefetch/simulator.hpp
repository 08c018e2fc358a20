#pragma once

#include "prefetch/model.hpp"
#include "prefetch/policies.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prefetch {

/// Splitmix-style generator; one independent stream per episode, seeded by
/// base_seed + episode index. Cheap to construct, no shared state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  /// Uniform variate in [0, 1) with 53 random bits.
  double next_uniform();

 private:
  std::uint64_t state_;
};

/// A complete simulation setting: the two chains, initial backlogs, the c
/// sweep grid, batch size, and seeding. The chain start is sampled from the
/// stationary distributions unless initial_jm pins it.
struct ScenarioConfig {
  ScenarioConfig(FsmcModel channel, FsmcModel processor)
      : channel(std::move(channel)), processor(std::move(processor)) {}

  std::string name = "custom";
  FsmcModel channel;
  FsmcModel processor;
  int initial_b1 = 20;
  int initial_b2 = 0;
  std::vector<double> c_values = {1.0};
  int episodes = 5000;
  std::uint64_t base_seed = 12345;
  std::optional<std::pair<int, int>> initial_jm;

  /// Spread of the channel success probability, s(last) - s(first).
  double delta_s() const;
  /// Spread of expected per-task service time, 1/mu(last) - 1/mu(first).
  double delta_mu() const;
};

/// One diagnostic per violated invariant (models, backlogs, episodes, c
/// values); empty means usable.
std::vector<std::string> validate_scenario(const ScenarioConfig& config);

/// Scenario with single-state chains, for the two-parameter model.
ScenarioConfig reduced_scenario(double s, double mu);

struct EpisodeResult {
  double total_cost = 0.0;
  long long slots = 0;
  /// Slots each task spent contributing to stage cost, in completion order
  /// (completion order equals task id order under FIFO service).
  std::vector<int> per_task_delay;
  double time_avg_b2 = 0.0;
};

struct BatchResult {
  int episodes = 0;
  double mean_cost = 0.0;
  double ci_cost = 0.0;
  double b2_ave = 0.0;
  double ci_b2 = 0.0;
  double d_ave = 0.0;
  double ci_d = 0.0;
};

/// One point of a congestion-vs-latency curve; field order matches the CSV
/// column order `c,b2_ave,ci_b2,d_ave,ci_d,mean_cost,episodes`.
struct TradeoffPoint {
  double c = 1.0;
  double b2_ave = 0.0;
  double ci_b2 = 0.0;
  double d_ave = 0.0;
  double ci_d = 0.0;
  double mean_cost = 0.0;
  int episodes = 0;
};

/// Thrown when an episode exceeds the hard slot cap (10^7); with positive
/// rates and a policy that eventually fetches this indicates a bug.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plays one episode from (initial_b1, initial_b2) until both queues drain.
/// Per slot the stream is consumed in the fixed order (policy randomization,
/// fetch success, service completion, channel transition, processor
/// transition) - five draws every slot regardless of use - preceded by two
/// draws for the stationary chain start (none when initial_jm is set). This
/// order is normative: identical seeds give bit-identical episodes. Stage
/// cost b1 + c*b2 accrues in each slot's starting state.
EpisodeResult run_episode(const ScenarioConfig& scenario,
                          const FetchPolicy& policy, double c,
                          std::uint64_t seed);

/// Runs `episodes` independent episodes seeded base_seed + index and
/// aggregates exact means with normal-approximation 95% confidence
/// half-widths (NaN when episodes == 1). Results are reduced in index
/// order, so the aggregate does not depend on execution interleaving.
BatchResult run_batch(const ScenarioConfig& scenario, const FetchPolicy& policy,
                      double c, int episodes);

/// Sweeps scenario.c_values: rebuilds the named policy at each c ("opt"
/// re-solves the full model; "fon"/"rfon" see c through their observables;
/// "always"/"never" ignore it) and runs one batch per c.
std::vector<TradeoffPoint> sweep_c(const ScenarioConfig& scenario,
                                   const std::string& policy_name);

/// The eight named operating regimes: {slow,fast} fading crossed with
/// channel spread ds in {0.8, 0.1} and service-time spread dmu in
/// {8.89, 1.67}. Names look like "slow_ds08_dmu889". Chains transition with
/// p11 = p22 = 0.9 (slow) or 0.1 (fast); q11 = 0.5, q22 = 0.3;
/// ds=0.8 -> s = (0.1, 0.9), ds=0.1 -> s = (0.4, 0.5);
/// dmu=8.89 -> mu = (0.9, 0.1), dmu=1.67 -> mu = (0.6, 0.3);
/// 20 tasks initially at the CS, c swept over default_c_values().
ScenarioConfig scenario_preset(const std::string& name);
const std::vector<std::string>& preset_names();

/// Twenty log-spaced c values from 1 to 100 inclusive.
std::vector<double> default_c_values();

}  // namespace prefetch
