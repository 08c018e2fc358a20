#include "prefetch/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace prefetch {

namespace {

constexpr long long kSlotCap = 10'000'000;
constexpr double kZ95 = 1.959963984540054;

int sample_index(const Eigen::VectorXd& probs, double u) {
  double acc = 0.0;
  const int n = static_cast<int>(probs.size());
  for (int i = 0; i < n; ++i) {
    acc += probs(i);
    if (u < acc) return i;
  }
  return n - 1;
}

int sample_row(const Eigen::MatrixXd& matrix, int row, double u) {
  double acc = 0.0;
  const int n = static_cast<int>(matrix.cols());
  for (int i = 0; i < n; ++i) {
    acc += matrix(row, i);
    if (u < acc) return i;
  }
  return n - 1;
}

double mean_of(const std::vector<double>& xs) {
  return xs.empty() ? 0.0
                    : std::accumulate(xs.begin(), xs.end(), 0.0) /
                          static_cast<double>(xs.size());
}

double ci_half_width(const std::vector<double>& xs, double mean) {
  const std::size_t n = xs.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return kZ95 * sd / std::sqrt(static_cast<double>(n));
}

}  // namespace

std::uint64_t RngStream::next_u64() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double RngStream::next_uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

double ScenarioConfig::delta_s() const {
  return channel.attr(channel.num_states() - 1) - channel.attr(0);
}

double ScenarioConfig::delta_mu() const {
  return 1.0 / processor.attr(processor.num_states() - 1) -
         1.0 / processor.attr(0);
}

std::vector<std::string> validate_scenario(const ScenarioConfig& config) {
  std::vector<std::string> diags = validate_model(config.channel,
                                                  config.processor);
  if (config.initial_b1 < 1) diags.push_back("initial_b1 must be >= 1");
  if (config.initial_b2 < 0) diags.push_back("initial_b2 must be >= 0");
  if (config.episodes < 1) diags.push_back("episodes must be >= 1");
  if (config.c_values.empty()) diags.push_back("c_values must be nonempty");
  for (double c : config.c_values) {
    if (!(c >= 1.0)) {
      diags.push_back("c values must all be >= 1");
      break;
    }
  }
  if (config.initial_jm) {
    const auto [j, m] = *config.initial_jm;
    if (j < 0 || j >= config.channel.num_states() || m < 0 ||
        m >= config.processor.num_states()) {
      diags.push_back("initial_jm indices out of range");
    }
  }
  return diags;
}

ScenarioConfig reduced_scenario(double s, double mu) {
  ScenarioConfig config(FsmcModel::single(s), FsmcModel::single(mu));
  config.name = "reduced";
  return config;
}

EpisodeResult run_episode(const ScenarioConfig& scenario,
                          const FetchPolicy& policy, double c,
                          std::uint64_t seed) {
  if (!(c >= 1.0)) {
    throw std::invalid_argument("run_episode: c must be >= 1");
  }
  RngStream rng(seed);
  const FsmcModel& channel = scenario.channel;
  const FsmcModel& processor = scenario.processor;

  int j, m;
  if (scenario.initial_jm) {
    j = scenario.initial_jm->first;
    m = scenario.initial_jm->second;
  } else {
    j = sample_index(channel.stationary_distribution(), rng.next_uniform());
    m = sample_index(processor.stationary_distribution(), rng.next_uniform());
  }

  int b1 = scenario.initial_b1;
  int b2 = scenario.initial_b2;
  EpisodeResult result;
  result.per_task_delay.assign(static_cast<std::size_t>(b1 + b2), 0);
  std::size_t completed = 0;
  double sum_b2 = 0.0;

  while (b1 > 0 || b2 > 0) {
    if (result.slots >= kSlotCap) {
      throw SimulationError("run_episode: slot cap exceeded (policy '" +
                            policy.name() + "' appears to be stuck)");
    }
    result.total_cost += b1 + c * b2;
    sum_b2 += b2;

    const double u_policy = rng.next_uniform();
    const double u_fetch = rng.next_uniform();
    const double u_service = rng.next_uniform();
    const double u_channel = rng.next_uniform();
    const double u_processor = rng.next_uniform();

    const double s = channel.attr(j);
    const double mu = processor.attr(m);
    const Observables obs{b1, b2, s, mu, c, j, m};
    const Action action = policy.decide(obs, u_policy);

    const bool fetched = action == Action::FE && b1 > 0 && u_fetch < s;
    const bool served_existing = b2 > 0 && u_service < mu;
    const bool served_fetched = b2 == 0 && fetched && u_service < mu;

    if (served_existing || served_fetched) {
      result.per_task_delay[completed++] = static_cast<int>(result.slots) + 1;
    }
    b1 -= fetched ? 1 : 0;
    b2 += (fetched ? 1 : 0) - (served_existing ? 1 : 0) -
          (served_fetched ? 1 : 0);

    j = sample_row(channel.transition_matrix(), j, u_channel);
    m = sample_row(processor.transition_matrix(), m, u_processor);
    ++result.slots;
  }

  result.time_avg_b2 =
      result.slots > 0 ? sum_b2 / static_cast<double>(result.slots) : 0.0;
  return result;
}

BatchResult run_batch(const ScenarioConfig& scenario, const FetchPolicy& policy,
                      double c, int episodes) {
  if (episodes < 1) {
    throw std::invalid_argument("run_batch: episodes must be >= 1");
  }
  std::vector<double> costs(episodes), b2s(episodes), delays(episodes);
  for (int e = 0; e < episodes; ++e) {
    const EpisodeResult r = run_episode(
        scenario, policy, c, scenario.base_seed + static_cast<std::uint64_t>(e));
    costs[e] = r.total_cost;
    b2s[e] = r.time_avg_b2;
    double d = 0.0;
    for (int delay : r.per_task_delay) d += delay;
    delays[e] = r.per_task_delay.empty()
                    ? 0.0
                    : d / static_cast<double>(r.per_task_delay.size());
  }
  BatchResult out;
  out.episodes = episodes;
  out.mean_cost = mean_of(costs);
  out.ci_cost = ci_half_width(costs, out.mean_cost);
  out.b2_ave = mean_of(b2s);
  out.ci_b2 = ci_half_width(b2s, out.b2_ave);
  out.d_ave = mean_of(delays);
  out.ci_d = ci_half_width(delays, out.d_ave);
  return out;
}

std::vector<TradeoffPoint> sweep_c(const ScenarioConfig& scenario,
                                   const std::string& policy_name) {
  if (const auto diags = validate_scenario(scenario); !diags.empty()) {
    throw std::invalid_argument("sweep_c: invalid scenario: " + diags.front());
  }
  std::vector<TradeoffPoint> points;
  points.reserve(scenario.c_values.size());
  for (double c : scenario.c_values) {
    const auto policy =
        make_policy(policy_name, scenario.channel, scenario.processor,
                    scenario.initial_b1, scenario.initial_b2, CostParams{c});
    const BatchResult batch = run_batch(scenario, *policy, c, scenario.episodes);
    points.push_back(TradeoffPoint{c, batch.b2_ave, batch.ci_b2, batch.d_ave,
                                   batch.ci_d, batch.mean_cost,
                                   batch.episodes});
  }
  return points;
}

std::vector<double> default_c_values() {
  std::vector<double> cs(20);
  for (int k = 0; k < 20; ++k) {
    cs[k] = std::pow(10.0, 2.0 * k / 19.0);
  }
  cs.front() = 1.0;
  cs.back() = 100.0;
  return cs;
}

ScenarioConfig scenario_preset(const std::string& name) {
  bool slow;
  if (name.rfind("slow_", 0) == 0) {
    slow = true;
  } else if (name.rfind("fast_", 0) == 0) {
    slow = false;
  } else {
    throw std::invalid_argument("scenario_preset: unknown preset '" + name +
                                "'");
  }
  const std::string rest = name.substr(5);
  double s1, s2;
  if (rest.rfind("ds08_", 0) == 0) {
    s1 = 0.1;
    s2 = 0.9;
  } else if (rest.rfind("ds01_", 0) == 0) {
    s1 = 0.4;
    s2 = 0.5;
  } else {
    throw std::invalid_argument("scenario_preset: unknown preset '" + name +
                                "'");
  }
  const std::string tail = rest.substr(5);
  double mu1, mu2;
  if (tail == "dmu889") {
    mu1 = 0.9;
    mu2 = 0.1;
  } else if (tail == "dmu167") {
    mu1 = 0.6;
    mu2 = 0.3;
  } else {
    throw std::invalid_argument("scenario_preset: unknown preset '" + name +
                                "'");
  }
  const double p = slow ? 0.9 : 0.1;
  ScenarioConfig config(FsmcModel::two_state(p, p, s1, s2),
                        FsmcModel::two_state(0.5, 0.3, mu1, mu2));
  config.name = name;
  config.initial_b1 = 20;
  config.initial_b2 = 0;
  config.c_values = default_c_values();
  config.episodes = 5000;
  config.base_seed = 12345;
  return config;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "slow_ds08_dmu889", "slow_ds08_dmu167", "slow_ds01_dmu889",
      "slow_ds01_dmu167", "fast_ds08_dmu889", "fast_ds08_dmu167",
      "fast_ds01_dmu889", "fast_ds01_dmu167"};
  return names;
}

}  // namespace prefetch
