#include "prefetch/policies.hpp"

#include "prefetch/closed_form.hpp"

#include "doctest.h"

#include <cmath>
#include <memory>

using namespace prefetch;

namespace {

Observables at(int b1, int b2, double s, double mu, double c) {
  Observables obs;
  obs.b1 = b1;
  obs.b2 = b2;
  obs.s_hat = s;
  obs.mu_hat = mu;
  obs.c_hat = c;
  return obs;
}

}  // namespace

TEST_CASE("always and never baselines") {
  const AlwaysFetchPolicy always;
  const NeverFetchPolicy never;
  CHECK(always.decide(at(3, 5, 0.5, 0.5, 1.0), 0.0) == Action::FE);
  CHECK(always.decide(at(3, 0, 0.5, 0.5, 1.0), 0.99) == Action::FE);
  CHECK(always.decide(at(0, 2, 0.5, 0.5, 1.0), 0.0) == Action::FEbar);
  CHECK(never.decide(at(3, 0, 0.5, 0.5, 1.0), 0.0) == Action::FE);
  CHECK(never.decide(at(3, 4, 0.5, 0.5, 1.0), 0.0) == Action::FEbar);
  CHECK(never.decide(at(0, 2, 0.5, 0.5, 1.0), 0.0) == Action::FEbar);
  CHECK(always.name() == "always");
  CHECK(never.name() == "never");
}

TEST_CASE("opt policy reads the solved lookup table") {
  const auto channel = FsmcModel::two_state(0.9, 0.9, 0.1, 0.9);
  const auto processor = FsmcModel::two_state(0.5, 0.3, 0.6, 0.3);
  auto lut = std::make_shared<const FullSolution>(
      solve_full(channel, processor, {2.0}, 6, 6));
  const OptPolicy opt(lut);
  CHECK(opt.name() == "opt");
  for (int b1 = 1; b1 <= 6; ++b1) {
    for (int b2 = 0; b1 + b2 <= 12; ++b2) {
      for (int j = 0; j < 2; ++j) {
        for (int m = 0; m < 2; ++m) {
          Observables obs = at(b1, b2, channel.attr(j), processor.attr(m), 2.0);
          obs.j = j;
          obs.m = m;
          CHECK(opt.decide(obs, 0.0) == lut->action(b1, b2, j, m));
        }
      }
    }
  }
  Observables empty = at(0, 3, 0.1, 0.6, 2.0);
  CHECK(opt.decide(empty, 0.0) == Action::FEbar);
  Observables outside = at(7, 0, 0.1, 0.6, 2.0);
  outside.j = 0;
  outside.m = 0;
  CHECK_THROWS_AS(opt.decide(outside, 0.0), std::out_of_range);
  CHECK_THROWS_AS(OptPolicy(nullptr), std::invalid_argument);
}

TEST_CASE("opt policy fetches from a drained terminal under backlog pressure") {
  const auto channel = FsmcModel::two_state(0.9, 0.9, 0.4, 0.5);
  const auto processor = FsmcModel::two_state(0.5, 0.3, 0.6, 0.3);
  const auto opt = make_policy("opt", channel, processor, 20, 0, {2.0});
  Observables obs = at(20, 0, 0.5, 0.3, 2.0);
  obs.j = 1;
  obs.m = 1;
  CHECK(opt->decide(obs, 0.0) == Action::FE);
}

TEST_CASE("fon policy matches the frozen-parameter solve") {
  const FonPolicy fon(6, 6);
  CHECK(fon.name() == "fon");
  CHECK(fon.cache_size() == 0);
  CHECK(fon.decide(at(5, 0, 0.9, 0.9, 1.2), 0.0) == Action::FE);
  CHECK(fon.cache_size() == 1);

  const ReducedSolution ref = solve_reduced(0.9, 0.9, {1.2}, 6, 6);
  for (int b1 = 0; b1 <= 6; ++b1) {
    for (int b2 = 0; b1 + b2 <= 12; ++b2) {
      if (is_terminal(b1, b2)) continue;
      CHECK(fon.decide(at(b1, b2, 0.9, 0.9, 1.2), 0.0) == ref.action(b1, b2));
    }
  }
  CHECK(fon.cache_size() == 1);
}

TEST_CASE("fon cache keys quantize the operating point") {
  const FonPolicy fon(4, 4);
  fon.decide(at(2, 1, 0.9, 0.9, 1.2), 0.0);
  CHECK(fon.cache_size() == 1);
  fon.decide(at(2, 1, 0.9 + 4e-7, 0.9, 1.2), 0.0);
  CHECK(fon.cache_size() == 1);
  fon.decide(at(2, 1, 0.9 + 6e-7, 0.9, 1.2), 0.0);
  CHECK(fon.cache_size() == 2);
  fon.decide(at(2, 1, 0.9, 0.9, 1.5), 0.0);
  CHECK(fon.cache_size() == 3);
}

TEST_CASE("randomized cone probability at a pinned operating point") {
  // (s, mu, c) = (0.2, 0.9, 5): hold thresholds 0.7 b1 + 0.05 and 0.9 b1,
  // both finite, so column b1 = 10 interpolates between 7.05 and 9.
  const double s = 0.2, mu = 0.9, c = 5.0;
  CHECK(rand_prob_febar(10, 7, s, mu, c) == 0.0);
  CHECK(rand_prob_febar(10, 8, s, mu, c) ==
        doctest::Approx(0.95 / 1.95).epsilon(1e-12));
  CHECK(rand_prob_febar(10, 9, s, mu, c) == 1.0);
  CHECK(rand_prob_febar(10, 20, s, mu, c) == 1.0);
  CHECK(rand_prob_febar(0, 5, s, mu, c) == 1.0);

  long long inv = 0;
  rand_prob_febar(10, 8, s, mu, c, &inv);
  CHECK(inv == 1);
}

TEST_CASE("randomized cone probability recomposes from the decision lines") {
  for (auto [s, mu, c] : {std::tuple{0.6, 0.8, 1.2}, {0.2, 0.9, 5.0}}) {
    const LinearDecision never_line =
        one_step_improvement_line(quadratic_of_never_fetch(s, mu, c), mu);
    for (int b1 = 1; b1 <= 12; ++b1) {
      for (int b2 = 0; b2 <= 14; ++b2) {
        const LinearDecision always_line = one_step_improvement_line(
            quadratic_of_always_fetch_fluid(s, mu, c,
                                            fluid_branch(b1, b2, s, mu)),
            mu);
        const double t_never = switchover_boundary(never_line, b1);
        const double t_always = switchover_boundary(always_line, b1);
        const double lower = std::min(t_never, t_always);
        const double upper = std::max(t_never, t_always);
        double want;
        if (b2 >= upper) {
          want = 1.0;
        } else if (b2 <= lower) {
          want = 0.0;
        } else if (std::isfinite(lower) && std::isfinite(upper)) {
          want = (b2 - lower) / (upper - lower);
        } else {
          want = 0.0;
        }
        CHECK(rand_prob_febar(b1, b2, s, mu, c) == doctest::Approx(want));
      }
    }
  }
}

TEST_CASE("randomized cone probability stays within zones") {
  for (int b1 = 1; b1 <= 12; ++b1) {
    for (int b2 = 0; b2 <= 14; ++b2) {
      const double p = rand_prob_febar(b1, b2, 0.6, 0.8, 1.2);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      CHECK(rand_prob_febar(b1, b2, 0.6, 0.8, 1.0) == 0.0);
    }
  }
}

TEST_CASE("cone probability is monotone within each fluid-branch segment") {
  const double s = 0.6, mu = 0.8, c = 1.2;
  for (int b1 : {5, 20}) {
    double prev = 0.0;
    int prev_branch = -1;
    for (int b2 = 0; b2 <= 40; ++b2) {
      const int branch = fluid_branch(b1, b2, s, mu);
      const double p = rand_prob_febar(b1, b2, s, mu, c);
      if (branch == prev_branch) CHECK(p >= prev - 1e-12);
      prev = p;
      prev_branch = branch;
    }
  }
  // The branch seam itself may step down: column 20 interpolates just under
  // the seam and falls back to fetching just above it.
  CHECK(rand_prob_febar(20, 6, s, mu, c) > 0.0);
  CHECK(rand_prob_febar(20, 7, s, mu, c) == 0.0);
}

TEST_CASE("rfon policy draws against the cone probability") {
  const RfonPolicy rfon;
  CHECK(rfon.name() == "rfon");
  const Observables obs = at(10, 8, 0.2, 0.9, 5.0);
  CHECK(rfon.decide(obs, 0.40) == Action::FEbar);
  CHECK(rfon.decide(obs, 0.60) == Action::FE);
  CHECK(rfon.inversions() >= 2);
  CHECK(rfon.decide(at(0, 3, 0.2, 0.9, 5.0), 0.0) == Action::FEbar);
  CHECK(rand_decide(at(10, 9, 0.2, 0.9, 5.0), 0.9999) == Action::FEbar);
  CHECK(rand_decide(at(10, 7, 0.2, 0.9, 5.0), 0.0) == Action::FE);
}

TEST_CASE("policy registry builds every listed policy") {
  const auto& names = policy_names();
  REQUIRE(names == std::vector<std::string>{"opt", "fon", "rfon", "always",
                                            "never"});
  const auto channel = FsmcModel::single(0.6);
  const auto processor = FsmcModel::single(0.8);
  for (const auto& name : names) {
    const auto policy = make_policy(name, channel, processor, 4, 2, {1.2});
    REQUIRE(policy != nullptr);
    CHECK(policy->name() == name);
  }
  CHECK_THROWS_AS(make_policy("greedy", channel, processor, 4, 2, {1.2}),
                  std::invalid_argument);
}

TEST_CASE("opt built by the registry agrees with the reduced solve") {
  const auto channel = FsmcModel::single(0.6);
  const auto processor = FsmcModel::single(0.8);
  const auto opt = make_policy("opt", channel, processor, 4, 2, {1.2});
  const ReducedSolution ref = solve_reduced(0.6, 0.8, {1.2}, 4, 6);
  for (int b1 = 1; b1 <= 4; ++b1) {
    for (int b2 = 0; b1 + b2 <= 10; ++b2) {
      Observables obs = at(b1, b2, 0.6, 0.8, 1.2);
      obs.j = 0;
      obs.m = 0;
      CHECK(opt->decide(obs, 0.0) == ref.action(b1, b2));
    }
  }
}
