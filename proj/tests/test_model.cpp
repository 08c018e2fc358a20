#include "doctest.h"

#include "prefetch/model.hpp"

#include <cmath>
#include <stdexcept>

using namespace prefetch;

namespace {

double prob_of(const std::vector<QueueTransition>& ts, int b1, int b2) {
  double p = 0.0;
  for (const auto& t : ts) {
    if (t.b1 == b1 && t.b2 == b2) p += t.p;
  }
  return p;
}

double total_prob(const std::vector<QueueTransition>& ts) {
  double p = 0.0;
  for (const auto& t : ts) p += t.p;
  return p;
}

}  // namespace

TEST_CASE("stage cost prices the slot's starting state") {
  CHECK(stage_cost({2, 3, 0, 0}, CostParams{2.0}) == 8.0);
  CHECK(stage_cost({0, 0, 0, 0}, CostParams{7.0}) == 0.0);
  CHECK(stage_cost({5, 0, 1, 1}, CostParams{3.0}) == 5.0);
  CHECK(stage_cost({0, 4, 0, 0}, CostParams{1.5}) == 6.0);
}

TEST_CASE("action names") {
  CHECK(std::string(to_string(Action::FE)) == "FE");
  CHECK(std::string(to_string(Action::FEbar)) == "FEbar");
}

TEST_CASE("chain factories and stationary distributions") {
  const FsmcModel p = FsmcModel::two_state(0.9, 0.9, 0.1, 0.9);
  CHECK(p.num_states() == 2);
  CHECK(p.prob(0, 0) == 0.9);
  CHECK(p.prob(0, 1) == doctest::Approx(0.1));
  CHECK(p.attr(0) == 0.1);
  CHECK(p.attr(1) == 0.9);
  const Eigen::VectorXd pi = p.stationary_distribution();
  CHECK(pi(0) == doctest::Approx(0.5));
  CHECK(pi(1) == doctest::Approx(0.5));

  const FsmcModel q = FsmcModel::two_state(0.5, 0.3, 0.9, 0.1);
  const Eigen::VectorXd piq = q.stationary_distribution();
  CHECK(piq(0) == doctest::Approx(7.0 / 12));
  CHECK(piq(1) == doctest::Approx(5.0 / 12));
  const Eigen::RowVectorXd lhs = piq.transpose() * q.transition_matrix();
  CHECK(lhs(0) == doctest::Approx(piq(0)));
  CHECK(lhs(1) == doctest::Approx(piq(1)));

  const FsmcModel one = FsmcModel::single(0.7);
  CHECK(one.num_states() == 1);
  CHECK(one.prob(0, 0) == 1.0);
  CHECK(one.stationary_distribution()(0) == doctest::Approx(1.0));
}

TEST_CASE("model construction rejects shape errors") {
  Eigen::MatrixXd rect(1, 2);
  rect << 0.5, 0.5;
  Eigen::VectorXd a(1);
  a << 0.5;
  CHECK_THROWS_AS(FsmcModel(rect, a), std::invalid_argument);

  Eigen::MatrixXd sq(2, 2);
  sq << 0.5, 0.5, 0.5, 0.5;
  CHECK_THROWS_AS(FsmcModel(sq, a), std::invalid_argument);
}

TEST_CASE("validate_model reports one diagnostic per violation") {
  const FsmcModel good_p = FsmcModel::two_state(0.9, 0.9, 0.1, 0.9);
  const FsmcModel good_q = FsmcModel::two_state(0.5, 0.3, 0.9, 0.1);
  CHECK(validate_model(good_p, good_q).empty());

  Eigen::MatrixXd bad_rows(2, 2);
  bad_rows << 0.5, 0.4, 0.1, 0.9;
  Eigen::VectorXd attr(2);
  attr << 0.5, 0.5;
  const FsmcModel bad_sum(bad_rows, attr);
  CHECK_FALSE(validate_model(bad_sum, good_q).empty());

  const FsmcModel zero_rate = FsmcModel::two_state(0.5, 0.5, 0.0, 0.9);
  CHECK_FALSE(validate_model(good_p, zero_rate).empty());

  const FsmcModel big_rate = FsmcModel::two_state(0.5, 0.5, 0.4, 1.2);
  CHECK_FALSE(validate_model(good_p, big_rate).empty());
}

TEST_CASE("backlog kernel at interior states") {
  const double s = 0.6, mu = 0.8;
  const auto fe = queue_transitions(3, 2, Action::FE, s, mu);
  CHECK(fe.size() == 4);
  CHECK(prob_of(fe, 2, 2) == doctest::Approx(s * mu));
  CHECK(prob_of(fe, 3, 1) == doctest::Approx((1 - s) * mu));
  CHECK(prob_of(fe, 2, 3) == doctest::Approx(s * (1 - mu)));
  CHECK(prob_of(fe, 3, 2) == doctest::Approx((1 - s) * (1 - mu)));
  CHECK(total_prob(fe) == doctest::Approx(1.0));

  const auto hold = queue_transitions(3, 2, Action::FEbar, s, mu);
  CHECK(hold.size() == 2);
  CHECK(prob_of(hold, 3, 1) == doctest::Approx(mu));
  CHECK(prob_of(hold, 3, 2) == doctest::Approx(1 - mu));
  CHECK(total_prob(hold) == doctest::Approx(1.0));
}

TEST_CASE("backlog kernel at boundaries") {
  const double s = 0.6, mu = 0.8;

  const auto frozen = queue_transitions(4, 0, Action::FEbar, s, mu);
  REQUIRE(frozen.size() == 1);
  CHECK(frozen[0].b1 == 4);
  CHECK(frozen[0].b2 == 0);
  CHECK(frozen[0].p == doctest::Approx(1.0));

  // a task fetched into an empty MT buffer can be served in the same slot
  const auto fe0 = queue_transitions(4, 0, Action::FE, s, mu);
  CHECK(fe0.size() == 3);
  CHECK(prob_of(fe0, 3, 0) == doctest::Approx(s * mu));
  CHECK(prob_of(fe0, 3, 1) == doctest::Approx(s * (1 - mu)));
  CHECK(prob_of(fe0, 4, 0) == doctest::Approx(1 - s));
  CHECK(total_prob(fe0) == doctest::Approx(1.0));

  // with an empty CS queue the two actions coincide
  const auto none_fe = queue_transitions(0, 3, Action::FE, s, mu);
  const auto none_hold = queue_transitions(0, 3, Action::FEbar, s, mu);
  REQUIRE(none_fe.size() == none_hold.size());
  for (std::size_t i = 0; i < none_fe.size(); ++i) {
    CHECK(none_fe[i].b1 == none_hold[i].b1);
    CHECK(none_fe[i].b2 == none_hold[i].b2);
    CHECK(none_fe[i].p == doctest::Approx(none_hold[i].p));
  }
  CHECK(prob_of(none_fe, 0, 2) == doctest::Approx(mu));

  CHECK_THROWS_AS(queue_transitions(0, 0, Action::FE, s, mu),
                  std::invalid_argument);
  CHECK_THROWS_AS(queue_transitions(0, 0, Action::FEbar, s, mu),
                  std::invalid_argument);
}

TEST_CASE("full kernel composes backlog moves with chain steps") {
  const FsmcModel channel = FsmcModel::two_state(0.9, 0.9, 0.1, 0.9);
  const FsmcModel processor = FsmcModel::two_state(0.5, 0.3, 0.9, 0.1);

  const auto hold =
      transition_distribution({2, 1, 0, 1}, Action::FEbar, channel, processor);
  double sum = 0.0;
  double spot = 0.0;
  for (const auto& t : hold) {
    sum += t.p;
    if (t.to == SystemState{2, 0, 0, 0}) spot = t.p;
  }
  CHECK(sum == doctest::Approx(1.0));
  // mu(m=1) = 0.1 serves the buffered task, chains stay/move by P and Q
  CHECK(spot == doctest::Approx(0.1 * 0.9 * 0.7));

  const auto fe =
      transition_distribution({2, 1, 1, 0}, Action::FE, channel, processor);
  sum = 0.0;
  spot = 0.0;
  for (const auto& t : fe) {
    sum += t.p;
    if (t.to == SystemState{1, 1, 1, 1}) spot = t.p;
  }
  CHECK(sum == doctest::Approx(1.0));
  // s(j=1) = 0.9, mu(m=0) = 0.9: fetch and serve both succeed
  CHECK(spot == doctest::Approx(0.9 * 0.9 * 0.9 * 0.5));

  CHECK_THROWS_AS(
      transition_distribution({0, 0, 0, 0}, Action::FE, channel, processor),
      std::invalid_argument);
}
