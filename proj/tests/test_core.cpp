#include "ects/core.hpp"

#include <cstdlib>
#include <stdexcept>

#include "doctest.h"

using namespace ects;

TEST_CASE("cost model defaults to 0/1 misclassification") {
  CostModel cost;
  CHECK(cost.misclass(0, 0) == 0.0);
  CHECK(cost.misclass(1, 1) == 0.0);
  CHECK(cost.misclass(0, 1) == 1.0);
  CHECK(cost.misclass(1, 0) == 1.0);
  CHECK(cost.max_misclass() == 1.0);
}

TEST_CASE("change cost applies only on label changes") {
  CostModel cost;
  cost.change_cost = 0.25;
  CHECK(cost.change(0, 0) == 0.0);
  CHECK(cost.change(1, 1) == 0.0);
  CHECK(cost.change(1, 0) == 0.25);
  CHECK(cost.change(0, 1) == 0.25);
}

TEST_CASE("cost model validation rejects negative and non-finite entries") {
  CostModel cost;
  CHECK_NOTHROW(cost.validate());

  cost.delay_slope = -0.1;
  CHECK_THROWS_AS(cost.validate(), std::invalid_argument);
  cost.delay_slope = 0.0;

  cost.change_cost = -1.0;
  CHECK_THROWS_AS(cost.validate(), std::invalid_argument);
  cost.change_cost = 0.0;

  cost.misclassification[0][1] = -2.0;
  CHECK_THROWS_AS(cost.validate(), std::invalid_argument);
  cost.misclassification[0][1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(cost.validate(), std::invalid_argument);
  cost.misclassification[0][1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(cost.validate(), std::invalid_argument);
}

TEST_CASE("delay cost is linear in t over the series length") {
  CostModel cost;
  cost.delay_slope = 0.05;
  CHECK(delay_cost(cost, 10, 20) == doctest::Approx(0.025).epsilon(1e-15));
  CHECK(delay_cost(cost, 20, 20) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(delay_cost(cost, 1, 20) == doctest::Approx(0.0025).epsilon(1e-15));

  cost.delay_slope = 0.0;
  CHECK(delay_cost(cost, 7, 20) == 0.0);
}

TEST_CASE("delay cost rejects timesteps outside the series") {
  CostModel cost;
  CHECK_THROWS_AS(delay_cost(cost, 0, 20), std::invalid_argument);
  CHECK_THROWS_AS(delay_cost(cost, 21, 20), std::invalid_argument);
  CHECK_THROWS_AS(delay_cost(cost, -3, 20), std::invalid_argument);
}

TEST_CASE("decision sequence enforces ordering and collapses repeats") {
  DecisionSequence seq;
  CHECK(seq.empty());
  CHECK(seq.change_count() == 0);

  CHECK(seq.append(4, 0));
  CHECK(seq.size() == 1);
  CHECK(seq.change_count() == 0);

  // Same label later: a no-op, the sequence is unchanged.
  CHECK_FALSE(seq.append(6, 0));
  CHECK(seq.size() == 1);
  CHECK(seq.back().time == 4);

  CHECK(seq.append(10, 1));
  CHECK(seq.size() == 2);
  CHECK(seq.change_count() == 1);
  CHECK(seq.front().time == 4);
  CHECK(seq.back().label == 1);

  // Time must strictly increase past the *recorded* decision (t = 10).
  CHECK_THROWS_AS(seq.append(10, 0), std::invalid_argument);
  CHECK_THROWS_AS(seq.append(9, 0), std::invalid_argument);
  CHECK_THROWS_AS(seq.append(12, 2), std::invalid_argument);
  CHECK_THROWS_AS(seq.append(12, kUnlabeled), std::invalid_argument);
  CHECK(seq.size() == 2);
}

TEST_CASE("total cost sums final misclassification, final delay, and changes") {
  CostModel cost;
  cost.delay_slope = 0.1;
  cost.change_cost = 0.05;

  DecisionSequence seq;
  seq.append(4, 0);
  seq.append(10, 1);

  // Final label 1 is correct; delay 0.1 * 10/20; one change.
  CHECK(total_cost(seq, 1, cost, 20) == doctest::Approx(0.1).epsilon(1e-15));
  // Against truth 0 the misclassification of the final label is added.
  CHECK(total_cost(seq, 0, cost, 20) == doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("single correct decision at the horizon costs exactly the delay slope") {
  CostModel cost;
  cost.delay_slope = 1.0;
  DecisionSequence seq;
  seq.append(20, 1);
  CHECK(total_cost(seq, 1, cost, 20) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("empty sequence costs the no-decision sentinel") {
  CostModel cost;
  DecisionSequence seq;
  CHECK(is_no_decision(total_cost(seq, 1, cost, 20)));
  CHECK(is_no_decision(kNoDecisionCost));
  CHECK_FALSE(is_no_decision(1e300));
}

TEST_CASE("more revisions cost more under the same final state") {
  CostModel cost;
  cost.delay_slope = 0.1;
  cost.change_cost = 0.05;

  DecisionSequence once;
  once.append(10, 1);
  DecisionSequence thrice;
  thrice.append(2, 1);
  thrice.append(6, 0);
  thrice.append(10, 1);

  const double c1 = total_cost(once, 1, cost, 20);
  const double c3 = total_cost(thrice, 1, cost, 20);
  CHECK(c3 == doctest::Approx(c1 + 2 * 0.05).epsilon(1e-12));
}

TEST_CASE("decimal rendering round-trips doubles exactly") {
  const double samples[] = {0.0,   -0.0,        1.0 / 3.0,          0.1,
                            1e300, 5e-324,      -2.718281828459045, 1234567890.123456,
                            1e-17, 0.3333333333333333};
  for (double v : samples) {
    const std::string s = format_double(v);
    // strtod instead of stod: stod throws out_of_range on denormal underflow
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.05) == "0.05");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
}
