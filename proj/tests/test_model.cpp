// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracular/errors.hpp"
#include "oracular/model.hpp"
#include "oracular/problems.hpp"
#include "test_util.hpp"

using namespace oracular;

namespace {

MipProblem two_var_problem() {
  MipProblem p;
  p.sense = Sense::kMinimize;
  p.objective = {1.0, 2.0};
  p.lower = {0.0, 0.0};
  p.upper = {4.0, 4.0};
  p.kind = {VarKind::kContinuous, VarKind::kContinuous};
  p.constraints.push_back({{1.0, 1.0}, Relation::kLessEqual, 5.0});
  return p;
}

}  // namespace

TEST_CASE("validate accepts a well-formed two-variable problem") {
  CHECK(validate(two_var_problem()).empty());
}

TEST_CASE("validate reports an inverted bound with its index") {
  MipProblem p = two_var_problem();
  p.lower[0] = 1.0;
  p.upper[0] = 0.0;
  const auto issues = validate(p);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].find("0") != std::string::npos);
}

TEST_CASE("validate reports a constraint row of the wrong length") {
  MipProblem p = two_var_problem();
  p.constraints.push_back({{1.0}, Relation::kLessEqual, 1.0});
  const auto issues = validate(p);
  REQUIRE(issues.size() == 1);
  // The diagnostic is about a dimension disagreement.
  CHECK(issues[0].find("1") != std::string::npos);
}

TEST_CASE("validate flags non-finite data and bad binary bounds") {
  MipProblem p = two_var_problem();
  p.objective[1] = std::nan("");
  CHECK(validate(p).size() == 1);

  MipProblem q = two_var_problem();
  q.kind[0] = VarKind::kBinary;
  q.upper[0] = 2.0;
  CHECK(!validate(q).empty());

  MipProblem r = two_var_problem();
  r.kind[0] = VarKind::kInteger;
  r.upper[0] = std::numeric_limits<double>::infinity();
  CHECK(!validate(r).empty());
}

TEST_CASE("relax turns a binary knapsack into a unit-box LP") {
  MipProblem p = to_mip(testutil::example_knapsack());
  MipProblem r = relax(p);
  for (std::size_t j = 0; j < r.num_vars(); ++j) {
    CHECK(r.kind[j] == VarKind::kContinuous);
    CHECK(r.lower[j] == 0.0);
    CHECK(r.upper[j] == 1.0);
  }
  CHECK(r.constraints.size() == p.constraints.size());
}

TEST_CASE("relax keeps an already-continuous problem identical") {
  MipProblem p = two_var_problem();
  MipProblem r = relax(p);
  CHECK(r.objective == p.objective);
  CHECK(r.lower == p.lower);
  CHECK(r.upper == p.upper);
  for (auto k : r.kind) CHECK(k == VarKind::kContinuous);
}

TEST_CASE("relax preserves general integer upper bounds") {
  KnapsackInstance kp;
  kp.capacity = 10.0;
  kp.profit = {3.0, 4.0};
  kp.weight = {1.0, 2.0};
  kp.multiplicity = {2, 3};
  MipProblem r = relax(to_mip(kp));
  CHECK(r.upper == std::vector<double>{2.0, 3.0});
  CHECK(r.kind[0] == VarKind::kContinuous);
}

TEST_CASE("relax is idempotent") {
  MipProblem p = to_mip(testutil::example_knapsack());
  MipProblem once = relax(p);
  MipProblem twice = relax(once);
  CHECK(twice.objective == once.objective);
  CHECK(twice.lower == once.lower);
  CHECK(twice.upper == once.upper);
  CHECK(twice.kind == once.kind);
}

TEST_CASE("evaluate: the origin is clean when all rhs are nonnegative") {
  MipProblem p = two_var_problem();
  const std::vector<double> x = {0.0, 0.0};
  const Evaluation e = evaluate(p, x);
  CHECK(e.objective == 0.0);
  CHECK(e.max_violation == 0.0);
  CHECK(e.integral);
}

TEST_CASE("evaluate: overloaded knapsack reports the exact excess") {
  KnapsackInstance kp;
  kp.capacity = 9.0;
  kp.profit = {1.0, 1.0};
  kp.weight = {4.0, 6.0};
  kp.multiplicity = {1, 1};
  const MipProblem p = to_mip(kp);
  const std::vector<double> x = {1.0, 1.0};
  const Evaluation e = evaluate(p, x);
  CHECK(e.max_violation == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evaluate: fractional binary flips the integral flag") {
  MipProblem p = two_var_problem();
  p.kind = {VarKind::kBinary, VarKind::kBinary};
  p.upper = {1.0, 1.0};
  const std::vector<double> x = {0.5, 0.0};
  CHECK_FALSE(evaluate(p, x).integral);
  const std::vector<double> y = {1.0, 0.0};
  CHECK(evaluate(p, y).integral);
}

TEST_CASE("evaluate agrees between a problem and its relaxation on integral points") {
  Rng rng(91);
  for (int t = 0; t < 20; ++t) {
    KnapsackInstance kp = generate_knapsack(6, rng.next_u64());
    const MipProblem p = to_mip(kp);
    const MipProblem r = relax(p);
    std::vector<double> x(kp.num_items());
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = double(rng.uniform_int(0, kp.multiplicity[j]));
    }
    CHECK(evaluate(p, x).objective == evaluate(r, x).objective);
  }
}

TEST_CASE("evaluate: zero violation implies every row re-checks clean") {
  Rng rng(17);
  for (int t = 0; t < 25; ++t) {
    MipProblem p = testutil::random_box_lp(rng);
    std::vector<double> x(p.num_vars());
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = rng.uniform_real(p.lower[j], p.upper[j]);
    }
    const Evaluation e = evaluate(p, x);
    if (e.max_violation != 0.0) continue;
    for (const auto& row : p.constraints) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) lhs += row.coefficients[j] * x[j];
      if (row.relation == Relation::kLessEqual) {
        CHECK(lhs <= row.rhs + 1e-12);
      } else if (row.relation == Relation::kGreaterEqual) {
        CHECK(lhs >= row.rhs - 1e-12);
      } else {
        CHECK(std::abs(lhs - row.rhs) <= 1e-12);
      }
    }
  }
}

TEST_CASE("evaluate rejects a point of the wrong size") {
  const std::vector<double> x = {1.0};
  CHECK_THROWS_AS(evaluate(two_var_problem(), x), DimensionMismatch);
}
