// SPDX-License-Identifier: Apache-2.0

#include "oracular/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oracular/errors.hpp"

namespace oracular {

namespace {

void check_dim(std::span<const double> y, std::size_t dim, const char* who) {
  if (y.size() != dim) {
    throw DimensionMismatch(std::string(who) + ": query point has size " +
                            std::to_string(y.size()) + ", expected " +
                            std::to_string(dim));
  }
}

}  // namespace

QuadraticOracle::QuadraticOracle(std::vector<double> center)
    : center_(std::move(center)) {}

OracleReply QuadraticOracle::query(std::span<const double> y) const {
  check_dim(y, dim(), "QuadraticOracle");
  OptimalityReply reply;
  reply.subgradient.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - center_[i];
    reply.value += d * d;
    reply.subgradient[i] = 2.0 * d;
  }
  return reply;
}

MaxAbsOracle::MaxAbsOracle(std::vector<double> center)
    : center_(std::move(center)) {}

OracleReply MaxAbsOracle::query(std::span<const double> y) const {
  check_dim(y, dim(), "MaxAbsOracle");
  OptimalityReply reply;
  reply.subgradient.assign(y.size(), 0.0);
  std::size_t argmax = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double a = std::abs(y[i] - center_[i]);
    if (a > best) {  // first attaining index wins
      best = a;
      argmax = i;
    }
  }
  reply.value = std::max(best, 0.0);
  if (reply.value > 0.0) {
    reply.subgradient[argmax] = (y[argmax] >= center_[argmax]) ? 1.0 : -1.0;
  }
  return reply;
}

OracleReply FunctionOracle::query(std::span<const double> y) const {
  check_dim(y, dim(), "FunctionOracle");
  return fn_(y);
}

OracleReply NegatedOracle::query(std::span<const double> y) const {
  OracleReply reply = inner_.query(y);
  if (auto* opt = std::get_if<OptimalityReply>(&reply)) {
    opt->value = -opt->value;
    for (double& g : opt->subgradient) g = -g;
  }
  // Feasibility replies describe the localization geometry, not the
  // objective; they pass through unchanged.
  return reply;
}

KnapsackDualOracle::KnapsackDualOracle(KnapsackInstance instance)
    : instance_(std::move(instance)) {
  lo_.assign(instance_.num_items(), 0.0);
  hi_.resize(instance_.num_items());
  for (std::size_t i = 0; i < instance_.num_items(); ++i) {
    hi_[i] = static_cast<double>(instance_.multiplicity[i]);
  }
}

KnapsackDualOracle::KnapsackDualOracle(KnapsackInstance instance,
                                       std::vector<double> items_lo,
                                       std::vector<double> items_hi)
    : instance_(std::move(instance)),
      lo_(std::move(items_lo)),
      hi_(std::move(items_hi)) {
  if (lo_.size() != instance_.num_items() ||
      hi_.size() != instance_.num_items()) {
    throw DimensionMismatch(
        "KnapsackDualOracle: item bounds must match the item count");
  }
}

std::vector<double> KnapsackDualOracle::inner_solution(double lambda) const {
  std::vector<double> x(instance_.num_items());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double margin = instance_.profit[i] - lambda * instance_.weight[i];
    // Ties (margin exactly 0) keep the item out, so x(λ) is unique.
    x[i] = (margin > 0.0) ? hi_[i] : lo_[i];
  }
  return x;
}

OracleReply KnapsackDualOracle::query(std::span<const double> y) const {
  check_dim(y, 1, "KnapsackDualOracle");
  const double lambda = y[0];
  const std::vector<double> x = inner_solution(lambda);
  OptimalityReply reply;
  reply.value = lambda * instance_.capacity;
  double used = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    reply.value +=
        (instance_.profit[i] - lambda * instance_.weight[i]) * x[i];
    used += instance_.weight[i] * x[i];
  }
  reply.subgradient.assign(1, instance_.capacity - used);
  return reply;
}

std::pair<double, double> knapsack_dual_interval(const KnapsackInstance& inst) {
  double density = 1.0;
  for (std::size_t i = 0; i < inst.num_items(); ++i) {
    if (inst.weight[i] > 0.0) {
      density = std::max(density, inst.profit[i] / inst.weight[i]);
    }
  }
  return {0.0, 2.0 * density};
}

SetPartitionDualOracle::SetPartitionDualOracle(SetPartitionInstance instance)
    : instance_(std::move(instance)) {}

OracleReply SetPartitionDualOracle::query(std::span<const double> y) const {
  check_dim(y, dim(), "SetPartitionDualOracle");
  OptimalityReply reply;
  reply.subgradient.assign(y.size(), 1.0);  // 1 − column incidence of x(λ)
  for (double v : y) reply.value += v;
  for (std::size_t j = 0; j < instance_.num_columns(); ++j) {
    double reduced = instance_.cost[j];
    for (int e : instance_.columns[j]) reduced -= y[e];
    // Ties (reduced cost exactly 0) leave the column out.
    if (reduced < 0.0) {
      reply.value += reduced;
      for (int e : instance_.columns[j]) reply.subgradient[e] -= 1.0;
    }
  }
  return reply;
}

std::pair<double, double> setpartition_dual_interval(
    const SetPartitionInstance& inst) {
  double big = 1.0;
  for (double c : inst.cost) big = std::max(big, std::abs(c));
  return {-2.0 * big, 2.0 * big};
}

}  // namespace oracular
