// SPDX-License-Identifier: Apache-2.0

#ifndef ORACULAR_PROBLEMS_HPP_
#define ORACULAR_PROBLEMS_HPP_

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "oracular/model.hpp"

namespace oracular {

// ---------------------------------------------------------------------------
// Instances

// Bounded knapsack: maximize profit·x subject to weight·x ≤ capacity,
// 0 ≤ xᵢ ≤ multiplicityᵢ, x integer.
struct KnapsackInstance {
  double capacity = 0.0;
  std::vector<double> profit;
  std::vector<double> weight;
  std::vector<int> multiplicity;

  std::size_t num_items() const { return profit.size(); }
};

// Travelling salesman on a dense (possibly asymmetric) cost matrix.
// `coords` is non-empty only for instances built from planar points, in
// which case cost(i,j) = round(euclidean distance).
struct TspInstance {
  std::size_t n = 0;
  std::vector<double> cost;  // n×n row-major; diagonal unused
  std::vector<std::pair<double, double>> coords;

  double cost_at(std::size_t i, std::size_t j) const { return cost[i * n + j]; }
};

// Set partitioning: pick columns so every element is covered exactly once,
// at minimum total cost.
struct SetPartitionInstance {
  std::size_t num_elements = 0;
  std::vector<double> cost;                // one per column
  std::vector<std::vector<int>> columns;   // sorted 0-based element ids

  std::size_t num_columns() const { return cost.size(); }
};

struct Tour {
  std::vector<int> order;  // visiting sequence, starts at city 0
  double cost = 0.0;
};

// ---------------------------------------------------------------------------
// Conversions to the shared MIP form

MipProblem to_mip(const KnapsackInstance& instance);

// Directed assignment relaxation: one binary per arc (i ≠ j), out- and
// in-degree equality rows.  Subtour elimination is left to the search.
MipProblem to_mip(const TspInstance& instance);

// Arc variable indexing used by the TSP formulation.
std::size_t tsp_var_index(std::size_t n, std::size_t i, std::size_t j);
std::pair<std::size_t, std::size_t> tsp_arc_of(std::size_t n, std::size_t var);

MipProblem to_mip(const SetPartitionInstance& instance);

// ---------------------------------------------------------------------------
// Exhaustive reference solvers
//
// Deliberately brute force: these are the ground truth the clever solvers
// are measured against, so they share no code with them.  Each throws
// InstanceTooLarge beyond its enumeration cap.  Ties are broken toward the
// lexicographically smallest solution vector so results are unique.

Solution brute_force(const KnapsackInstance& instance);
Tour brute_force(const TspInstance& instance);
Solution brute_force(const SetPartitionInstance& instance);

// ---------------------------------------------------------------------------
// Deterministic generation

// Thin wrapper over mt19937_64 with hand-rolled mappings, so generated
// streams are identical across standard libraries (std::uniform_*
// distributions are not pinned by the standard).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform integer in [lo, hi] (inclusive), fixed-point multiply mapping.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Uniform double in [lo, hi) from the top 53 bits.
  double uniform_real(double lo, double hi);

 private:
  std::mt19937_64 gen_;
};

KnapsackInstance generate_knapsack(std::size_t n, std::uint64_t seed);
TspInstance generate_tsp(std::size_t n, std::uint64_t seed);
SetPartitionInstance generate_setpartition(std::size_t num_elements,
                                           std::size_t num_columns,
                                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// Instance files
//
// Plain-text formats, one instance per file.  Lines starting with '#' and
// blank lines are skipped.  Headers: "KP n capacity", "TSP n" (dense
// matrix), "TSP-EUC n" (planar points), "SP m n".  Numbers are written
// with shortest round-trip formatting, so write→parse is bit-exact.

using Instance = std::variant<KnapsackInstance, TspInstance, SetPartitionInstance>;

Instance parse_instance(std::istream& in);           // throws ParseError
Instance parse_instance_file(const std::string& path);
void write_instance(const Instance& instance, std::ostream& out);
std::string format_instance(const Instance& instance);

}  // namespace oracular

#endif  // ORACULAR_PROBLEMS_HPP_
