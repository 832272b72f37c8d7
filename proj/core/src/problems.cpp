// SPDX-License-Identifier: Apache-2.0

#include "oracular/problems.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

#include "oracular/errors.hpp"

namespace oracular {

namespace {

constexpr double kKnapsackEnumCap = 2097152.0;  // 2^21 assignments
constexpr std::size_t kTspEnumCap = 9;          // (n-1)! tours
constexpr std::size_t kSetPartEnumCap = 22;     // 2^n column subsets

std::string fmt_num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

// --------------------------------------------------------------------------
// Conversions

MipProblem to_mip(const KnapsackInstance& instance) {
  const std::size_t n = instance.num_items();
  MipProblem p;
  p.sense = Sense::kMaximize;
  p.objective = instance.profit;
  p.lower.assign(n, 0.0);
  p.upper.resize(n);
  p.kind.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    p.upper[j] = static_cast<double>(instance.multiplicity[j]);
    p.kind[j] =
        (instance.multiplicity[j] <= 1) ? VarKind::kBinary : VarKind::kInteger;
  }
  LinearConstraint row;
  row.coefficients = instance.weight;
  row.relation = Relation::kLessEqual;
  row.rhs = instance.capacity;
  p.constraints.push_back(std::move(row));
  return p;
}

std::size_t tsp_var_index(std::size_t n, std::size_t i, std::size_t j) {
  return i * (n - 1) + (j < i ? j : j - 1);
}

std::pair<std::size_t, std::size_t> tsp_arc_of(std::size_t n, std::size_t var) {
  const std::size_t i = var / (n - 1);
  const std::size_t r = var % (n - 1);
  return {i, r < i ? r : r + 1};
}

MipProblem to_mip(const TspInstance& instance) {
  const std::size_t n = instance.n;
  const std::size_t vars = n * (n - 1);
  MipProblem p;
  p.sense = Sense::kMinimize;
  p.objective.resize(vars);
  for (std::size_t v = 0; v < vars; ++v) {
    const auto [i, j] = tsp_arc_of(n, v);
    p.objective[v] = instance.cost_at(i, j);
  }
  p.lower.assign(vars, 0.0);
  p.upper.assign(vars, 1.0);
  p.kind.assign(vars, VarKind::kBinary);

  for (std::size_t i = 0; i < n; ++i) {  // out-degree
    LinearConstraint row;
    row.coefficients.assign(vars, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.coefficients[tsp_var_index(n, i, j)] = 1.0;
    }
    row.relation = Relation::kEqual;
    row.rhs = 1.0;
    p.constraints.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < n; ++j) {  // in-degree
    LinearConstraint row;
    row.coefficients.assign(vars, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j) row.coefficients[tsp_var_index(n, i, j)] = 1.0;
    }
    row.relation = Relation::kEqual;
    row.rhs = 1.0;
    p.constraints.push_back(std::move(row));
  }
  return p;
}

MipProblem to_mip(const SetPartitionInstance& instance) {
  const std::size_t n = instance.num_columns();
  MipProblem p;
  p.sense = Sense::kMinimize;
  p.objective = instance.cost;
  p.lower.assign(n, 0.0);
  p.upper.assign(n, 1.0);
  p.kind.assign(n, VarKind::kBinary);
  p.constraints.resize(instance.num_elements);
  for (std::size_t e = 0; e < instance.num_elements; ++e) {
    p.constraints[e].coefficients.assign(n, 0.0);
    p.constraints[e].relation = Relation::kEqual;
    p.constraints[e].rhs = 1.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (int e : instance.columns[j]) {
      p.constraints[e].coefficients[j] = 1.0;
    }
  }
  return p;
}

// --------------------------------------------------------------------------
// Exhaustive reference solvers

Solution brute_force(const KnapsackInstance& instance) {
  const std::size_t n = instance.num_items();
  double states = 1.0;
  for (int m : instance.multiplicity) states *= static_cast<double>(m) + 1.0;
  if (states > kKnapsackEnumCap) {
    throw InstanceTooLarge("knapsack enumeration needs " + fmt_num(states) +
                           " states, cap is " + fmt_num(kKnapsackEnumCap));
  }

  std::vector<int> x(n, 0);
  std::vector<int> best_x;
  double best_profit = -std::numeric_limits<double>::infinity();
  bool found = false;
  while (true) {
    double weight = 0.0, profit = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      weight += instance.weight[j] * x[j];
      profit += instance.profit[j] * x[j];
    }
    if (weight <= instance.capacity) {
      const bool better =
          !found || profit > best_profit ||
          (profit == best_profit &&
           std::lexicographical_compare(x.begin(), x.end(), best_x.begin(),
                                        best_x.end()));
      if (better) {
        best_profit = profit;
        best_x = x;
        found = true;
      }
    }
    // Mixed-radix increment, least significant digit last so earlier
    // items vary slowest (keeps the scan order intuitive in a debugger).
    std::size_t d = n;
    while (d-- > 0) {
      if (x[d] < instance.multiplicity[d]) {
        ++x[d];
        std::fill(x.begin() + static_cast<long>(d) + 1, x.end(), 0);
        break;
      }
      if (d == 0) goto done;
    }
    if (n == 0) break;
  }
done:
  Solution out;
  out.status = SolStatus::kOptimal;  // x = 0 is always feasible
  out.objective = found ? best_profit : 0.0;
  out.x.assign(best_x.begin(), best_x.end());
  if (!found) out.x.assign(n, 0.0);
  return out;
}

Tour brute_force(const TspInstance& instance) {
  const std::size_t n = instance.n;
  if (n > kTspEnumCap) {
    throw InstanceTooLarge("tour enumeration is capped at " +
                           std::to_string(kTspEnumCap) + " cities, got " +
                           std::to_string(n));
  }
  Tour best;
  if (n <= 1) {
    best.order.assign(n, 0);
    return best;
  }
  std::vector<int> perm(n - 1);
  for (std::size_t i = 0; i < n - 1; ++i) perm[i] = static_cast<int>(i + 1);
  best.cost = std::numeric_limits<double>::infinity();
  do {
    double cost = instance.cost_at(0, perm[0]);
    for (std::size_t i = 0; i + 1 < perm.size(); ++i) {
      cost += instance.cost_at(perm[i], perm[i + 1]);
    }
    cost += instance.cost_at(perm.back(), 0);
    // next_permutation enumerates in ascending lexicographic order, so a
    // strict improvement rule keeps the lexicographically smallest
    // optimal tour.
    if (cost < best.cost) {
      best.cost = cost;
      best.order.assign(1, 0);
      best.order.insert(best.order.end(), perm.begin(), perm.end());
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Solution brute_force(const SetPartitionInstance& instance) {
  const std::size_t n = instance.num_columns();
  const std::size_t m = instance.num_elements;
  if (n > kSetPartEnumCap) {
    throw InstanceTooLarge("column subset enumeration is capped at " +
                           std::to_string(kSetPartEnumCap) + " columns, got " +
                           std::to_string(n));
  }
  if (m > 64) {
    throw InstanceTooLarge("element bitmasks support at most 64 elements");
  }

  std::vector<std::uint64_t> colmask(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    for (int e : instance.columns[j]) colmask[j] |= std::uint64_t{1} << e;
  }
  const std::uint64_t full =
      (m == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << m) - 1);

  auto lex_smaller = [n](std::uint64_t a, std::uint64_t b) {
    for (std::size_t j = 0; j < n; ++j) {
      const unsigned ba = (a >> j) & 1u, bb = (b >> j) & 1u;
      if (ba != bb) return ba < bb;
    }
    return false;
  };

  double best_cost = std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = 0;
  bool found = false;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::uint64_t cover = 0;
    double cost = 0.0;
    bool ok = true;
    for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) {
      const int j = std::countr_zero(rest);
      if (cover & colmask[j]) {  // an element would be covered twice
        ok = false;
        break;
      }
      cover |= colmask[j];
      cost += instance.cost[j];
    }
    if (!ok || cover != full) continue;
    if (!found || cost < best_cost ||
        (cost == best_cost && lex_smaller(mask, best_mask))) {
      best_cost = cost;
      best_mask = mask;
      found = true;
    }
  }

  Solution out;
  if (!found) {
    out.status = SolStatus::kInfeasible;
    return out;
  }
  out.status = SolStatus::kOptimal;
  out.objective = best_cost;
  out.x.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if ((best_mask >> j) & 1u) out.x[j] = 1.0;
  }
  return out;
}

// --------------------------------------------------------------------------
// Deterministic generation

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(next_u64());  // full range
  const auto wide = static_cast<unsigned __int128>(next_u64()) * range;
  return lo + static_cast<std::int64_t>(wide >> 64);
}

double Rng::uniform_real(double lo, double hi) {
  const double unit =
      static_cast<double>(next_u64() >> 11) * 0x1.0p-53;  // [0, 1)
  return lo + unit * (hi - lo);
}

KnapsackInstance generate_knapsack(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  KnapsackInstance inst;
  inst.profit.resize(n);
  inst.weight.resize(n);
  inst.multiplicity.assign(n, 1);
  double total_weight = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    inst.profit[j] = static_cast<double>(rng.uniform_int(1, 100));
    inst.weight[j] = static_cast<double>(rng.uniform_int(1, 100));
    total_weight += inst.weight[j];
  }
  inst.capacity = std::ceil(0.5 * total_weight);
  return inst;
}

TspInstance build_tsp_from_coords(
    std::vector<std::pair<double, double>> coords) {
  TspInstance inst;
  inst.n = coords.size();
  inst.coords = std::move(coords);
  inst.cost.assign(inst.n * inst.n, 0.0);
  for (std::size_t i = 0; i < inst.n; ++i) {
    for (std::size_t j = 0; j < inst.n; ++j) {
      if (i == j) continue;
      const double dx = inst.coords[i].first - inst.coords[j].first;
      const double dy = inst.coords[i].second - inst.coords[j].second;
      inst.cost[i * inst.n + j] = std::round(std::hypot(dx, dy));
    }
  }
  return inst;
}

TspInstance generate_tsp(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<double, double>> coords(n);
  for (std::size_t i = 0; i < n; ++i) {
    coords[i].first = static_cast<double>(rng.uniform_int(0, 1000));
    coords[i].second = static_cast<double>(rng.uniform_int(0, 1000));
  }
  return build_tsp_from_coords(std::move(coords));
}

SetPartitionInstance generate_setpartition(std::size_t num_elements,
                                           std::size_t num_columns,
                                           std::uint64_t seed) {
  Rng rng(seed);
  SetPartitionInstance inst;
  inst.num_elements = num_elements;
  inst.columns.resize(num_columns);
  for (std::size_t j = 0; j < num_columns; ++j) {
    auto& col = inst.columns[j];
    while (col.empty()) {
      for (std::size_t e = 0; e < num_elements; ++e) {
        if (rng.uniform_real(0.0, 1.0) < 0.4) col.push_back(static_cast<int>(e));
      }
    }
  }
  // Make sure every element appears somewhere, steering strays into a
  // column picked by index so the fix-up stays deterministic.
  std::vector<char> covered(num_elements, 0);
  for (const auto& col : inst.columns) {
    for (int e : col) covered[e] = 1;
  }
  for (std::size_t e = 0; e < num_elements; ++e) {
    if (covered[e]) continue;
    auto& col = inst.columns[e % num_columns];
    col.push_back(static_cast<int>(e));
    std::sort(col.begin(), col.end());
  }
  inst.cost.resize(num_columns);
  for (std::size_t j = 0; j < num_columns; ++j) {
    inst.cost[j] = 10.0 * static_cast<double>(inst.columns[j].size()) +
                   static_cast<double>(rng.uniform_int(0, 20));
  }
  return inst;
}

// --------------------------------------------------------------------------
// Instance files

namespace {

class LineScanner {
 public:
  explicit LineScanner(std::istream& in) : in_(in) {}

  // Advances to the next line with content; false at end of input.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      tokens.clear();
      std::istringstream ss(line);
      std::string tok;
      while (ss >> tok) {
        if (tok[0] == '#') break;  // rest of the line is a comment
        tokens.push_back(tok);
      }
      if (!tokens.empty()) return true;
    }
    return false;
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

double parse_double(const std::string& tok, int line) {
  double v = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) {
    throw ParseError(line, "expected a number, got '" + tok + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& tok, int line) {
  std::int64_t v = 0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p != end) {
    throw ParseError(line, "expected an integer, got '" + tok + "'");
  }
  return v;
}

std::vector<std::string> expect_line(LineScanner& scanner, std::size_t count,
                                     const char* what) {
  std::vector<std::string> tokens;
  if (!scanner.next(tokens)) {
    throw ParseError(scanner.line() + 1,
                     std::string("unexpected end of input, expected ") + what);
  }
  if (tokens.size() != count) {
    throw ParseError(scanner.line(), std::string("expected ") + what + " (" +
                                         std::to_string(count) +
                                         " fields), got " +
                                         std::to_string(tokens.size()));
  }
  return tokens;
}

Instance parse_knapsack(LineScanner& scanner,
                        const std::vector<std::string>& header) {
  const std::int64_t n = parse_int(header[1], scanner.line());
  if (n < 0) throw ParseError(scanner.line(), "item count must be >= 0");
  KnapsackInstance inst;
  inst.capacity = parse_double(header[2], scanner.line());
  if (inst.capacity < 0.0) {
    throw ParseError(scanner.line(), "capacity must be >= 0");
  }
  for (std::int64_t i = 0; i < n; ++i) {
    const auto t = expect_line(scanner, 3, "'profit weight multiplicity'");
    const int line = scanner.line();
    inst.profit.push_back(parse_double(t[0], line));
    inst.weight.push_back(parse_double(t[1], line));
    if (inst.weight.back() < 0.0) {
      throw ParseError(line, "item weight must be >= 0");
    }
    const std::int64_t mult = parse_int(t[2], line);
    if (mult < 0) throw ParseError(line, "multiplicity must be >= 0");
    inst.multiplicity.push_back(static_cast<int>(mult));
  }
  return inst;
}

Instance parse_tsp_matrix(LineScanner& scanner,
                          const std::vector<std::string>& header) {
  const std::int64_t n = parse_int(header[1], scanner.line());
  if (n < 2) throw ParseError(scanner.line(), "city count must be >= 2");
  TspInstance inst;
  inst.n = static_cast<std::size_t>(n);
  inst.cost.resize(inst.n * inst.n);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto t =
        expect_line(scanner, static_cast<std::size_t>(n), "a cost matrix row");
    for (std::int64_t j = 0; j < n; ++j) {
      inst.cost[i * n + j] = parse_double(t[j], scanner.line());
    }
  }
  return inst;
}

Instance parse_tsp_euclidean(LineScanner& scanner,
                             const std::vector<std::string>& header) {
  const std::int64_t n = parse_int(header[1], scanner.line());
  if (n < 2) throw ParseError(scanner.line(), "city count must be >= 2");
  std::vector<std::pair<double, double>> coords;
  for (std::int64_t i = 0; i < n; ++i) {
    const auto t = expect_line(scanner, 2, "'x y'");
    coords.emplace_back(parse_double(t[0], scanner.line()),
                        parse_double(t[1], scanner.line()));
  }
  return build_tsp_from_coords(std::move(coords));
}

Instance parse_setpartition(LineScanner& scanner,
                            const std::vector<std::string>& header) {
  const std::int64_t m = parse_int(header[1], scanner.line());
  const std::int64_t n = parse_int(header[2], scanner.line());
  if (m < 1) throw ParseError(scanner.line(), "element count must be >= 1");
  if (n < 0) throw ParseError(scanner.line(), "column count must be >= 0");
  SetPartitionInstance inst;
  inst.num_elements = static_cast<std::size_t>(m);
  for (std::int64_t j = 0; j < n; ++j) {
    std::vector<std::string> t;
    if (!scanner.next(t)) {
      throw ParseError(scanner.line() + 1,
                       "unexpected end of input, expected a column");
    }
    const int line = scanner.line();
    if (t.size() < 2) {
      throw ParseError(line, "expected 'cost k element...', got " +
                                 std::to_string(t.size()) + " fields");
    }
    const double cost = parse_double(t[0], line);
    const std::int64_t k = parse_int(t[1], line);
    if (k < 1) throw ParseError(line, "column must list at least one element");
    if (t.size() != static_cast<std::size_t>(k) + 2) {
      throw ParseError(line, "column announces " + std::to_string(k) +
                                 " elements but lists " +
                                 std::to_string(t.size() - 2));
    }
    std::vector<int> members;
    for (std::int64_t q = 0; q < k; ++q) {
      const std::int64_t e = parse_int(t[2 + q], line);
      if (e < 1 || e > m) {
        throw ParseError(line, "element id " + std::to_string(e) +
                                   " outside 1.." + std::to_string(m));
      }
      members.push_back(static_cast<int>(e - 1));
    }
    std::sort(members.begin(), members.end());
    if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
      throw ParseError(line, "column lists an element twice");
    }
    inst.cost.push_back(cost);
    inst.columns.push_back(std::move(members));
  }
  return inst;
}

}  // namespace

Instance parse_instance(std::istream& in) {
  LineScanner scanner(in);
  std::vector<std::string> header;
  if (!scanner.next(header)) {
    throw ParseError(1, "empty input, expected an instance header");
  }
  Instance result;
  if (header[0] == "KP" && header.size() == 3) {
    result = parse_knapsack(scanner, header);
  } else if (header[0] == "TSP" && header.size() == 2) {
    result = parse_tsp_matrix(scanner, header);
  } else if (header[0] == "TSP-EUC" && header.size() == 2) {
    result = parse_tsp_euclidean(scanner, header);
  } else if (header[0] == "SP" && header.size() == 3) {
    result = parse_setpartition(scanner, header);
  } else {
    throw ParseError(scanner.line(),
                     "unrecognized instance header '" + header[0] + "'");
  }
  std::vector<std::string> extra;
  if (scanner.next(extra)) {
    throw ParseError(scanner.line(), "unexpected content after the instance");
  }
  return result;
}

Instance parse_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open instance file '" + path + "'");
  }
  return parse_instance(in);
}

std::string format_instance(const Instance& instance) {
  std::ostringstream out;
  if (const auto* kp = std::get_if<KnapsackInstance>(&instance)) {
    out << "KP " << kp->num_items() << ' ' << fmt_num(kp->capacity) << '\n';
    for (std::size_t j = 0; j < kp->num_items(); ++j) {
      out << fmt_num(kp->profit[j]) << ' ' << fmt_num(kp->weight[j]) << ' '
          << kp->multiplicity[j] << '\n';
    }
  } else if (const auto* tsp = std::get_if<TspInstance>(&instance)) {
    if (!tsp->coords.empty()) {
      out << "TSP-EUC " << tsp->n << '\n';
      for (const auto& [x, y] : tsp->coords) {
        out << fmt_num(x) << ' ' << fmt_num(y) << '\n';
      }
    } else {
      out << "TSP " << tsp->n << '\n';
      for (std::size_t i = 0; i < tsp->n; ++i) {
        for (std::size_t j = 0; j < tsp->n; ++j) {
          if (j > 0) out << ' ';
          out << fmt_num(tsp->cost_at(i, j));
        }
        out << '\n';
      }
    }
  } else {
    const auto& sp = std::get<SetPartitionInstance>(instance);
    out << "SP " << sp.num_elements << ' ' << sp.num_columns() << '\n';
    for (std::size_t j = 0; j < sp.num_columns(); ++j) {
      out << fmt_num(sp.cost[j]) << ' ' << sp.columns[j].size();
      for (int e : sp.columns[j]) out << ' ' << e + 1;
      out << '\n';
    }
  }
  return out.str();
}

void write_instance(const Instance& instance, std::ostream& out) {
  out << format_instance(instance);
}

}  // namespace oracular
