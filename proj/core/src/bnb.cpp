// SPDX-License-Identifier: Apache-2.0

#include "oracular/bnb.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <deque>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "oracular/errors.hpp"
#include "oracular/oracle.hpp"
#include "oracular/simplex.hpp"

namespace oracular {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPruneEps = 1e-9;  // prune when bound ≥ incumbent − this
constexpr int kMaxSeparationRounds = 200;

LinearConstraint cut_to_row(const Cut& cut) {
  LinearConstraint row;
  row.coefficients = cut.normal;
  row.relation = Relation::kLessEqual;
  row.rhs = cut.rhs;
  return row;
}

// Effective variable bounds of a node: base bounds tightened by fixings.
void apply_fixings(const MipProblem& problem, const Node& node,
                   std::vector<double>& lo, std::vector<double>& hi) {
  lo = problem.lower;
  hi = problem.upper;
  for (const NodeFixing& f : node.fixings) {
    if (f.var >= lo.size()) {
      throw std::invalid_argument("node fixing references variable " +
                                  std::to_string(f.var) + " of " +
                                  std::to_string(lo.size()));
    }
    lo[f.var] = std::max(lo[f.var], f.lower);
    hi[f.var] = std::min(hi[f.var], f.upper);
  }
}

// Fractional integer variable closest to 1/2 (ties: lowest index).
std::optional<std::size_t> most_fractional(const MipProblem& problem,
                                           std::span<const double> x,
                                           double tol) {
  std::optional<std::size_t> best;
  double best_dist = kInf;
  for (std::size_t i = 0; i < problem.num_vars(); ++i) {
    if (problem.kind[i] == VarKind::kContinuous) continue;
    const double frac = x[i] - std::floor(x[i]);
    if (frac <= tol || frac >= 1.0 - tol) continue;
    const double dist = std::abs(frac - 0.5);
    if (dist < best_dist - 1e-15) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

std::pair<Node, Node> make_children(const Node& node, std::size_t var,
                                    double value, double lo, double hi) {
  Node down = node;
  Node up = node;
  down.depth = up.depth = node.depth + 1;
  down.fixings.push_back({var, lo, std::floor(value)});
  up.fixings.push_back({var, std::ceil(value), hi});
  return {std::move(down), std::move(up)};
}

struct Shard {
  std::mutex mu;
  std::deque<Node> q;
};

// Best-first ordering: smallest (parent_bound, seq) at the heap front.
bool heap_less(const Node& a, const Node& b) {
  if (a.parent_bound != b.parent_bound) return a.parent_bound > b.parent_bound;
  return a.seq > b.seq;
}

class Engine {
 public:
  Engine(const MipProblem& min_problem, const BnbConfig& config,
         Sense original_sense)
      : prob_(min_problem), cfg_(config), orig_sense_(original_sense),
        workers_(config.workers) {
    shards_.reserve(static_cast<std::size_t>(workers_));
    for (int w = 0; w < workers_; ++w) {
      shards_.push_back(std::make_unique<Shard>());
    }
    per_worker_ = std::make_unique<std::atomic<long>[]>(
        static_cast<std::size_t>(workers_));
    current_bound_ = std::make_unique<std::atomic<double>[]>(
        static_cast<std::size_t>(workers_));
    for (int w = 0; w < workers_; ++w) {
      per_worker_[w].store(0, std::memory_order_relaxed);
      current_bound_[w].store(kInf, std::memory_order_relaxed);
    }
    if (cfg_.bounder) {
      bounder_ = cfg_.bounder;
    } else {
      const double itol = cfg_.tolerances.integrality;
      bounder_ = [itol](const MipProblem& p, std::span<const double> lo,
                        std::span<const double> hi,
                        const std::vector<LinearConstraint>& rows) {
        return lp_bound(p, lo, hi, rows, itol);
      };
    }
  }

  BnbResult run();

 private:
  static NodeEvaluation lp_bound(const MipProblem& problem,
                                 std::span<const double> lo,
                                 std::span<const double> hi,
                                 const std::vector<LinearConstraint>& rows,
                                 double integrality_tol);

  void worker_loop(int w);
  void process(Node node, int w);
  void try_incumbent(std::vector<double> x);
  void push_node(Node&& node, int w);
  bool try_pop(int w, Node& out);
  void requeue(int w, Node&& node);
  double scan_global_bound();
  void maybe_gap_stop();
  void maybe_progress();
  void request_stop(StopReason reason);
  double elapsed_seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0_).count();
  }
  double to_original(double v) const {
    return orig_sense_ == Sense::kMaximize ? -v : v;
  }

  const MipProblem& prob_;  // canonical minimization form
  BnbConfig cfg_;
  Sense orig_sense_;
  int workers_;
  Bounder bounder_;

  std::vector<std::unique_ptr<Shard>> shards_;
  std::unique_ptr<std::atomic<long>[]> per_worker_;
  std::unique_ptr<std::atomic<double>[]> current_bound_;

  std::atomic<long> in_flight_{0};
  std::atomic<std::size_t> open_count_{0};
  std::atomic<std::size_t> peak_open_{0};
  std::atomic<long> explored_{0};
  std::atomic<long> pruned_{0};
  std::atomic<long> branched_{0};
  std::atomic<long> leaves_{0};
  std::atomic<long> cuts_added_{0};
  std::atomic<long> steals_{0};
  std::atomic<long> seq_{0};

  std::atomic<bool> stop_{false};
  std::atomic<int> stop_reason_{-1};
  std::atomic<bool> unbounded_{false};

  std::atomic<double> inc_value_{kInf};  // lock-free mirror for pruning
  std::mutex inc_mu_;
  Incumbent inc_;

  std::mutex progress_mu_;
  std::atomic<long> last_progress_ms_{0};
  std::chrono::steady_clock::time_point t0_;

  std::mutex error_mu_;
  std::exception_ptr error_;
};

NodeEvaluation Engine::lp_bound(const MipProblem& problem,
                                std::span<const double> lo,
                                std::span<const double> hi,
                                const std::vector<LinearConstraint>& rows,
                                double integrality_tol) {
  MipProblem lp;
  lp.sense = Sense::kMinimize;
  lp.objective = problem.objective;
  lp.constraints = problem.constraints;
  lp.constraints.insert(lp.constraints.end(), rows.begin(), rows.end());
  lp.lower.assign(lo.begin(), lo.end());
  lp.upper.assign(hi.begin(), hi.end());
  lp.kind.assign(problem.num_vars(), VarKind::kContinuous);

  LpResult r = solve_lp(lp);
  NodeEvaluation ev;
  if (r.status == LpStatus::kInfeasible) return ev;
  if (r.status == LpStatus::kUnbounded) {
    ev.unbounded = true;
    return ev;
  }
  ev.feasible = true;
  ev.bound = r.objective;
  ev.x = std::move(r.x);
  ev.integral = true;
  for (std::size_t i = 0; i < problem.num_vars(); ++i) {
    if (problem.kind[i] == VarKind::kContinuous) continue;
    if (std::abs(ev.x[i] - std::round(ev.x[i])) > integrality_tol) {
      ev.integral = false;
      break;
    }
  }
  return ev;
}

void Engine::push_node(Node&& node, int w) {
  node.seq = seq_.fetch_add(1, std::memory_order_relaxed);
  in_flight_.fetch_add(1, std::memory_order_release);
  Shard& shard = *shards_[static_cast<std::size_t>(w)];
  {
    std::lock_guard<std::mutex> lock(shard.mu);
    shard.q.push_back(std::move(node));
    if (cfg_.best_first) {
      std::push_heap(shard.q.begin(), shard.q.end(), heap_less);
    }
  }
  const std::size_t open = open_count_.fetch_add(1, std::memory_order_relaxed) + 1;
  std::size_t peak = peak_open_.load(std::memory_order_relaxed);
  while (open > peak &&
         !peak_open_.compare_exchange_weak(peak, open,
                                           std::memory_order_relaxed)) {
  }
}

bool Engine::try_pop(int w, Node& out) {
  Shard& own = *shards_[static_cast<std::size_t>(w)];
  {
    std::lock_guard<std::mutex> lock(own.mu);
    if (!own.q.empty()) {
      if (cfg_.best_first) {
        std::pop_heap(own.q.begin(), own.q.end(), heap_less);
      }
      out = std::move(own.q.back());
      own.q.pop_back();
      current_bound_[w].store(out.parent_bound, std::memory_order_relaxed);
      open_count_.fetch_sub(1, std::memory_order_relaxed);
      return true;
    }
  }
  for (int k = 1; k < workers_; ++k) {
    const int v = (w + k) % workers_;
    Shard& victim = *shards_[static_cast<std::size_t>(v)];
    std::lock_guard<std::mutex> lock(victim.mu);
    if (!victim.q.empty()) {
      out = std::move(victim.q.front());  // oldest: closest to the root
      victim.q.pop_front();
      current_bound_[w].store(out.parent_bound, std::memory_order_relaxed);
      open_count_.fetch_sub(1, std::memory_order_relaxed);
      steals_.fetch_add(1, std::memory_order_relaxed);
      return true;
    }
  }
  return false;
}

void Engine::requeue(int w, Node&& node) {
  Shard& shard = *shards_[static_cast<std::size_t>(w)];
  {
    std::lock_guard<std::mutex> lock(shard.mu);
    shard.q.push_back(std::move(node));
    if (cfg_.best_first) {
      std::push_heap(shard.q.begin(), shard.q.end(), heap_less);
    }
  }
  open_count_.fetch_add(1, std::memory_order_relaxed);
  current_bound_[w].store(kInf, std::memory_order_relaxed);
}

void Engine::request_stop(StopReason reason) {
  bool expected = false;
  if (stop_.compare_exchange_strong(expected, true)) {
    stop_reason_.store(static_cast<int>(reason), std::memory_order_relaxed);
  }
}

double Engine::scan_global_bound() {
  double bound = inc_value_.load(std::memory_order_relaxed);
  for (auto& shard : shards_) {
    std::lock_guard<std::mutex> lock(shard->mu);
    for (const Node& node : shard->q) {
      bound = std::min(bound, node.parent_bound);
    }
  }
  // Nodes currently being processed were published to current_bound_
  // under their shard's lock before leaving the queue, so after the
  // sweep above this covers every unfinished subtree.
  for (int w = 0; w < workers_; ++w) {
    bound = std::min(bound, current_bound_[w].load(std::memory_order_relaxed));
  }
  return bound;
}

void Engine::maybe_gap_stop() {
  if (cfg_.gap_tolerance <= 0.0 || stop_.load(std::memory_order_relaxed)) {
    return;
  }
  const double inc = inc_value_.load(std::memory_order_relaxed);
  if (!(inc < kInf)) return;
  const double bound = scan_global_bound();
  if (inc - bound <= cfg_.gap_tolerance * std::max(1.0, std::abs(inc))) {
    request_stop(StopReason::kGapLimit);
  }
}

void Engine::maybe_progress() {
  if (!cfg_.on_progress) return;
  const long now_ms = static_cast<long>(elapsed_seconds() * 1000.0);
  const long interval_ms =
      static_cast<long>(cfg_.progress_interval_seconds * 1000.0);
  long last = last_progress_ms_.load(std::memory_order_relaxed);
  if (now_ms - last < interval_ms) return;
  if (!last_progress_ms_.compare_exchange_strong(last, now_ms,
                                                 std::memory_order_relaxed)) {
    return;  // another worker is reporting this tick
  }
  BnbProgress p;
  p.nodes_explored = explored_.load(std::memory_order_relaxed);
  p.incumbent_value = to_original(inc_value_.load(std::memory_order_relaxed));
  p.global_bound = to_original(scan_global_bound());
  p.cuts_added = cuts_added_.load(std::memory_order_relaxed);
  p.elapsed_seconds = elapsed_seconds();
  p.per_worker_nodes.resize(static_cast<std::size_t>(workers_));
  for (int w = 0; w < workers_; ++w) {
    p.per_worker_nodes[static_cast<std::size_t>(w)] =
        per_worker_[w].load(std::memory_order_relaxed);
  }
  std::lock_guard<std::mutex> lock(progress_mu_);
  cfg_.on_progress(p);
}

void Engine::try_incumbent(std::vector<double> x) {
  const Evaluation ev = evaluate(prob_, x, cfg_.tolerances);
  if (!(ev.max_violation <= cfg_.tolerances.feasibility) || !ev.integral) {
    return;
  }
  std::lock_guard<std::mutex> lock(inc_mu_);
  if (ev.objective < inc_.value || inc_.x.empty()) {
    inc_.x = std::move(x);
    inc_.value = ev.objective;
    inc_.found_at = explored_.load(std::memory_order_relaxed);
    inc_value_.store(ev.objective, std::memory_order_relaxed);
  }
}

void Engine::process(Node node, int w) {
  if (node.parent_bound >=
      inc_value_.load(std::memory_order_relaxed) - kPruneEps) {
    pruned_.fetch_add(1, std::memory_order_relaxed);
    return;
  }
  std::vector<double> lo, hi;
  apply_fixings(prob_, node, lo, hi);
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) {  // contradictory fixings: empty domain
      pruned_.fetch_add(1, std::memory_order_relaxed);
      return;
    }
  }
  std::vector<LinearConstraint> rows;
  rows.reserve(node.local_cuts.size());
  for (const Cut& cut : node.local_cuts) rows.push_back(cut_to_row(cut));

  for (int round = 0; round < kMaxSeparationRounds; ++round) {
    NodeEvaluation ev = bounder_(prob_, lo, hi, rows);
    if (ev.unbounded) {
      unbounded_.store(true, std::memory_order_relaxed);
      request_stop(StopReason::kExhausted);
      return;
    }
    if (ev.feasible) {
      ev.bound = std::max(node.parent_bound, ev.bound);
    }
    if (cfg_.node_inspect) {
      cfg_.node_inspect(node, ev,
                        inc_value_.load(std::memory_order_relaxed));
    }
    if (!ev.feasible) {
      pruned_.fetch_add(1, std::memory_order_relaxed);
      return;
    }
    if (ev.bound >= inc_value_.load(std::memory_order_relaxed) - kPruneEps) {
      pruned_.fetch_add(1, std::memory_order_relaxed);
      return;
    }
    if (ev.candidate.has_value()) {
      try_incumbent(std::move(*ev.candidate));
      maybe_gap_stop();
      if (ev.bound >=
          inc_value_.load(std::memory_order_relaxed) - kPruneEps) {
        pruned_.fetch_add(1, std::memory_order_relaxed);
        return;
      }
    }
    if (ev.integral) {
      if (cfg_.lazy_separator) {
        std::vector<Cut> cuts = cfg_.lazy_separator(ev.x);
        if (!cuts.empty()) {
          cuts_added_.fetch_add(static_cast<long>(cuts.size()),
                                std::memory_order_relaxed);
          for (Cut& cut : cuts) {
            rows.push_back(cut_to_row(cut));
            node.local_cuts.push_back(std::move(cut));
          }
          continue;  // bound this node again with the new rows
        }
      }
      std::vector<double> snapped = ev.x;
      for (std::size_t i = 0; i < snapped.size(); ++i) {
        if (prob_.kind[i] != VarKind::kContinuous) {
          snapped[i] = std::round(snapped[i]);
        }
      }
      try_incumbent(std::move(snapped));
      maybe_gap_stop();
      leaves_.fetch_add(1, std::memory_order_relaxed);
      return;
    }

    // Branch.  A bounder may nominate the variable; otherwise take the
    // integer variable with fractional part closest to 1/2.
    std::size_t var;
    if (ev.branch_var.has_value()) {
      var = *ev.branch_var;
    } else {
      const auto pick =
          most_fractional(prob_, ev.x, cfg_.tolerances.integrality);
      if (!pick.has_value()) {
        throw std::logic_error(
            "bnb: bounder reported a non-integral point with no fractional "
            "integer variable");
      }
      var = *pick;
    }
    double value = ev.x[var];
    const double frac = value - std::floor(value);
    if (frac <= cfg_.tolerances.integrality ||
        frac >= 1.0 - cfg_.tolerances.integrality) {
      // Integral branch value (custom bounders): dichotomize the domain.
      value = (lo[var] + hi[var]) / 2.0;
    }
    node.parent_bound = ev.bound;
    auto children = make_children(node, var, value, lo[var], hi[var]);
    branched_.fetch_add(1, std::memory_order_relaxed);
    push_node(std::move(children.first), w);
    push_node(std::move(children.second), w);
    return;
  }
  throw std::runtime_error("bnb: lazy separation did not settle within " +
                           std::to_string(kMaxSeparationRounds) + " rounds");
}

void Engine::worker_loop(int w) {
  try {
    Node node;
    long processed = 0;
    while (true) {
      if (stop_.load(std::memory_order_relaxed)) return;
      if (cfg_.time_limit_seconds > 0.0 &&
          elapsed_seconds() > cfg_.time_limit_seconds) {
        request_stop(StopReason::kTimeLimit);
        return;
      }
      if (!try_pop(w, node)) {
        if (in_flight_.load(std::memory_order_acquire) == 0) return;
        std::this_thread::yield();
        continue;
      }
      if (cfg_.node_limit > 0 &&
          explored_.load(std::memory_order_relaxed) >= cfg_.node_limit) {
        requeue(w, std::move(node));  // keep the final bound honest
        request_stop(StopReason::kNodeLimit);
        return;
      }
      explored_.fetch_add(1, std::memory_order_relaxed);
      per_worker_[w].fetch_add(1, std::memory_order_relaxed);
      process(std::move(node), w);
      current_bound_[w].store(kInf, std::memory_order_relaxed);
      in_flight_.fetch_sub(1, std::memory_order_release);
      if (++processed % 64 == 0) maybe_gap_stop();
      maybe_progress();
    }
  } catch (...) {
    {
      std::lock_guard<std::mutex> lock(error_mu_);
      if (!error_) error_ = std::current_exception();
    }
    stop_.store(true, std::memory_order_relaxed);
  }
}

BnbResult Engine::run() {
  t0_ = std::chrono::steady_clock::now();
  inc_.value = kInf;

  Node root;
  root.parent_bound = -kInf;
  push_node(std::move(root), 0);

  if (workers_ == 1) {
    worker_loop(0);  // inline: fully deterministic single-worker runs
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers_));
    for (int w = 0; w < workers_; ++w) {
      threads.emplace_back([this, w] { worker_loop(w); });
    }
    for (std::thread& t : threads) t.join();
  }
  if (error_) std::rethrow_exception(error_);

  BnbResult res;
  res.stats.nodes_explored = explored_.load();
  res.stats.nodes_pruned = pruned_.load();
  res.stats.nodes_branched = branched_.load();
  res.stats.nodes_leaf = leaves_.load();
  res.stats.cuts_added = cuts_added_.load();
  res.stats.peak_pool_size = peak_open_.load();
  res.stats.steals = steals_.load();
  res.stats.per_worker_nodes.resize(static_cast<std::size_t>(workers_));
  for (int w = 0; w < workers_; ++w) {
    res.stats.per_worker_nodes[static_cast<std::size_t>(w)] =
        per_worker_[w].load();
  }
  res.wall_seconds = elapsed_seconds();

  const bool stopped = stop_.load();
  const double inc = inc_.value;
  double bound;
  if (unbounded_.load()) {
    bound = -kInf;
  } else if (!stopped) {
    bound = inc;  // exhausted: the tree proves the incumbent (or emptiness)
  } else {
    bound = scan_global_bound();
  }

  if (stopped) {
    res.stop_reason = static_cast<StopReason>(stop_reason_.load());
  } else {
    res.stop_reason = StopReason::kExhausted;
  }

  if (unbounded_.load()) {
    res.status = SolStatus::kUnbounded;
  } else if (!stopped) {
    res.status = inc < kInf ? SolStatus::kOptimal : SolStatus::kInfeasible;
  } else if (res.stop_reason == StopReason::kGapLimit) {
    res.status = SolStatus::kGapLimit;
  } else {
    res.status = inc < kInf ? SolStatus::kFeasible : SolStatus::kGapLimit;
  }

  res.incumbent.x = inc_.x;
  res.incumbent.found_at = inc_.found_at;
  res.incumbent.value = to_original(inc);
  res.lower_bound = to_original(bound);
  return res;
}

}  // namespace

double BnbResult::gap() const {
  if (incumbent.x.empty() || !std::isfinite(incumbent.value) ||
      !std::isfinite(lower_bound)) {
    return kInf;
  }
  return std::abs(incumbent.value - lower_bound) /
         std::max(1.0, std::abs(incumbent.value));
}

std::pair<Node, Node> branch(const Node& node,
                             std::span<const double> lp_solution,
                             const MipProblem& problem,
                             double integrality_tol) {
  if (lp_solution.size() != problem.num_vars()) {
    throw DimensionMismatch("branch: solution has size " +
                            std::to_string(lp_solution.size()) +
                            ", expected " +
                            std::to_string(problem.num_vars()));
  }
  const auto var = most_fractional(problem, lp_solution, integrality_tol);
  if (!var.has_value()) {
    throw std::logic_error("branch: no integer variable is fractional");
  }
  std::vector<double> lo, hi;
  apply_fixings(problem, node, lo, hi);
  return make_children(node, *var, lp_solution[*var], lo[*var], hi[*var]);
}

namespace {

// Successor array of an integral, degree-feasible assignment solution.
std::vector<std::size_t> successors(const TspInstance& instance,
                                    std::span<const double> x) {
  const std::size_t n = instance.n;
  if (x.size() != n * (n - 1)) {
    throw DimensionMismatch("assignment solution has size " +
                            std::to_string(x.size()) + ", expected " +
                            std::to_string(n * (n - 1)));
  }
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> succ(n, kUnset);
  std::vector<int> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = x[tsp_var_index(n, i, j)];
      const double r = std::round(v);
      if (std::abs(v - r) > 1e-6 || (r != 0.0 && r != 1.0)) {
        throw std::invalid_argument(
            "assignment solution is not integral at arc (" +
            std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (r == 1.0) {
        if (succ[i] != kUnset) {
          throw std::invalid_argument("city " + std::to_string(i) +
                                      " has out-degree > 1");
        }
        succ[i] = j;
        ++indegree[j];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (succ[i] == kUnset || indegree[i] != 1) {
      throw std::invalid_argument("city " + std::to_string(i) +
                                  " violates the degree constraints");
    }
  }
  return succ;
}

}  // namespace

std::vector<Cut> separate_subtours(const TspInstance& instance,
                                   std::span<const double> x) {
  const std::size_t n = instance.n;
  const std::vector<std::size_t> succ = successors(instance, x);

  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::size_t>> cycles;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> cycle;
    std::size_t i = start;
    while (!seen[i]) {
      seen[i] = 1;
      cycle.push_back(i);
      i = succ[i];
    }
    cycles.push_back(std::move(cycle));
  }
  if (cycles.size() == 1) return {};

  std::vector<Cut> cuts;
  cuts.reserve(cycles.size());
  for (const auto& cycle : cycles) {
    Cut cut;
    cut.normal.assign(n * (n - 1), 0.0);
    for (std::size_t a : cycle) {
      for (std::size_t b : cycle) {
        if (a != b) cut.normal[tsp_var_index(n, a, b)] = 1.0;
      }
    }
    cut.rhs = static_cast<double>(cycle.size()) - 1.0;
    cut.origin = CutOrigin::kFeasibility;
    cuts.push_back(std::move(cut));
  }
  return cuts;
}

Tour tour_from_assignment(const TspInstance& instance,
                          std::span<const double> x) {
  const std::vector<std::size_t> succ = successors(instance, x);
  const std::size_t n = instance.n;
  Tour tour;
  tour.order.reserve(n);
  std::size_t i = 0;
  do {
    tour.order.push_back(static_cast<int>(i));
    i = succ[i];
  } while (i != 0 && tour.order.size() <= n);
  if (tour.order.size() != n) {
    throw std::invalid_argument(
        "assignment solution decomposes into more than one cycle");
  }
  tour.cost = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    tour.cost += instance.cost_at(static_cast<std::size_t>(tour.order[k]),
                                  static_cast<std::size_t>(tour.order[(k + 1) % n]));
  }
  return tour;
}

BnbResult solve_mip(const MipProblem& problem, const BnbConfig& config) {
  const std::vector<std::string> issues = validate(problem);
  if (!issues.empty()) {
    throw std::invalid_argument("solve_mip: " + issues.front());
  }
  for (std::size_t i = 0; i < problem.num_vars(); ++i) {
    if (!std::isfinite(problem.lower[i]) || !std::isfinite(problem.upper[i])) {
      throw std::invalid_argument(
          "solve_mip: every variable must have finite bounds");
    }
  }
  if (config.workers < 1) {
    throw std::invalid_argument("solve_mip: workers must be >= 1");
  }
  if (config.best_first && config.workers > 1) {
    throw std::invalid_argument(
        "solve_mip: best-first selection is single-worker only");
  }

  MipProblem canonical = problem;
  if (problem.sense == Sense::kMaximize) {
    canonical.sense = Sense::kMinimize;
    for (double& c : canonical.objective) c = -c;
  }
  Engine engine(canonical, config, problem.sense);
  return engine.run();
}

BnbResult run_parallel(const MipProblem& problem, int workers,
                       const BnbConfig& config) {
  BnbConfig cfg = config;
  cfg.workers = workers;
  return solve_mip(problem, cfg);
}

TspResult solve_tsp(const TspInstance& instance, const BnbConfig& config) {
  const MipProblem mip = to_mip(instance);
  BnbConfig cfg = config;
  cfg.lazy_separator = [&instance](std::span<const double> x) {
    return separate_subtours(instance, x);
  };
  TspResult out;
  out.details = solve_mip(mip, cfg);
  if (out.details.has_incumbent()) {
    out.tour = tour_from_assignment(instance, out.details.incumbent.x);
  }
  return out;
}

Bounder make_knapsack_dual_bounder(const KnapsackInstance& instance) {
  const auto interval = knapsack_dual_interval(instance);
  return [instance, interval](
             const MipProblem& problem, std::span<const double> lo,
             std::span<const double> hi,
             const std::vector<LinearConstraint>& rows) -> NodeEvaluation {
    (void)problem;
    (void)rows;
    const std::size_t n = instance.profit.size();
    NodeEvaluation ev;

    std::vector<double> item_lo(n), item_hi(n);
    double committed = 0.0;
    bool all_fixed = true;
    for (std::size_t i = 0; i < n; ++i) {
      item_lo[i] = std::ceil(lo[i] - 1e-9);
      item_hi[i] = std::floor(hi[i] + 1e-9);
      if (item_lo[i] > item_hi[i]) return ev;  // empty domain
      committed += instance.weight[i] * item_lo[i];
      if (item_lo[i] != item_hi[i]) all_fixed = false;
    }
    if (committed > instance.capacity + 1e-9) return ev;  // over capacity

    if (all_fixed) {
      double profit = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        profit += instance.profit[i] * item_lo[i];
      }
      ev.feasible = true;
      ev.integral = true;
      ev.bound = -profit;  // minimization form
      ev.x = item_lo;
      return ev;
    }

    const KnapsackDualOracle oracle(instance, item_lo, item_hi);
    Box box{{interval.first}, {interval.second}};
    AccpmConfig acfg;
    acfg.gap_tolerance = 1e-6;
    acfg.max_iterations = 60;
    const AccpmResult ares = accpm_solve(oracle, box, acfg);

    double dual = ares.best_value;
    double lambda =
        ares.best_point.empty() ? 0.0 : ares.best_point.front();
    if (!std::isfinite(dual)) {
      // Even an unconverged run bounds by weak duality; fall back to λ=0.
      lambda = 0.0;
      const OracleReply at_zero = oracle.query(std::vector<double>{0.0});
      dual = std::get<OptimalityReply>(at_zero).value;
    }

    ev.feasible = true;
    ev.bound = -dual;
    ev.x = oracle.inner_solution(lambda);
    double load = 0.0;
    for (std::size_t i = 0; i < n; ++i) load += instance.weight[i] * ev.x[i];
    if (load <= instance.capacity + 1e-9) ev.candidate = ev.x;

    std::optional<std::size_t> pick;
    double best_margin = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if (item_lo[i] == item_hi[i]) continue;
      const double margin =
          std::abs(instance.profit[i] - lambda * instance.weight[i]);
      if (margin < best_margin - 1e-15) {
        best_margin = margin;
        pick = i;
      }
    }
    ev.branch_var = pick;  // always set: not all variables were fixed
    return ev;
  };
}

}  // namespace oracular
