// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "oracular/accpm.hpp"
#include "oracular/bnb.hpp"
#include "oracular/errors.hpp"
#include "oracular/oracle.hpp"
#include "oracular/problems.hpp"

namespace oracular::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest round-trip decimal form, matching the instance writer.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt(long v) { return std::to_string(v); }

const char* status_name(SolStatus status) {
  switch (status) {
    case SolStatus::kOptimal: return "optimal";
    case SolStatus::kFeasible: return "feasible";
    case SolStatus::kInfeasible: return "infeasible";
    case SolStatus::kUnbounded: return "unbounded";
    case SolStatus::kGapLimit: return "gap-limit";
  }
  return "unknown";
}

const char* reason_name(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::kGapConverged: return "gap-converged";
    case TerminationReason::kMaxIterations: return "max-iterations";
    case TerminationReason::kNullSubgradient: return "null-subgradient";
    case TerminationReason::kIncoherentOracle: return "incoherent-oracle";
    case TerminationReason::kCriticalFailure: return "critical-failure";
  }
  return "unknown";
}

int exit_code_for(const BnbResult& r) {
  switch (r.status) {
    case SolStatus::kOptimal: return 0;
    case SolStatus::kFeasible: return 1;
    case SolStatus::kInfeasible:
    case SolStatus::kUnbounded: return 2;
    case SolStatus::kGapLimit:
      // Within the requested gap counts as a feasible-but-unproven result;
      // stopping with nothing in hand proves nothing either way.
      return r.has_incumbent() ? 1 : 2;
  }
  return 4;
}

void print_result(std::ostream& out, const BnbResult& r, int workers) {
  out << "status=" << status_name(r.status) << "\n"
      << "objective=" << fmt(r.incumbent.value) << "\n"
      << "bound=" << fmt(r.lower_bound) << "\n"
      << "gap=" << fmt(r.gap()) << "\n"
      << "nodes=" << fmt(r.stats.nodes_explored) << "\n"
      << "time_ms=" << fmt(r.wall_seconds * 1000.0) << "\n"
      << "workers=" << workers << "\n";
}

// One trace stream shared by all solvers: the first column counts oracle
// iterations (cutting-plane runs) or explored nodes (tree searches).
class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path) : file_(path) {
    if (!file_) {
      throw std::invalid_argument("cannot open trace file: " + path);
    }
    file_ << "iteration,incumbent,bound,gap,cuts,workers_active\n";
  }

  void row(long iteration, double incumbent, double bound, double gap,
           long cuts, int workers_active) {
    file_ << iteration << ',' << fmt(incumbent) << ',' << fmt(bound) << ','
          << fmt(gap) << ',' << cuts << ',' << workers_active << "\n";
  }

 private:
  std::ofstream file_;
};

double relative_gap(double incumbent, double bound) {
  if (!std::isfinite(incumbent) || !std::isfinite(bound)) return kInf;
  return std::abs(incumbent - bound) / std::max(1.0, std::abs(incumbent));
}

int workers_active_of(const std::vector<long>& per_worker) {
  int active = 0;
  for (long c : per_worker) {
    if (c > 0) ++active;
  }
  return std::max(active, 1);
}

// Default worker count: --workers flag beats ORACULAR_THREADS beats 1.
int default_workers() {
  if (const char* env = std::getenv("ORACULAR_THREADS")) {
    int value = 0;
    const auto res = std::from_chars(env, env + std::string(env).size(), value);
    if (res.ec == std::errc() && value >= 1) return value;
  }
  return 1;
}

struct SolveOptions {
  std::string path;
  int workers = 1;
  double gap_tolerance = 0.0;
  long node_limit = 0;
  double time_limit = 0.0;
  bool best_first = false;
  std::string trace_path;
  std::string bounder = "lp";
};

BnbConfig make_config(const SolveOptions& opt, TraceWriter* trace) {
  BnbConfig cfg;
  cfg.workers = opt.workers;
  cfg.gap_tolerance = opt.gap_tolerance;
  cfg.node_limit = opt.node_limit;
  cfg.time_limit_seconds = opt.time_limit;
  cfg.best_first = opt.best_first;
  if (trace != nullptr) {
    cfg.progress_interval_seconds = 0.05;
    cfg.on_progress = [trace](const BnbProgress& p) {
      trace->row(p.nodes_explored, p.incumbent_value, p.global_bound,
                 relative_gap(p.incumbent_value, p.global_bound),
                 p.cuts_added, workers_active_of(p.per_worker_nodes));
    };
  }
  return cfg;
}

void trace_final(TraceWriter* trace, const BnbResult& r) {
  if (trace == nullptr) return;
  trace->row(r.stats.nodes_explored, r.incumbent.value, r.lower_bound,
             r.gap(), r.stats.cuts_added,
             workers_active_of(r.stats.per_worker_nodes));
}

template <typename T>
const T& expect_instance(const Instance& instance, const char* kind) {
  const T* typed = std::get_if<T>(&instance);
  if (typed == nullptr) {
    throw std::invalid_argument(std::string("input file is not a ") + kind +
                                " instance");
  }
  return *typed;
}

int run_solve_kp(const SolveOptions& opt, std::ostream& out,
                 std::ostream& err) {
  const Instance parsed = parse_instance_file(opt.path);
  const auto& kp = expect_instance<KnapsackInstance>(parsed, "knapsack");
  err << "# knapsack: " << kp.num_items() << " items, capacity "
      << fmt(kp.capacity) << "\n";

  std::optional<TraceWriter> trace;
  if (!opt.trace_path.empty()) trace.emplace(opt.trace_path);
  BnbConfig cfg = make_config(opt, trace ? &*trace : nullptr);
  if (opt.bounder == "dual") {
    cfg.bounder = make_knapsack_dual_bounder(kp);
  } else if (opt.bounder != "lp") {
    throw std::invalid_argument("unknown bounder: " + opt.bounder);
  }

  const BnbResult r = solve_mip(to_mip(kp), cfg);
  trace_final(trace ? &*trace : nullptr, r);
  print_result(out, r, opt.workers);
  return exit_code_for(r);
}

int run_solve_tsp(const SolveOptions& opt, std::ostream& out,
                  std::ostream& err) {
  const Instance parsed = parse_instance_file(opt.path);
  const auto& tsp = expect_instance<TspInstance>(parsed, "TSP");
  err << "# tsp: " << tsp.n << " cities\n";

  std::optional<TraceWriter> trace;
  if (!opt.trace_path.empty()) trace.emplace(opt.trace_path);
  const BnbConfig cfg = make_config(opt, trace ? &*trace : nullptr);

  const TspResult r = solve_tsp(tsp, cfg);
  trace_final(trace ? &*trace : nullptr, r.details);
  print_result(out, r.details, opt.workers);
  if (!r.tour.order.empty()) {
    out << "tour=";
    for (std::size_t k = 0; k < r.tour.order.size(); ++k) {
      out << (k == 0 ? "" : "-") << r.tour.order[k];
    }
    out << "\n";
  }
  return exit_code_for(r.details);
}

int run_solve_sp(const SolveOptions& opt, std::ostream& out,
                 std::ostream& err) {
  const Instance parsed = parse_instance_file(opt.path);
  const auto& sp = expect_instance<SetPartitionInstance>(parsed,
                                                         "set-partitioning");
  err << "# set partitioning: " << sp.num_elements << " elements, "
      << sp.num_columns() << " columns\n";

  std::optional<TraceWriter> trace;
  if (!opt.trace_path.empty()) trace.emplace(opt.trace_path);
  const BnbConfig cfg = make_config(opt, trace ? &*trace : nullptr);

  const BnbResult r = solve_mip(to_mip(sp), cfg);
  trace_final(trace ? &*trace : nullptr, r);
  print_result(out, r, opt.workers);
  return exit_code_for(r);
}

struct DemoOptions {
  std::string oracle = "quadratic";
  std::size_t dim = 2;
  double tolerance = 1e-6;
  int max_iterations = 0;
  std::string policy = "keep-all";
  std::size_t budget = 0;
  std::string trace_path;
};

CutPolicy parse_policy(const std::string& name) {
  if (name == "keep-all") return CutPolicy::kKeepAll;
  if (name == "drop-redundant") return CutPolicy::kDropRedundant;
  if (name == "aggregate") return CutPolicy::kAggregate;
  if (name == "weighted") return CutPolicy::kWeighted;
  throw std::invalid_argument("unknown cut policy: " + name);
}

int run_accpm_demo(const DemoOptions& opt, std::ostream& out,
                   std::ostream& err) {
  std::unique_ptr<Oracle> oracle;
  Box box;
  if (opt.oracle == "quadratic" || opt.oracle == "maxabs") {
    if (opt.dim == 0) throw std::invalid_argument("--dim must be positive");
    std::vector<double> center(opt.dim, 0.3);
    if (opt.oracle == "quadratic") {
      oracle = std::make_unique<QuadraticOracle>(center);
    } else {
      oracle = std::make_unique<MaxAbsOracle>(center);
    }
    box.lo.assign(opt.dim, -1.0);
    box.hi.assign(opt.dim, 1.0);
  } else if (opt.oracle == "knapsack-dual") {
    KnapsackInstance kp;
    kp.capacity = 9.0;
    kp.profit = {10.0, 13.0, 7.0};
    kp.weight = {4.0, 6.0, 3.0};
    kp.multiplicity = {1, 1, 1};
    auto dual = std::make_unique<KnapsackDualOracle>(kp);
    const auto interval = knapsack_dual_interval(kp);
    box.lo = {interval.first};
    box.hi = {interval.second};
    oracle = std::move(dual);
  } else {
    throw std::invalid_argument("unknown oracle: " + opt.oracle +
                                " (try quadratic, maxabs, knapsack-dual)");
  }
  err << "# accpm: oracle=" << opt.oracle << " dim=" << oracle->dim() << "\n";

  AccpmConfig cfg;
  cfg.gap_tolerance = opt.tolerance;
  cfg.max_iterations = opt.max_iterations;
  cfg.policy = parse_policy(opt.policy);
  cfg.cut_budget = opt.budget;

  const auto t0 = std::chrono::steady_clock::now();
  const AccpmResult r = accpm_solve(*oracle, box, cfg);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();

  if (!opt.trace_path.empty()) {
    TraceWriter trace(opt.trace_path);
    for (const TraceRecord& t : r.trace) {
      trace.row(t.iteration, t.best_value, t.lower_bound,
                relative_gap(t.best_value, t.lower_bound),
                static_cast<long>(t.cut_count), 1);
    }
  }

  const char* status = "feasible";
  int code = 1;
  switch (r.reason) {
    case TerminationReason::kGapConverged:
    case TerminationReason::kNullSubgradient:
      status = "optimal";
      code = 0;
      break;
    case TerminationReason::kMaxIterations:
      status = "feasible";
      code = 1;
      break;
    case TerminationReason::kIncoherentOracle:
    case TerminationReason::kCriticalFailure:
      status = "error";
      code = 4;
      break;
  }
  out << "status=" << status << "\n"
      << "reason=" << reason_name(r.reason) << "\n"
      << "objective=" << fmt(r.best_value) << "\n"
      << "bound=" << fmt(r.lower_bound) << "\n"
      << "gap=" << fmt(relative_gap(r.best_value, r.lower_bound)) << "\n"
      << "nodes=" << r.iterations << "\n"
      << "time_ms=" << fmt(ms) << "\n"
      << "workers=1\n";
  if (!r.diagnostic.empty()) err << "# " << r.diagnostic << "\n";
  return code;
}

struct GenOptions {
  std::string kind;
  std::size_t size = 0;
  std::uint64_t seed = 1;
  std::size_t elements = 0;  // set partitioning only; 0 = derived
  std::string out_path;
};

int run_gen(const GenOptions& opt, std::ostream& out) {
  Instance instance;
  if (opt.kind == "kp") {
    instance = generate_knapsack(opt.size, opt.seed);
  } else if (opt.kind == "tsp") {
    instance = generate_tsp(opt.size, opt.seed);
  } else if (opt.kind == "sp") {
    const std::size_t elements =
        opt.elements > 0 ? opt.elements
                         : std::max<std::size_t>(2, std::min<std::size_t>(
                                                        12, opt.size / 2));
    instance = generate_setpartition(elements, opt.size, opt.seed);
  } else {
    throw std::invalid_argument("unknown instance kind: " + opt.kind +
                                " (try kp, tsp, sp)");
  }
  const std::string text = format_instance(instance);
  if (opt.out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(opt.out_path);
    if (!file) {
      throw std::invalid_argument("cannot open output file: " + opt.out_path);
    }
    file << text;
  }
  return 0;
}

struct BenchOptions {
  std::string kind = "kp";
  std::vector<std::size_t> sizes;
  std::vector<int> workers = {1, 2, 4};
  int seeds = 3;
  std::uint64_t seed_base = 1;
  int repeats = 3;
};

int run_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<std::size_t> sizes = opt.sizes;
  if (sizes.empty()) {
    if (opt.kind == "kp") sizes = {10, 12};
    else if (opt.kind == "tsp") sizes = {6, 7};
    else if (opt.kind == "sp") sizes = {15, 20};
    else throw std::invalid_argument("unknown instance kind: " + opt.kind);
  }

  out << "kind,size,seed,workers,time_ms_median,nodes,max_worker_share\n";
  for (const std::size_t size : sizes) {
    for (int s = 0; s < opt.seeds; ++s) {
      const std::uint64_t seed = opt.seed_base + static_cast<std::uint64_t>(s);
      for (const int workers : opt.workers) {
        BnbConfig cfg;
        cfg.workers = workers;
        std::vector<double> times;
        BnbResult last;
        for (int rep = 0; rep < std::max(1, opt.repeats); ++rep) {
          if (opt.kind == "kp") {
            last = solve_mip(to_mip(generate_knapsack(size, seed)), cfg);
          } else if (opt.kind == "tsp") {
            last = solve_tsp(generate_tsp(size, seed), cfg).details;
          } else {
            const std::size_t elements = std::max<std::size_t>(
                2, std::min<std::size_t>(12, size / 2));
            last = solve_mip(to_mip(generate_setpartition(elements, size, seed)),
                             cfg);
          }
          times.push_back(last.wall_seconds * 1000.0);
        }
        std::sort(times.begin(), times.end());
        const double median = times[times.size() / 2];
        long max_nodes = 0;
        for (long c : last.stats.per_worker_nodes) {
          max_nodes = std::max(max_nodes, c);
        }
        const double share =
            last.stats.nodes_explored > 0
                ? static_cast<double>(max_nodes) /
                      static_cast<double>(last.stats.nodes_explored)
                : 0.0;
        out << opt.kind << ',' << size << ',' << seed << ',' << workers << ','
            << fmt(median) << ',' << last.stats.nodes_explored << ','
            << fmt(share) << "\n";
      }
      err << "# bench: " << opt.kind << " size=" << size << " seed=" << seed
          << " done\n";
    }
  }
  return 0;
}

void add_solve_flags(CLI::App* cmd, SolveOptions& opt) {
  cmd->add_option("file", opt.path, "instance file")->required();
  cmd->add_option("--workers", opt.workers,
                  "worker threads (default: ORACULAR_THREADS or 1)");
  cmd->add_option("--gap", opt.gap_tolerance,
                  "stop at this relative optimality gap (0 = exact)");
  cmd->add_option("--node-limit", opt.node_limit, "stop after this many nodes");
  cmd->add_option("--time-limit", opt.time_limit, "stop after this many seconds");
  cmd->add_flag("--best-first", opt.best_first,
                "best-first node order (single worker only)");
  cmd->add_option("--trace", opt.trace_path, "write a per-progress CSV trace");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"oracular: cutting-plane and branch-and-bound toolkit"};
  app.require_subcommand(1);

  SolveOptions kp_opt, tsp_opt, sp_opt;
  kp_opt.workers = tsp_opt.workers = sp_opt.workers = default_workers();

  CLI::App* kp = app.add_subcommand("solve-kp", "solve a knapsack instance");
  add_solve_flags(kp, kp_opt);
  kp->add_option("--bounder", kp_opt.bounder,
                 "node bounding: lp (relaxation) or dual (Lagrangian)");

  CLI::App* tsp = app.add_subcommand("solve-tsp", "solve a TSP instance");
  add_solve_flags(tsp, tsp_opt);

  CLI::App* sp = app.add_subcommand("solve-sp",
                                    "solve a set-partitioning instance");
  add_solve_flags(sp, sp_opt);

  DemoOptions demo_opt;
  CLI::App* demo = app.add_subcommand(
      "accpm-demo", "run the cutting-plane engine on a built-in oracle");
  demo->add_option("--oracle", demo_opt.oracle,
                   "quadratic, maxabs, or knapsack-dual");
  demo->add_option("--dim", demo_opt.dim, "dimension (quadratic/maxabs)");
  demo->add_option("--tol", demo_opt.tolerance, "relative gap tolerance");
  demo->add_option("--max-iter", demo_opt.max_iterations,
                   "iteration cap (0 = 50 per dimension)");
  demo->add_option("--cut-policy", demo_opt.policy,
                   "keep-all, drop-redundant, aggregate, or weighted");
  demo->add_option("--budget", demo_opt.budget, "cut budget (0 = unlimited)");
  demo->add_option("--trace", demo_opt.trace_path,
                   "write a per-iteration CSV trace");

  GenOptions gen_opt;
  CLI::App* gen = app.add_subcommand("gen", "generate a seeded instance file");
  gen->add_option("kind", gen_opt.kind, "kp, tsp, or sp")->required();
  gen->add_option("size", gen_opt.size,
                  "items (kp), cities (tsp), or columns (sp)")
      ->required();
  gen->add_option("--seed", gen_opt.seed, "random seed");
  gen->add_option("--elements", gen_opt.elements,
                  "element count (sp only; default size/2 capped at 12)");
  gen->add_option("-o,--output", gen_opt.out_path,
                  "output file (default: stdout)");

  BenchOptions bench_opt;
  CLI::App* bench = app.add_subcommand(
      "bench", "sweep workers x instances and emit a CSV of runtimes");
  bench->add_option("kind", bench_opt.kind, "kp, tsp, or sp");
  bench->add_option("--sizes", bench_opt.sizes, "instance sizes")
      ->delimiter(',');
  bench->add_option("--workers", bench_opt.workers, "worker counts")
      ->delimiter(',');
  bench->add_option("--seeds", bench_opt.seeds, "seeds per size");
  bench->add_option("--seed", bench_opt.seed_base, "first seed");
  bench->add_option("--repeats", bench_opt.repeats,
                    "repetitions per cell (median reported)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }

  try {
    if (app.got_subcommand(kp)) return run_solve_kp(kp_opt, out, err);
    if (app.got_subcommand(tsp)) return run_solve_tsp(tsp_opt, out, err);
    if (app.got_subcommand(sp)) return run_solve_sp(sp_opt, out, err);
    if (app.got_subcommand(demo)) return run_accpm_demo(demo_opt, out, err);
    if (app.got_subcommand(gen)) return run_gen(gen_opt, out);
    if (app.got_subcommand(bench)) return run_bench(bench_opt, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const InstanceTooLarge& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 4;
  }
  err << "error: no subcommand given\n";
  return 3;
}

}  // namespace oracular::cli
