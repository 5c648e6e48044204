// stpack: generate, solve, validate and benchmark Steiner tree packing instances.
//
// Exit codes: 0 feasible / valid, 2 no feasible solution, 1 usage or IO error.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "stp/depth.hpp"
#include "stp/format.hpp"
#include "stp/generators.hpp"
#include "stp/instance.hpp"
#include "stp/solution.hpp"
#include "stp/solver.hpp"

using namespace stp;

namespace {

constexpr int exit_ok = 0, exit_usage = 1, exit_infeasible = 2;

std::uint64_t default_seed()
{
  if (const char* s = std::getenv("STP_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring unparsable STP_SEED='" << s << "'\n";
    }
  }
  return 1;
}

// Flags shared by solve and bench, kept as strings until the subcommand runs so that
// every combination is checked before any work starts.
struct SolverFlags {
  std::string variant = "edstp", formalism = "branching", kernel = "auto", schedule = "sequential";
  int depth = 0, max_iters = 1000, conv_window = 20, reset = 0, every = 1;
  double gamma0 = 1e-5, noise = 1e-3, penalty = 0.0;
  std::uint64_t seed = default_seed();
  std::vector<std::string> heuristics{"spt", "mst"};
  std::string prune = "terminal";
  std::vector<int> order;
  bool no_stop = false;
  int max_degree = 12;

  void attach(CLI::App& app)
  {
    app.add_option("--variant", variant, "vdstp or edstp")->check(CLI::IsMember({"vdstp", "edstp"}));
    app.add_option("--formalism", formalism, "branching or flat")
        ->check(CLI::IsMember({"branching", "flat"}));
    app.add_option("--kernel", kernel, "auto, vdstp, neighocc or matching")
        ->check(CLI::IsMember({"auto", "vdstp", "neighocc", "matching"}));
    app.add_option("--schedule", schedule, "sequential or synchronous")
        ->check(CLI::IsMember({"sequential", "synchronous"}));
    app.add_option("--depth,-D", depth, "depth bound D (0 = automatic)")->check(CLI::NonNegativeNumber);
    app.add_option("--gamma0", gamma0, "reinforcement factor")->check(CLI::NonNegativeNumber);
    app.add_option("--max-iters", max_iters, "sweep budget")->check(CLI::NonNegativeNumber);
    app.add_option("--conv-window", conv_window, "sweeps of unchanged decisions")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed (default from STP_SEED, else 1)");
    app.add_option("--noise", noise, "initial message noise amplitude")->check(CLI::NonNegativeNumber);
    app.add_option("--reinforcement-reset", reset, "restart the reinforcement clock every N sweeps")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--heuristics", heuristics, "schemes run during the sweeps (spt, mst, none)")
        ->delimiter(',');
    app.add_option("--heuristic-every", every, "run heuristics every N sweeps (0 = never)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--penalty", penalty, "MST node penalty C (0 = 1 + total weight)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--prune", prune, "terminal or prize")->check(CLI::IsMember({"terminal", "prize"}));
    app.add_option("--order", order, "communication order for heuristics and greedy")->delimiter(',');
    app.add_flag("--no-stop", no_stop, "keep sweeping after convergence");
    app.add_option("--max-degree", max_degree, "degree cap of the occupation kernel")
        ->check(CLI::PositiveNumber);
  }

  SolverConfig build() const
  {
    SolverConfig c;
    c.variant = parse_variant(variant);
    c.formalism = parse_formalism(formalism);
    if (kernel == "auto")
      c.kernel = c.variant == Variant::VertexDisjoint ? KernelKind::VDStP : KernelKind::NeighOcc;
    else
      c.kernel = parse_kernel(kernel);
    c.schedule = parse_schedule(schedule);
    c.depth = depth;
    c.gamma0 = gamma0;
    c.max_iters = max_iters;
    c.conv_window = conv_window;
    c.seed = seed;
    c.noise_eps = noise;
    c.reinforcement_reset = reset;
    c.stop_on_convergence = !no_stop;
    c.limits.max_degree = max_degree;
    c.heuristics.schemes.clear();
    for (const auto& h : heuristics)
      if (h != "none") c.heuristics.schemes.push_back(parse_scheme(h));
    c.heuristics.every = every;
    c.heuristics.penalty = penalty;
    c.heuristics.prune = prune == "prize" ? PruneMode::PrizeThreshold : PruneMode::TerminalLeaves;
    c.heuristics.order = order;
    check_config(c);
    return c;
  }
};

void check_order(const std::vector<int>& order, int M)
{
  if (order.empty()) return;
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < static_cast<int>(sorted.size()); ++k)
    if (sorted[k] != k + 1 || static_cast<int>(sorted.size()) != M)
      throw std::invalid_argument("--order must be a permutation of 1.." + std::to_string(M));
}

std::string csv_field(const std::string& s)
{
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields)
{
  std::string out;
  for (std::size_t k = 0; k < fields.size(); ++k) out += (k ? "," : "") + csv_field(fields[k]);
  return out + "\n";
}

// kv-text lines to a two-row CSV.
std::string kv_to_csv(const std::string& kv)
{
  std::vector<std::string> keys, values;
  std::istringstream in(kv);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    keys.push_back(line.substr(0, eq));
    values.push_back(line.substr(eq + 1));
  }
  return csv_row(keys) + csv_row(values);
}

void write_text(const std::string& path, const std::string& text)
{
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------- gen

struct GenFlags {
  std::string type = "complete", weighting = "uniform", layers = "crossed", output;
  int nodes = 100, degree = 4, comms = 3, terminals = 8, nx = 4, ny = 4, nz = 2;
  std::uint64_t seed = default_seed();
};

Instance generate(const GenFlags& g)
{
  if (g.type == "complete")
    return gen_complete(g.nodes, g.comms, g.terminals,
                        g.weighting == "correlated" ? Weighting::Correlated : Weighting::Uniform, g.seed);
  if (g.type == "regular") return gen_regular(g.nodes, g.degree, g.comms, g.terminals, g.seed);
  return gen_grid(g.nx, g.ny, g.nz, g.layers == "aligned" ? LayerType::MultiAligned : LayerType::MultiCrossed,
                  g.comms, GridTerminals{{}, g.terminals}, g.seed);
}

void attach_gen(CLI::App& app, GenFlags& g)
{
  app.add_option("--type", g.type, "complete, regular or grid")
      ->check(CLI::IsMember({"complete", "regular", "grid"}));
  app.add_option("--nodes,-N", g.nodes, "node count")->check(CLI::PositiveNumber);
  app.add_option("--degree", g.degree, "degree of regular graphs")->check(CLI::PositiveNumber);
  app.add_option("--comms,-M", g.comms, "communications")->check(CLI::PositiveNumber);
  app.add_option("--terminals,-T", g.terminals, "terminals per communication")->check(CLI::PositiveNumber);
  app.add_option("--weighting", g.weighting, "uniform or correlated")
      ->check(CLI::IsMember({"uniform", "correlated"}));
  app.add_option("--nx", g.nx)->check(CLI::PositiveNumber);
  app.add_option("--ny", g.ny)->check(CLI::PositiveNumber);
  app.add_option("--nz", g.nz)->check(CLI::PositiveNumber);
  app.add_option("--layers", g.layers, "crossed or aligned")->check(CLI::IsMember({"crossed", "aligned"}));
  app.add_option("--seed", g.seed, "seed (default from STP_SEED, else 1)");
}

int cmd_gen(const GenFlags& g)
{
  const Instance inst = generate(g);
  if (g.output.empty() || g.output == "-")
    std::cout << serialize_instance(inst);
  else
    write_instance_file(inst, g.output);
  return exit_ok;
}

// ---------------------------------------------------------------- solve

struct SolveFlags {
  std::string input, solution_path, report_path, format = "kv";
  bool greedy = false;
};

int cmd_solve(const SolverFlags& sf, const SolveFlags& f)
{
  const SolverConfig config = sf.build();
  const Instance inst = read_instance_file(f.input);
  check_order(config.heuristics.order, inst.num_comms());

  RunResult run;
  try {
    run = solve(inst, config);
  } catch (const infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    std::cout << "status=infeasible\n";
    return exit_infeasible;
  }
  if (f.greedy) {
    SolverConfig single = config;
    single.heuristics.order.clear();
    const GreedyResult g = greedy_solve(inst, config.heuristics.order, single);
    run.report.greedy_energy = g.energy;
    run.report.greedy_packed = g.packed;
  }

  const std::string kv = report_to_kv(run.report);
  if (!f.report_path.empty()) write_text(f.report_path, f.format == "csv" ? kv_to_csv(kv) : kv);
  const bool feasible = run.best.feasible && run.best.energy;
  if (!f.solution_path.empty() && feasible) write_solution_file(run.best, f.solution_path);

  const auto& r = run.report;
  std::cout << "status=" << (feasible ? "feasible" : "infeasible")
            << " best_energy=" << (feasible ? format_real(*run.best.energy) : "INFEASIBLE")
            << " source=" << r.best_source << " ms_energy="
            << (r.ms_energy ? format_real(*r.ms_energy) : "INFEASIBLE")
            << " iterations=" << r.iterations << " converged=" << (r.converged ? "true" : "false")
            << "\n";
  return feasible ? exit_ok : exit_infeasible;
}

// ---------------------------------------------------------------- validate

struct ValidateFlags {
  std::string input, solution, variant = "edstp", formalism = "branching";
  int depth = 0;
};

int cmd_validate(const ValidateFlags& f)
{
  const Instance inst = read_instance_file(f.input);
  const Solution sol = read_solution_file(f.solution, inst);
  const Variant variant = parse_variant(f.variant);
  const ValidationOptions opt{variant, f.depth > 0, parse_formalism(f.formalism), f.depth};
  const ValidationReport rep = validate(sol, inst, opt);
  for (const auto& v : rep.violations) std::cout << "violation: " << v << "\n";
  const auto e = energy(sol, inst, variant);
  std::cout << "valid=" << (rep.ok() ? "true" : "false")
            << " energy=" << (rep.ok() && e ? format_real(*e) : "INFEASIBLE") << "\n";
  return rep.ok() ? exit_ok : exit_infeasible;
}

// ---------------------------------------------------------------- bench

struct BenchFlags {
  std::string type = "complete", weighting = "uniform", output;
  std::vector<int> nodes{100}, degrees{4}, comms{3}, terminals{8}, depths{5};
  std::vector<std::string> methods{"ms", "greedy"}, kernels{"auto"};
  int seeds = 5, jobs = 1;
  std::uint64_t seed_base = default_seed();
};

struct Cell {
  int nodes, degree, comms, terminals, depth;
  std::string kernel;
  std::uint64_t seed;
  auto key() const { return std::tie(nodes, degree, comms, terminals, depth, kernel, seed); }
};

struct Row {
  std::string method;
  std::optional<double> energy;
  int iterations = 0;
  bool converged = false;
  double wall_ms = 0.0;
};

std::vector<Row> run_cell(const BenchFlags& b, const SolverFlags& sf, const Cell& cell)
{
  GenFlags g;
  g.type = b.type;
  g.weighting = b.weighting;
  g.nodes = cell.nodes;
  g.degree = cell.degree;
  g.comms = cell.comms;
  g.terminals = cell.terminals;
  g.seed = cell.seed;
  const Instance inst = generate(g);

  SolverFlags local = sf;
  local.kernel = cell.kernel;
  local.depth = cell.depth;
  local.seed = cell.seed;
  const SolverConfig config = local.build();

  std::vector<Row> rows;
  for (const auto& m : b.methods) {
    Row row;
    row.method = m;
    const auto start = std::chrono::steady_clock::now();
    try {
      if (m == "ms") {
        const RunResult r = solve(inst, config);
        row.energy = r.best.feasible ? r.best.energy : std::nullopt;
        row.iterations = r.report.iterations;
        row.converged = r.report.converged;
      } else {
        SolverConfig single = config;
        single.heuristics.order.clear();
        const GreedyResult gr = greedy_solve(inst, config.heuristics.order, single);
        row.energy = gr.energy;
      }
    } catch (const infeasible_error&) {
      row.energy.reset();
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
  }
  return rows;
}

// Linear interpolation between order statistics.
double quantile(std::vector<double> v, double q)
{
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

int cmd_bench(const BenchFlags& b, const SolverFlags& sf)
{
  for (const auto& m : b.methods)
    if (m != "ms" && m != "greedy") throw std::invalid_argument("unknown method '" + m + "'");
  sf.build();  // flag conflicts surface before any work

  std::vector<Cell> cells;
  for (int n : b.nodes)
    for (int d : b.type == "regular" ? b.degrees : std::vector<int>{0})
      for (int M : b.comms)
        for (int T : b.terminals)
          for (int D : b.depths)
            for (const auto& k : b.kernels)
              for (int s = 0; s < b.seeds; ++s)
                cells.push_back({n, d, M, T, D, k, b.seed_base + static_cast<std::uint64_t>(s)});
  std::sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) { return x.key() < y.key(); });

  std::vector<std::vector<Row>> results(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c; (c = next++) < cells.size();) {
      try {
        results[c] = run_cell(b, sf, cells[c]);
      } catch (const std::exception& e) {
        errors[c] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < b.jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << csv_row({"type", "weighting", "nodes", "degree", "comms", "terminals", "depth", "kernel", "seed",
                  "method", "energy", "gap_vs_baseline", "iterations", "converged", "wall_ms"});
  auto params = [&](const Cell& c) {
    return std::vector<std::string>{b.type, b.weighting, std::to_string(c.nodes), std::to_string(c.degree),
                                    std::to_string(c.comms), std::to_string(c.terminals),
                                    std::to_string(c.depth), c.kernel};
  };
  // Aggregates per (parameters, method).
  struct Acc { std::vector<double> energy, gap, iterations, wall; int converged = 0, count = 0; };
  std::map<std::pair<std::vector<std::string>, std::string>, Acc> acc;

  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (!errors[c].empty()) {
      std::cerr << "cell seed " << cells[c].seed << ": " << errors[c] << "\n";
      for (const auto& m : b.methods) {
        auto f = params(cells[c]);
        f.insert(f.end(), {std::to_string(cells[c].seed), m, "INFEASIBLE", "NA", "0", "false", "0"});
        csv << csv_row(f);
      }
      continue;
    }
    std::optional<double> baseline;
    for (const auto& r : results[c])
      if (r.method == b.methods.front()) baseline = r.energy;
    for (const auto& r : results[c]) {
      std::optional<double> g;
      if (r.energy && baseline && *baseline > 0.0) g = gap(*r.energy, *baseline);
      auto f = params(cells[c]);
      f.insert(f.end(), {std::to_string(cells[c].seed), r.method,
                         r.energy ? format_real(*r.energy) : "INFEASIBLE", g ? format_real(*g) : "NA",
                         std::to_string(r.iterations), r.converged ? "true" : "false",
                         format_real(r.wall_ms)});
      csv << csv_row(f);
      Acc& a = acc[{params(cells[c]), r.method}];
      ++a.count;
      a.converged += r.converged;
      if (r.energy) a.energy.push_back(*r.energy);
      if (g) a.gap.push_back(*g);
      a.iterations.push_back(r.iterations);
      a.wall.push_back(r.wall_ms);
    }
  }
  for (const auto& [key, a] : acc) {
    for (const auto& [label, q] : {std::pair{"q1", 0.25}, {"median", 0.5}, {"q3", 0.75}}) {
      auto stat = [&](const std::vector<double>& v) { return v.empty() ? std::string("NA") : format_real(quantile(v, q)); };
      auto f = key.first;
      f.insert(f.end(), {label, key.second, stat(a.energy), stat(a.gap), stat(a.iterations),
                         format_real(static_cast<double>(a.converged) / a.count), stat(a.wall)});
      csv << csv_row(f);
    }
  }
  if (b.output.empty() || b.output == "-")
    std::cout << csv.str();
  else
    write_text(b.output, csv.str());
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Steiner tree packing with Max-Sum message passing"};
  app.require_subcommand(1);

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate an instance");
  attach_gen(*gen_cmd, gen);
  gen_cmd->add_option("--output,-o", gen.output, "instance file (default stdout)");

  SolverFlags solver_flags;
  SolveFlags solve_flags;
  auto* solve_cmd = app.add_subcommand("solve", "run Max-Sum with heuristics on an instance");
  solver_flags.attach(*solve_cmd);
  solve_cmd->add_option("input", solve_flags.input, "instance file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--solution", solve_flags.solution_path, "write the best solution here");
  solve_cmd->add_option("--report", solve_flags.report_path, "write the run report here");
  solve_cmd->add_option("--format", solve_flags.format, "report format: kv or csv")
      ->check(CLI::IsMember({"kv", "csv"}));
  solve_cmd->add_flag("--greedy", solve_flags.greedy, "also run the greedy baseline");

  ValidateFlags val;
  auto* val_cmd = app.add_subcommand("validate", "check a solution file against an instance");
  val_cmd->add_option("input", val.input, "instance file")->required()->check(CLI::ExistingFile);
  val_cmd->add_option("solution", val.solution, "solution file")->required()->check(CLI::ExistingFile);
  val_cmd->add_option("--variant", val.variant)->check(CLI::IsMember({"vdstp", "edstp"}));
  val_cmd->add_option("--formalism", val.formalism)->check(CLI::IsMember({"branching", "flat"}));
  val_cmd->add_option("--depth,-D", val.depth, "also check depth labels up to D")->check(CLI::NonNegativeNumber);

  BenchFlags bench;
  SolverFlags bench_solver;
  auto* bench_cmd = app.add_subcommand("bench", "parameter sweep to CSV");
  bench_solver.attach(*bench_cmd);
  bench_cmd->add_option("--type", bench.type)->check(CLI::IsMember({"complete", "regular"}));
  bench_cmd->add_option("--weighting", bench.weighting)->check(CLI::IsMember({"uniform", "correlated"}));
  bench_cmd->add_option("--nodes", bench.nodes)->delimiter(',');
  bench_cmd->add_option("--degrees", bench.degrees)->delimiter(',');
  bench_cmd->add_option("--comms", bench.comms)->delimiter(',');
  bench_cmd->add_option("--terminals", bench.terminals)->delimiter(',');
  bench_cmd->add_option("--depths", bench.depths)->delimiter(',');
  bench_cmd->add_option("--kernels", bench.kernels)->delimiter(',');
  bench_cmd->add_option("--methods", bench.methods, "ms,greedy; the first is the gap baseline")->delimiter(',');
  bench_cmd->add_option("--seeds", bench.seeds, "seeds per cell")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed-base", bench.seed_base);
  bench_cmd->add_option("--jobs,-j", bench.jobs, "worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--output,-o", bench.output, "CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*solve_cmd) return cmd_solve(solver_flags, solve_flags);
    if (*val_cmd) return cmd_validate(val);
    if (*bench_cmd) return cmd_bench(bench, bench_solver);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}
