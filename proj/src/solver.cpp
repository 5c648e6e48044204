#include "stp/solver.hpp"

#include <chrono>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "stp/depth.hpp"
#include "stp/format.hpp"

namespace stp {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start)
{
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string energy_text(const std::optional<double>& e)
{
  return e ? format_real(*e) : "INFEASIBLE";
}

void require_reachable(const Instance& inst)
{
  for (int mu = 1; mu <= inst.num_comms(); ++mu) {
    const auto hops = hop_distances(inst, inst.root(mu));
    for (int t : inst.terminals(mu))
      if (hops[t] < 0)
        throw infeasible_error("terminal " + std::to_string(t + 1) + " of communication "
                               + std::to_string(mu) + " cannot reach its root");
  }
}

}  // namespace

void check_config(const SolverConfig& c)
{
  if (c.conv_window < 1) throw std::invalid_argument("conv_window must be at least 1");
  if (c.max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
  if (c.depth < 0) throw std::invalid_argument("depth must be positive (or 0 for automatic)");
  if (!(c.gamma0 >= 0.0)) throw std::invalid_argument("gamma0 must be nonnegative");
  if (!(c.noise_eps >= 0.0)) throw std::invalid_argument("noise_eps must be nonnegative");
  if (c.reinforcement_reset < 0) throw std::invalid_argument("reinforcement_reset must be >= 0");
  if (c.heuristics.every < 0) throw std::invalid_argument("heuristic cadence must be >= 0");
  if (c.kernel == KernelKind::VDStP && c.variant != Variant::VertexDisjoint)
    throw std::invalid_argument("kernel vdstp requires variant vdstp");
  if (c.kernel != KernelKind::VDStP && c.variant != Variant::EdgeDisjoint)
    throw std::invalid_argument("kernel " + to_string(c.kernel) + " requires variant edstp");
  if (c.kernel == KernelKind::Matching && c.formalism != Formalism::Branching)
    throw std::invalid_argument("kernel matching supports only the branching formalism");
}

std::vector<int> extract_decision(const CavityField& fields)
{
  std::vector<int> out(fields.num_edges());
  for (int e = 0; e < fields.num_edges(); ++e) {
    int best = 0;
    for (int s = 1; s < fields.values.rows(); ++s)
      if (fields.values(s, e) > fields.values(best, e)) best = s;
    out[e] = best;
  }
  return out;
}

bool check_convergence(const std::vector<std::vector<int>>& history, int window)
{
  if (window < 1 || static_cast<int>(history.size()) < window) return false;
  const auto& last = history.back();
  for (int k = 2; k <= window; ++k)
    if (history[history.size() - k] != last) return false;
  return true;
}

bool compute_fields(const Instance& inst, const MessageTable& raw, const CavityField* prev,
                    double gamma, CavityField& out)
{
  const StateSpace& sp = raw.space;
  CavityField f{sp, Eigen::ArrayXXd(sp.size(), inst.num_edges())};
  for (int e = 0; e < inst.num_edges(); ++e) {
    Eigen::ArrayXd v = raw.col(2 * e) + reverse_states(raw.col(2 * e + 1), sp);
    if (prev && gamma > 0.0) v += gamma * prev->values.col(e);
    if (!normalize_in_place(v)) return false;
    f.values.col(e) = v;
  }
  out = std::move(f);
  return true;
}

SolverState init_state(const Instance& inst, const StateSpace& space, const SolverConfig& config)
{
  SolverState st;
  st.raw = init_messages(inst, space, derive_seed(config.seed, 0), config.noise_eps);
  st.reinforced = st.raw;
  if (!compute_fields(inst, st.raw, nullptr, 0.0, st.fields))
    throw infeasible_error("initial messages admit no edge state");
  return st;
}

void sweep(const Instance& inst, SolverState& st, const SolverConfig& config, int t,
           Rng& order_rng)
{
  const double gamma = t * config.gamma0;
  const bool flat = config.formalism == Formalism::Flat;
  const bool sync = config.schedule == Schedule::SynchronousTwoBuffer;

  std::vector<int> nodes(inst.num_nodes());
  std::iota(nodes.begin(), nodes.end(), 0);
  if (!sync) portable_shuffle(nodes.begin(), nodes.end(), order_rng);
  // Synchronous sweeps read a frozen copy of iteration-t messages.
  const MessageTable snapshot = sync ? st.reinforced : MessageTable{};
  const MessageTable& source = sync ? snapshot : st.reinforced;

  for (int i : nodes) {
    if (inst.degree(i) == 0) continue;
    const LocalNodeView view = make_view(inst, source, i, flat);
    Eigen::ArrayXXd out = node_messages(config.kernel, view, config.limits);
    const auto& inc = inst.incident(i);
    for (int k = 0; k < view.degree(); ++k) {
      const int e = inc[k].edge;
      const int de = directed_id(e, inst.edge(e).u == i);
      Eigen::ArrayXd h = out.col(k);
      if (!normalize_in_place(h)) {
        ++st.contradictions;  // keep the previous message
        continue;
      }
      st.raw.col(de) = h;
      if (gamma > 0.0) {
        Eigen::ArrayXd r = h + gamma * oriented_field(st.fields, inst, e, i);
        if (normalize_in_place(r)) {
          st.reinforced.col(de) = r;
        } else {
          ++st.contradictions;
          st.reinforced.col(de) = h;
        }
      } else {
        st.reinforced.col(de) = h;
      }
    }
  }
  CavityField next;
  if (!compute_fields(inst, st.raw, &st.fields, gamma, next))
    throw infeasible_error("an edge field lost every state");
  st.fields = std::move(next);
}

RunResult solve(const Instance& inst, const SolverConfig& config)
{
  check_config(config);
  require_reachable(inst);
  const int D = config.depth > 0 ? config.depth : choose_depth(inst, config.formalism).global;
  const StateSpace space(D, inst.num_comms());
  return solve(inst, config, init_messages(inst, space, derive_seed(config.seed, 0),
                                           config.noise_eps));
}

RunResult solve(const Instance& inst, const SolverConfig& config, const MessageTable& initial)
{
  check_config(config);
  require_reachable(inst);
  const auto start = Clock::now();
  const StateSpace space = initial.space;
  const int D = space.max_depth();

  RunResult res;
  RunReport& rep = res.report;
  rep.depth = D;
  for (auto s : config.heuristics.schemes) rep.heuristics.push_back(SchemeBest{s, std::nullopt});
  res.last = Solution::empty(inst.num_comms());
  res.best = Solution::empty(inst.num_comms());

  SolverState st;
  st.raw = initial;
  st.reinforced = initial;
  if (!compute_fields(inst, st.raw, nullptr, 0.0, st.fields)) {
    rep.aborted = true;
    rep.total_ms = ms_since(start);
    return res;
  }

  Rng order_rng(derive_seed(config.seed, 1));
  Rng heuristic_rng(derive_seed(config.seed, 2));
  const ValidationOptions vopt{config.variant, true, config.formalism, D};

  auto consider = [&](const Solution& sol) {
    if (!sol.feasible || !sol.energy) return;
    if (!res.best.energy || *sol.energy < *res.best.energy) res.best = sol;
  };

  std::vector<int> previous;
  int stable = 0;
  int t = 0;
  while (t < config.max_iters) {
    ++t;
    const int clock =
        config.reinforcement_reset > 0 ? (t - 1) % config.reinforcement_reset + 1 : t;
    auto phase = Clock::now();
    try {
      sweep(inst, st, config, clock, order_rng);
    } catch (const infeasible_error&) {
      rep.aborted = true;
      rep.sweep_ms += ms_since(phase);
      --t;
      break;
    }
    rep.sweep_ms += ms_since(phase);

    phase = Clock::now();
    std::vector<int> decisions = extract_decision(st.fields);
    stable = decisions == previous ? stable + 1 : 1;
    int dropped = 0;
    Solution sol = decode(decisions, space, inst, &dropped);
    // Depth labels are degenerate across equivalent trees, so per-edge argmaxes can mix
    // them; the edge sets carry the decision and the labels are recomputed.
    relabel_by_bfs(sol, inst, config.formalism);
    sol.source = "ms";
    sol.iteration = t;
    if (validate(sol, inst, vopt).ok()) {
      sol.energy = energy(sol, inst, config.variant);
      sol.feasible = sol.energy.has_value();
    } else {
      sol.feasible = false;
      sol.energy.reset();
    }
    rep.dropped_structures = dropped;
    if (sol.feasible) ++rep.ms_feasible_sweeps;
    consider(sol);
    res.last = std::move(sol);
    if (config.record_trajectory) res.trajectory.push_back(decisions);
    previous = std::move(decisions);
    rep.decode_ms += ms_since(phase);

    const int every = config.heuristics.every;
    if (every > 0 && t % every == 0) {
      phase = Clock::now();
      for (auto& sb : rep.heuristics) {
        Solution h = run_heuristic_round(inst, config.variant, sb.scheme, st.fields, st.reinforced,
                                         config.heuristics, heuristic_rng, t);
        ++sb.rounds;
        if (h.feasible && h.energy) {
          ++sb.feasible_rounds;
          if (!sb.energy || *h.energy < *sb.energy) {
            sb.energy = h.energy;
            sb.iteration = t;
          }
        }
        consider(h);
      }
      rep.heuristic_ms += ms_since(phase);
    }

    if (stable >= config.conv_window && config.stop_on_convergence) break;
  }

  rep.iterations = t;
  rep.converged = t > 0 && stable >= config.conv_window;
  rep.contradictions = st.contradictions;
  rep.ms_energy = res.last.feasible ? res.last.energy : std::nullopt;
  if (res.best.energy) {
    rep.best_energy = res.best.energy;
    rep.best_source = res.best.source;
    rep.best_iteration = res.best.iteration;
  }
  res.messages = std::move(st.reinforced);
  res.fields = std::move(st.fields);
  rep.total_ms = ms_since(start);
  return res;
}

std::string report_to_kv(const RunReport& r, const std::string& prefix)
{
  std::ostringstream out;
  auto kv = [&](const std::string& k, const std::string& v) { out << prefix << k << "=" << v << "\n"; };
  auto gap_text = [](const std::optional<double>& x, const std::optional<double>& y) {
    return x && y && *y > 0.0 ? format_real(gap(*x, *y)) : std::string("NA");
  };
  kv("converged", r.converged ? "true" : "false");
  kv("aborted", r.aborted ? "true" : "false");
  kv("iterations", std::to_string(r.iterations));
  kv("depth", std::to_string(r.depth));
  kv("contradictions", std::to_string(r.contradictions));
  kv("dropped_structures", std::to_string(r.dropped_structures));
  kv("ms_feasible_sweeps", std::to_string(r.ms_feasible_sweeps));
  kv("ms_energy", energy_text(r.ms_energy));
  kv("best_energy", energy_text(r.best_energy));
  kv("best_source", r.best_source);
  kv("best_iteration", std::to_string(r.best_iteration));
  for (const auto& h : r.heuristics) {
    const std::string p = "heuristic_" + to_string(h.scheme) + "_";
    kv(p + "energy", energy_text(h.energy));
    kv(p + "iteration", std::to_string(h.iteration));
    kv(p + "rounds", std::to_string(h.rounds));
    kv(p + "feasible_rounds", std::to_string(h.feasible_rounds));
  }
  kv("greedy_energy", r.greedy_packed < 0 ? "NA" : energy_text(r.greedy_energy));
  kv("greedy_packed", std::to_string(r.greedy_packed));
  kv("gap_ms_vs_best", gap_text(r.ms_energy, r.best_energy));
  kv("gap_greedy_vs_best", gap_text(r.greedy_energy, r.best_energy));
  kv("sweep_ms", format_real(r.sweep_ms));
  kv("heuristic_ms", format_real(r.heuristic_ms));
  kv("decode_ms", format_real(r.decode_ms));
  kv("total_ms", format_real(r.total_ms));
  return out.str();
}

}  // namespace stp
