#ifndef STP_SOLVER_HPP
#define STP_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stp/core.hpp"
#include "stp/heuristics.hpp"
#include "stp/instance.hpp"
#include "stp/kernels.hpp"
#include "stp/messages.hpp"
#include "stp/solution.hpp"

namespace stp {

struct SolverConfig {
  Variant variant = Variant::EdgeDisjoint;
  Formalism formalism = Formalism::Branching;
  KernelKind kernel = KernelKind::NeighOcc;
  int depth = 0;  // 0 picks choose_depth(...).global
  double gamma0 = 1e-5;
  int max_iters = 1000;
  int conv_window = 20;
  std::uint64_t seed = 1;
  double noise_eps = 1e-3;
  Schedule schedule = Schedule::SequentialRandomPermutation;
  KernelLimits limits;
  // Restart the reinforcement clock every this many sweeps; 0 keeps it running.
  int reinforcement_reset = 0;
  HeuristicConfig heuristics;
  bool stop_on_convergence = true;
  bool record_trajectory = false;
};

/// Throws std::invalid_argument on an incompatible variant/formalism/kernel mix or a
/// non-positive window.
void check_config(const SolverConfig& config);

struct SchemeBest {
  HeuristicScheme scheme;
  std::optional<double> energy;
  int iteration = -1;
  int rounds = 0;
  int feasible_rounds = 0;
};

/// Value object; every energy in it comes from energy() on a decoded solution.
struct RunReport {
  bool converged = false;
  bool aborted = false;  // a field lost every state
  int iterations = 0;
  int depth = 0;
  std::int64_t contradictions = 0;
  int dropped_structures = 0;  // of the last decoded MS state
  std::optional<double> ms_energy;  // last MS state, when feasible
  int ms_feasible_sweeps = 0;
  std::optional<double> best_energy;
  std::string best_source = "none";
  int best_iteration = -1;
  std::vector<SchemeBest> heuristics;
  std::optional<double> greedy_energy;
  int greedy_packed = -1;  // -1 when greedy did not run
  double sweep_ms = 0.0, heuristic_ms = 0.0, decode_ms = 0.0, total_ms = 0.0;
};

/// One `key=value` per line, stable key names.
std::string report_to_kv(const RunReport& report, const std::string& prefix = "");

struct RunResult {
  RunReport report;
  Solution last;  // decoded MS state of the final sweep
  Solution best;  // best feasible solution seen (MS or heuristic); empty when none
  std::vector<std::vector<int>> trajectory;  // per sweep, decisions of every edge
  MessageTable messages;  // reinforced messages, as read by the kernels
  CavityField fields;
};

/// Argmax state per undirected edge, u -> v orientation, lowest index on ties.
std::vector<int> extract_decision(const CavityField& fields);

/// True iff the last `window` entries of `history` exist and are identical.
bool check_convergence(const std::vector<std::vector<int>>& history, int window);

/// Fields of all edges from raw messages, plus gamma * H_prev when gamma > 0.
/// Returns false when some edge has every state forbidden.
bool compute_fields(const Instance& inst, const MessageTable& raw, const CavityField* prev,
                    double gamma, CavityField& out);

/// Mutable engine state, exposed so tests can single-step sweeps.
struct SolverState {
  MessageTable raw;         // kernel outputs, normalized
  MessageTable reinforced;  // raw + gamma_t H_prev, normalized; what kernels read
  CavityField fields;
  std::int64_t contradictions = 0;
};

SolverState init_state(const Instance& inst, const StateSpace& space, const SolverConfig& config);

/// One sweep with gamma_t = t * gamma0 (t counts from 1, or from the last reinforcement
/// reset). Throws infeasible_error when a field loses every state.
void sweep(const Instance& inst, SolverState& state, const SolverConfig& config, int t,
           Rng& order_rng);

/// Full run. Throws infeasible_error when a terminal cannot reach its root.
RunResult solve(const Instance& inst, const SolverConfig& config);
RunResult solve(const Instance& inst, const SolverConfig& config, const MessageTable& initial);

struct GreedyResult {
  Solution solution;
  std::optional<double> energy;  // set only when every communication was packed
  int packed = 0;
};

/// Routes communications one at a time in `order` (empty = 1..M) with M = 1 runs of the
/// solver on the residual graph. Stops at the first communication that fails.
GreedyResult greedy_solve(const Instance& inst, std::vector<int> order,
                          const SolverConfig& single_tree);

}  // namespace stp

#endif  // STP_SOLVER_HPP
