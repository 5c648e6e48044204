#ifndef STP_INSTANCE_HPP
#define STP_INSTANCE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stp/core.hpp"

namespace stp {

struct Edge {
  int u = 0;  // 0-based, u < v
  int v = 0;
  double weight = 0.0;
};

enum class LayerType { MultiCrossed, MultiAligned };

struct GridMeta {
  int nx = 0, ny = 0, nz = 0;
  LayerType layers = LayerType::MultiCrossed;
  bool operator==(const GridMeta&) const = default;
};

// One incident edge as seen from a node.
struct Incidence {
  int neighbor;
  int edge;  // undirected edge index
};

/// Packing instance on a simple undirected graph. Node ids are 0-based in memory and
/// 1-based in files. Communications are numbered 1..M everywhere.
///
/// Prizes are per (node, communication); a terminal carries `terminal_prize`.
/// Non-terminal prizes default to 0 (the plain Steiner variant).
class Instance {
public:
  Instance() = default;
  Instance(int num_nodes, int num_comms);

  int num_nodes() const { return num_nodes_; }
  int num_comms() const { return num_comms_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Incidence>& incident(int node) const { return adjacency_[node]; }
  int degree(int node) const { return static_cast<int>(adjacency_[node].size()); }
  // Edge index between a and b, or -1.
  int find_edge(int a, int b) const;

  // Prize c_i^mu, mu in 1..M.
  double prize(int node, int comm) const { return prizes_[idx(node, comm)]; }
  bool is_terminal(int node, int comm) const { return is_terminal_prize(prize(node, comm)); }
  // Communication this node is a terminal of, or 0.
  int terminal_comm(int node) const;
  const std::vector<int>& terminals(int comm) const { return terminals_[comm - 1]; }
  int root(int comm) const { return roots_[comm - 1]; }
  // Communication rooted at this node, or 0.
  int root_comm(int node) const;
  int total_terminals() const;

  const std::optional<GridMeta>& grid() const { return grid_; }

  // Mutators used by parsers and generators. `validate()` must be called afterwards.
  int add_edge(int a, int b, double w);
  void add_terminal(int comm, int node);
  void set_root(int comm, int node);
  void set_prize(int node, int comm, double c);
  void set_grid(const GridMeta& g) { grid_ = g; }

  /// Checks every invariant and fills in default roots (first listed terminal).
  /// Throws validation_error.
  void validate();

  bool operator==(const Instance& other) const;

private:
  std::size_t idx(int node, int comm) const {
    return static_cast<std::size_t>(node) * num_comms_ + (comm - 1);
  }

  int num_nodes_ = 0;
  int num_comms_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::vector<double> prizes_;
  std::vector<std::vector<int>> terminals_;
  std::vector<int> roots_;
  std::optional<GridMeta> grid_;
};

Instance parse_instance(const std::string& text);
Instance read_instance_file(const std::string& path);
std::string serialize_instance(const Instance& inst);
void write_instance_file(const Instance& inst, const std::string& path);

}  // namespace stp

#endif  // STP_INSTANCE_HPP
