#ifndef STP_GENERATORS_HPP
#define STP_GENERATORS_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "stp/instance.hpp"

namespace stp {

enum class Weighting { Uniform, Correlated };

// All generators draw from one mt19937_64 stream in a fixed order: per-node factors,
// then per-edge values in (u, v) order, then terminals. The first terminal drawn for a
// communication is its root.

/// Complete graph. Uniform: w_ij ~ U(0,1). Correlated: w_ij = x_i x_j y_ij.
Instance gen_complete(int num_nodes, int num_comms, int terminals_per_comm, Weighting weighting,
                      std::uint64_t seed);

/// Uniform simple regular graph from the pairing model, weights U(0,1).
Instance gen_regular(int num_nodes, int degree, int num_comms, int terminals_per_comm,
                     std::uint64_t seed, int max_attempts = 200000);

using GridPoint = std::array<int, 3>;

struct GridTerminals {
  // Explicit placement: coords[mu - 1] lists the terminals of mu, root first.
  std::vector<std::vector<GridPoint>> coords;
  // Seeded placement when coords is empty.
  int per_comm = 0;
};

/// 3D lattice; node (x, y, z) has id x + nx * (y + ny * z).
Instance gen_grid(int nx, int ny, int nz, LayerType layers, int num_comms,
                  const GridTerminals& terminals, std::uint64_t seed, bool unit_weights = true);

inline int grid_node(int nx, int ny, int x, int y, int z) { return x + nx * (y + ny * z); }

}  // namespace stp

#endif  // STP_GENERATORS_HPP
