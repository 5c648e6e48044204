#ifndef STP_CORE_HPP
#define STP_CORE_HPP

#include <limits>
#include <stdexcept>
#include <string>

namespace stp {

/// Forbidden state marker for Max-Sum quantities. IEEE addition saturates on it
/// (neg_inf + x == neg_inf for every finite x), which is the only arithmetic the
/// kernels apply to it.
inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// Prize of a true terminal. Kept as an exact infinity so that "terminal left out"
/// maps to neg_inf after negation instead of a tuned big number.
inline constexpr double terminal_prize = std::numeric_limits<double>::infinity();

inline bool is_terminal_prize(double c) { return c == terminal_prize; }

enum class Variant { VertexDisjoint, EdgeDisjoint };
enum class Formalism { Branching, Flat };
enum class KernelKind { VDStP, NeighOcc, Matching };
enum class Schedule { SequentialRandomPermutation, SynchronousTwoBuffer };

std::string to_string(Variant v);
std::string to_string(Formalism f);
std::string to_string(KernelKind k);
std::string to_string(Schedule s);
Variant parse_variant(const std::string& s);
Formalism parse_formalism(const std::string& s);
KernelKind parse_kernel(const std::string& s);
Schedule parse_schedule(const std::string& s);

class parse_error : public std::runtime_error {
public:
  parse_error(int line, const std::string& what)
  : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) { }
  int line() const { return line_; }
private:
  int line_;
};

class validation_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an exhaustive or exponential routine would exceed its configured budget.
class capacity_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class generation_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class infeasible_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All states of a local Max-Sum quantity are forbidden.
class contradiction_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class unsupported_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace stp

#endif  // STP_CORE_HPP
