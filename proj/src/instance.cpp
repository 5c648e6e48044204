#include "stp/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include "stp/format.hpp"

namespace stp {

std::string to_string(Variant v) { return v == Variant::VertexDisjoint ? "vdstp" : "edstp"; }
std::string to_string(Formalism f) { return f == Formalism::Branching ? "branching" : "flat"; }

std::string to_string(KernelKind k)
{
  switch (k) {
    case KernelKind::VDStP: return "vdstp";
    case KernelKind::NeighOcc: return "neighocc";
    case KernelKind::Matching: return "matching";
  }
  return "?";
}

std::string to_string(Schedule s)
{
  return s == Schedule::SequentialRandomPermutation ? "sequential" : "synchronous";
}

Variant parse_variant(const std::string& s)
{
  if (s == "vdstp" || s == "vertex") return Variant::VertexDisjoint;
  if (s == "edstp" || s == "edge") return Variant::EdgeDisjoint;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

Formalism parse_formalism(const std::string& s)
{
  if (s == "branching") return Formalism::Branching;
  if (s == "flat") return Formalism::Flat;
  throw std::invalid_argument("unknown formalism '" + s + "'");
}

KernelKind parse_kernel(const std::string& s)
{
  if (s == "vdstp") return KernelKind::VDStP;
  if (s == "neighocc") return KernelKind::NeighOcc;
  if (s == "matching") return KernelKind::Matching;
  throw std::invalid_argument("unknown kernel '" + s + "'");
}

Schedule parse_schedule(const std::string& s)
{
  if (s == "sequential") return Schedule::SequentialRandomPermutation;
  if (s == "synchronous") return Schedule::SynchronousTwoBuffer;
  throw std::invalid_argument("unknown schedule '" + s + "'");
}

Instance::Instance(int num_nodes, int num_comms)
: num_nodes_(num_nodes), num_comms_(num_comms),
  adjacency_(std::max(num_nodes, 0)),
  prizes_(static_cast<std::size_t>(std::max(num_nodes, 0)) * std::max(num_comms, 0), 0.0),
  terminals_(std::max(num_comms, 0)),
  roots_(std::max(num_comms, 0), -1)
{
  if (num_nodes < 1) throw validation_error("instance needs at least one node");
  if (num_comms < 1) throw validation_error("instance needs at least one communication");
}

int Instance::find_edge(int a, int b) const
{
  const auto& small = adjacency_[a].size() <= adjacency_[b].size() ? adjacency_[a] : adjacency_[b];
  const int other = adjacency_[a].size() <= adjacency_[b].size() ? b : a;
  for (const auto& inc : small)
    if (inc.neighbor == other) return inc.edge;
  return -1;
}

int Instance::terminal_comm(int node) const
{
  for (int mu = 1; mu <= num_comms_; ++mu)
    if (is_terminal(node, mu)) return mu;
  return 0;
}

int Instance::root_comm(int node) const
{
  for (int mu = 1; mu <= num_comms_; ++mu)
    if (roots_[mu - 1] == node) return mu;
  return 0;
}

int Instance::total_terminals() const
{
  int total = 0;
  for (const auto& t : terminals_) total += static_cast<int>(t.size());
  return total;
}

int Instance::add_edge(int a, int b, double w)
{
  if (a < 0 || b < 0 || a >= num_nodes_ || b >= num_nodes_)
    throw validation_error("edge endpoint out of range");
  if (a == b) throw validation_error("self-loop on node " + std::to_string(a + 1));
  if (!(w > 0.0) || !std::isfinite(w))
    throw validation_error("edge weight must be finite and strictly positive");
  if (find_edge(a, b) >= 0)
    throw validation_error("duplicate edge " + std::to_string(a + 1) + " " + std::to_string(b + 1));
  const int e = num_edges();
  edges_.push_back({std::min(a, b), std::max(a, b), w});
  adjacency_[a].push_back({b, e});
  adjacency_[b].push_back({a, e});
  return e;
}

void Instance::add_terminal(int comm, int node)
{
  if (comm < 1 || comm > num_comms_) throw validation_error("communication out of range");
  if (node < 0 || node >= num_nodes_) throw validation_error("terminal node out of range");
  const int owner = terminal_comm(node);
  if (owner != 0)
    throw validation_error("node " + std::to_string(node + 1) + " is a terminal of communications "
                           + std::to_string(owner) + " and " + std::to_string(comm));
  prizes_[idx(node, comm)] = terminal_prize;
  terminals_[comm - 1].push_back(node);
}

void Instance::set_root(int comm, int node)
{
  if (comm < 1 || comm > num_comms_) throw validation_error("communication out of range");
  if (node < 0 || node >= num_nodes_) throw validation_error("root node out of range");
  roots_[comm - 1] = node;
}

void Instance::set_prize(int node, int comm, double c)
{
  if (comm < 1 || comm > num_comms_) throw validation_error("communication out of range");
  if (node < 0 || node >= num_nodes_) throw validation_error("prize node out of range");
  if (!(c >= 0.0)) throw validation_error("prizes must be nonnegative");
  if (is_terminal(node, comm)) throw validation_error("prize given for a terminal");
  prizes_[idx(node, comm)] = c;
}

void Instance::validate()
{
  for (int mu = 1; mu <= num_comms_; ++mu) {
    const auto& t = terminals_[mu - 1];
    if (t.empty())
      throw validation_error("communication " + std::to_string(mu) + " has no terminals");
    if (roots_[mu - 1] < 0) roots_[mu - 1] = t.front();
    if (std::find(t.begin(), t.end(), roots_[mu - 1]) == t.end())
      throw validation_error("root of communication " + std::to_string(mu)
                             + " is not one of its terminals");
  }
}

namespace {

std::vector<Edge> sorted_edges(const std::vector<Edge>& edges)
{
  auto out = edges;
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  return out;
}

}  // namespace

bool Instance::operator==(const Instance& other) const
{
  if (num_nodes_ != other.num_nodes_ || num_comms_ != other.num_comms_) return false;
  if (prizes_ != other.prizes_ || terminals_ != other.terminals_ || roots_ != other.roots_)
    return false;
  if (grid_ != other.grid_) return false;
  const auto a = sorted_edges(edges_);
  const auto b = sorted_edges(other.edges_);
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k].u != b[k].u || a[k].v != b[k].v || a[k].weight != b[k].weight) return false;
  return true;
}

namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

int parse_int(const Line& l, std::size_t k)
{
  if (k >= l.tokens.size()) throw parse_error(l.number, "missing field");
  const auto& s = l.tokens[k];
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw parse_error(l.number, "expected an integer, got '" + s + "'");
  return value;
}

double parse_real(const Line& l, std::size_t k)
{
  if (k >= l.tokens.size()) throw parse_error(l.number, "missing field");
  const auto& s = l.tokens[k];
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw parse_error(l.number, "expected a number, got '" + s + "'");
  return value;
}

void expect_arity(const Line& l, std::size_t n)
{
  if (l.tokens.size() != n)
    throw parse_error(l.number, "'" + l.tokens[0] + "' expects " + std::to_string(n - 1)
                                    + " fields");
}

}  // namespace

Instance parse_instance(const std::string& text)
{
  std::vector<Line> lines;
  {
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
      ++number;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      std::istringstream ls(raw);
      Line l{number, {}};
      for (std::string tok; ls >> tok;) l.tokens.push_back(tok);
      if (!l.tokens.empty()) lines.push_back(std::move(l));
    }
  }

  int nodes = -1, comms = -1;
  for (const auto& l : lines) {
    const auto& key = l.tokens[0];
    if (key == "nodes") {
      expect_arity(l, 2);
      if (nodes >= 0) throw parse_error(l.number, "repeated 'nodes'");
      nodes = parse_int(l, 1);
      if (nodes < 1) throw parse_error(l.number, "node count must be positive");
    } else if (key == "comms") {
      expect_arity(l, 2);
      if (comms >= 0) throw parse_error(l.number, "repeated 'comms'");
      comms = parse_int(l, 1);
      if (comms < 1) throw parse_error(l.number, "communication count must be positive");
    } else if (key != "edge" && key != "terminal" && key != "root" && key != "grid"
               && key != "prize") {
      throw parse_error(l.number, "unknown key '" + key + "'");
    }
  }
  if (nodes < 0) throw parse_error(0, "missing 'nodes' line");
  if (comms < 0) throw parse_error(0, "missing 'comms' line");

  Instance inst(nodes, comms);
  auto node_of = [&](const Line& l, std::size_t k) {
    const int v = parse_int(l, k);
    if (v < 1 || v > nodes) throw parse_error(l.number, "node id out of range");
    return v - 1;
  };
  auto comm_of = [&](const Line& l, std::size_t k) {
    const int mu = parse_int(l, k);
    if (mu < 1 || mu > comms) throw parse_error(l.number, "communication out of range");
    return mu;
  };

  std::vector<std::tuple<int, int, int, double>> prizes;  // line, node, comm, value
  for (const auto& l : lines) {
    const auto& key = l.tokens[0];
    try {
      if (key == "edge") {
        expect_arity(l, 4);
        inst.add_edge(node_of(l, 1), node_of(l, 2), parse_real(l, 3));
      } else if (key == "terminal") {
        expect_arity(l, 3);
        inst.add_terminal(comm_of(l, 1), node_of(l, 2));
      } else if (key == "root") {
        expect_arity(l, 3);
        inst.set_root(comm_of(l, 1), node_of(l, 2));
      } else if (key == "prize") {
        expect_arity(l, 4);
        prizes.emplace_back(l.number, node_of(l, 2), comm_of(l, 1), parse_real(l, 3));
      } else if (key == "grid") {
        expect_arity(l, 5);
        GridMeta g{parse_int(l, 1), parse_int(l, 2), parse_int(l, 3), LayerType::MultiCrossed};
        if (l.tokens[4] == "aligned") g.layers = LayerType::MultiAligned;
        else if (l.tokens[4] != "crossed")
          throw parse_error(l.number, "layer type must be 'aligned' or 'crossed'");
        inst.set_grid(g);
      }
    } catch (const validation_error& e) {
      throw validation_error("line " + std::to_string(l.number) + ": " + e.what());
    }
  }
  for (const auto& [line, node, comm, value] : prizes) {
    try {
      inst.set_prize(node, comm, value);
    } catch (const validation_error& e) {
      throw validation_error("line " + std::to_string(line) + ": " + e.what());
    }
  }
  inst.validate();
  return inst;
}

std::string serialize_instance(const Instance& inst)
{
  std::ostringstream out;
  out << "nodes " << inst.num_nodes() << "\n";
  out << "comms " << inst.num_comms() << "\n";
  for (const auto& e : sorted_edges(inst.edges()))
    out << "edge " << e.u + 1 << " " << e.v + 1 << " " << format_real(e.weight) << "\n";
  for (int mu = 1; mu <= inst.num_comms(); ++mu)
    for (int t : inst.terminals(mu)) out << "terminal " << mu << " " << t + 1 << "\n";
  for (int mu = 1; mu <= inst.num_comms(); ++mu)
    out << "root " << mu << " " << inst.root(mu) + 1 << "\n";
  if (const auto& g = inst.grid())
    out << "grid " << g->nx << " " << g->ny << " " << g->nz << " "
        << (g->layers == LayerType::MultiAligned ? "aligned" : "crossed") << "\n";
  for (int mu = 1; mu <= inst.num_comms(); ++mu)
    for (int i = 0; i < inst.num_nodes(); ++i) {
      const double c = inst.prize(i, mu);
      if (c != 0.0 && !is_terminal_prize(c))
        out << "prize " << mu << " " << i + 1 << " " << format_real(c) << "\n";
    }
  return out.str();
}

Instance read_instance_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

void write_instance_file(const Instance& inst, const std::string& path)
{
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize_instance(inst);
}

}  // namespace stp
