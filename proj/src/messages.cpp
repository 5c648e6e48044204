#include "stp/messages.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "stp/format.hpp"
#include "stp/rng.hpp"

namespace stp {

MessageTable init_messages(const Instance& inst, const StateSpace& space, std::uint64_t seed,
                           double noise_eps)
{
  MessageTable table{space, Eigen::ArrayXXd::Zero(space.size(), 2 * inst.num_edges())};
  if (noise_eps > 0.0) {
    Rng rng(seed);
    for (Eigen::Index c = 0; c < table.values.cols(); ++c)
      for (Eigen::Index s = 0; s < table.values.rows(); ++s)
        table.values(s, c) = noise_eps * uniform_open01(rng);
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) normalize_in_place(table.values.col(c));
  }
  return table;
}

bool normalize_in_place(Eigen::Ref<Eigen::ArrayXd> v)
{
  const double top = v.maxCoeff();
  if (top == neg_inf) return false;
  if (top != 0.0) v -= top;  // neg_inf - finite stays neg_inf
  return true;
}

Eigen::ArrayXd normalize(const Eigen::ArrayXd& v)
{
  Eigen::ArrayXd out = v;
  if (!normalize_in_place(out)) throw contradiction_error("every state is forbidden");
  return out;
}

Eigen::ArrayXd reverse_states(const Eigen::Ref<const Eigen::ArrayXd>& v, const StateSpace& space)
{
  Eigen::ArrayXd out(v.size());
  for (Eigen::Index s = 0; s < v.size(); ++s) out(s) = v(space.reversed(static_cast<int>(s)));
  return out;
}

Eigen::ArrayXd cavity_field(const Eigen::Ref<const Eigen::ArrayXd>& h_ij,
                            const Eigen::Ref<const Eigen::ArrayXd>& h_ji, const StateSpace& space)
{
  return normalize(h_ij + reverse_states(h_ji, space));
}

Eigen::ArrayXd apply_reinforcement(const Eigen::Ref<const Eigen::ArrayXd>& h_bar,
                                   const Eigen::Ref<const Eigen::ArrayXd>& H_prev, int t,
                                   double gamma0)
{
  const double gamma = t * gamma0;
  if (gamma == 0.0) return normalize(h_bar);
  return normalize(h_bar + gamma * H_prev);
}

Eigen::ArrayXd oriented_field(const CavityField& field, const Instance& inst, int e, int from)
{
  if (inst.edge(e).u == from) return field.values.col(e);
  return reverse_states(field.values.col(e), field.space);
}

void write_message_dump(std::ostream& out, const MessageTable& table, const Instance& inst)
{
  out << "messages " << table.space.max_depth() << " " << table.space.num_comms() << "\n";
  for (int de = 0; de < table.num_directed(); ++de) {
    const Edge& e = inst.edge(undirected_id(de));
    const int i = from_lower(de) ? e.u : e.v;
    const int j = from_lower(de) ? e.v : e.u;
    out << "msg " << i + 1 << " " << j + 1;
    for (Eigen::Index s = 0; s < table.values.rows(); ++s)
      out << " " << format_real(table.values(s, de));
    out << "\n";
  }
}

MessageTable read_message_dump(std::istream& in, const Instance& inst)
{
  std::string line, key;
  int D = 0, M = 0;
  if (!std::getline(in, line)) throw parse_error(1, "empty message dump");
  {
    std::istringstream ls(line);
    if (!(ls >> key >> D >> M) || key != "messages" || D < 1 || M < 1)
      throw parse_error(1, "expected 'messages D M'");
  }
  StateSpace space(D, M);
  MessageTable table{space, Eigen::ArrayXXd::Constant(space.size(), 2 * inst.num_edges(), neg_inf)};
  std::vector<bool> seen(2 * inst.num_edges(), false);
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream ls(line);
    int i = 0, j = 0;
    if (!(ls >> key)) continue;
    if (key != "msg" || !(ls >> i >> j)) throw parse_error(number, "expected 'msg i j values...'");
    const int e = (i >= 1 && j >= 1 && i <= inst.num_nodes() && j <= inst.num_nodes())
                      ? inst.find_edge(i - 1, j - 1) : -1;
    if (e < 0) throw parse_error(number, "no such edge");
    const int de = directed_id(e, inst.edge(e).u == i - 1);
    for (int s = 0; s < space.size(); ++s) {
      std::string tok;
      if (!(ls >> tok) || !parse_real(tok, table.values(s, de)))
        throw parse_error(number, "bad or missing message value");
    }
    seen[de] = true;
  }
  for (bool b : seen)
    if (!b) throw parse_error(number, "message dump is missing directed edges");
  return table;
}

}  // namespace stp
