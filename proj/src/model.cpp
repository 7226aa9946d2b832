#include "sdof/model.hpp"

#include "sdof/error.hpp"
#include "sdof/rng.hpp"

#include <cmath>
#include <limits>

namespace sdof {

char to_char(Csit c) { return c == Csit::P ? 'P' : 'D'; }

Csit parse_csit(char c) {
  if (c == 'P' || c == 'p') return Csit::P;
  if (c == 'D' || c == 'd') return Csit::D;
  throw LabError(ErrorCode::BadArgument, std::string("unknown CSIT state '") + c + "'");
}

StateLabel StateLabel::parse(const std::string& text) {
  if (text.size() != 2 && text.size() != 3)
    throw LabError(ErrorCode::BadArgument, "state label must have 2 or 3 entries: '" + text + "'");
  std::vector<Csit> s;
  for (char c : text) s.push_back(parse_csit(c));
  return StateLabel(std::move(s));
}

std::string StateLabel::str() const {
  std::string out;
  for (Csit c : per_node) out.push_back(to_char(c));
  return out;
}

std::string to_string(Node n) {
  switch (n) {
    case Node::Rx1: return "rx1";
    case Node::Rx2: return "rx2";
    case Node::Eve: return "eve";
  }
  return "?";
}

std::string to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::Wiretap: return "wiretap";
    case TopologyKind::MultiReceiver: return "multi_receiver";
    case TopologyKind::Broadcast: return "broadcast";
  }
  return "?";
}

Topology Topology::wiretap() { return {TopologyKind::Wiretap, 3, 1, true}; }
Topology Topology::multi_receiver() { return {TopologyKind::MultiReceiver, 3, 2, true}; }
Topology Topology::broadcast() { return {TopologyKind::Broadcast, 2, 2, false}; }

std::vector<Node> Topology::nodes() const {
  switch (kind) {
    case TopologyKind::Wiretap: return {Node::Rx1, Node::Eve};
    case TopologyKind::MultiReceiver: return {Node::Rx1, Node::Rx2, Node::Eve};
    case TopologyKind::Broadcast: return {Node::Rx1, Node::Rx2};
  }
  return {};
}

bool Topology::has_node(Node n) const {
  for (Node m : nodes())
    if (m == n) return true;
  return false;
}

std::size_t Topology::state_index(Node n) const {
  const auto ns = nodes();
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (ns[i] == n) return i;
  throw LabError(ErrorCode::BadArgument, "node " + to_string(n) + " absent from " + to_string(kind));
}

Rational StateSchedule::fraction(const StateLabel& label) const {
  auto it = fractions_.find(label);
  return it == fractions_.end() ? Rational(0) : it->second;
}

StateSchedule validate_schedule(const std::map<StateLabel, Rational>& fractions, bool symmetry_mode) {
  if (fractions.empty()) throw LabError(ErrorCode::SumNotOne, "empty schedule");
  const std::size_t arity = fractions.begin()->first.arity();
  Rational sum = 0;
  for (const auto& [label, lam] : fractions) {
    if (label.arity() != arity || (arity != 2 && arity != 3))
      throw LabError(ErrorCode::MixedArity, "label " + label.str() + " does not match arity " + std::to_string(arity));
    if (lam < 0) throw LabError(ErrorCode::NegativeFraction, label.str() + " = " + to_string(lam));
    sum += lam;
  }
  if (sum != 1) throw LabError(ErrorCode::SumNotOne, "fractions sum to " + to_string(sum));

  StateSchedule s;
  s.fractions_ = fractions;
  s.symmetric_ = symmetry_mode;
  s.arity_ = arity;
  if (symmetry_mode) {
    const char* a = arity == 3 ? "PDD" : "PD";
    const char* b = arity == 3 ? "DPD" : "DP";
    if (s.fraction(a) != s.fraction(b))
      throw LabError(ErrorCode::SymmetryViolated, std::string(a) + " = " + to_string(s.fraction(a)) + " but " + b +
                                                      " = " + to_string(s.fraction(b)));
  }
  return s;
}

StateSchedule make_schedule(const std::map<std::string, Rational>& fractions, bool symmetry_mode) {
  std::map<StateLabel, Rational> m;
  for (const auto& [k, v] : fractions) m[StateLabel::parse(k)] += v;
  return validate_schedule(m, symmetry_mode);
}

std::vector<StateLabel> schedule_to_slot_states(const StateSchedule& schedule, int n_slots) {
  if (n_slots < 0) throw LabError(ErrorCode::BadArgument, "negative slot count");
  std::vector<StateLabel> labels;
  std::vector<long long> weight;
  for (const auto& [label, lam] : schedule.fractions()) {
    const Rational c = lam * n_slots;
    if (denominator_of(c) != 1)
      throw LabError(ErrorCode::NonIntegralBlock,
                     label.str() + " x " + std::to_string(n_slots) + " = " + to_string(c));
    if (c == 0) continue;
    labels.push_back(label);
    weight.push_back(numerator_of(c).convert_to<long long>());
  }
  // Smooth weighted round-robin; the map iterates in label order, which
  // settles ties in favour of the earlier label.
  std::vector<long long> current(labels.size(), 0);
  std::vector<StateLabel> out;
  out.reserve(static_cast<std::size_t>(n_slots));
  for (int t = 0; t < n_slots; ++t) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      current[i] += weight[i];
      if (current[i] > current[best]) best = i;
    }
    current[best] -= n_slots;
    out.push_back(labels[best]);
  }
  return out;
}

const Eigen::RowVectorXcd& ChannelRealization::row(Node n, int slot) const {
  if (slot < 0 || slot >= n_slots) throw LabError(ErrorCode::BadArgument, "slot out of range");
  const auto idx = static_cast<std::size_t>(slot);
  switch (topology.kind) {
    case TopologyKind::Wiretap:
      if (n == Node::Rx1) return h[idx];
      if (n == Node::Eve) return g[idx];
      break;
    case TopologyKind::MultiReceiver:
      if (n == Node::Rx1) return h[idx];
      if (n == Node::Rx2) return h_acute[idx];
      return g[idx];
    case TopologyKind::Broadcast:
      if (n == Node::Rx1) return h[idx];
      if (n == Node::Rx2) return g[idx];
      break;
  }
  throw LabError(ErrorCode::BadArgument, "node " + to_string(n) + " absent from " + to_string(topology.kind));
}

Eigen::MatrixXcd ChannelRealization::state_matrix(int slot) const {
  const auto ns = topology.nodes();
  Eigen::MatrixXcd s(static_cast<Eigen::Index>(ns.size()), topology.n_tx);
  for (std::size_t i = 0; i < ns.size(); ++i) s.row(static_cast<Eigen::Index>(i)) = row(ns[i], slot);
  return s;
}

bool ChannelRealization::operator==(const ChannelRealization& o) const {
  return topology == o.topology && n_slots == o.n_slots && seed == o.seed && h == o.h && h_acute == o.h_acute &&
         g == o.g;
}

double condition_number(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0)) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

ChannelRealization sample_channel(const Topology& topology, int n_slots, std::uint64_t seed,
                                  const SamplerOptions& options) {
  if (n_slots < 1) throw LabError(ErrorCode::BadArgument, "n_slots must be >= 1");
  ChannelRealization r;
  r.topology = topology;
  r.n_slots = n_slots;
  r.seed = seed;
  const CounterRng root(seed);
  const int n = topology.n_tx;
  const auto rows = static_cast<Eigen::Index>(topology.nodes().size());
  for (int t = 0; t < n_slots; ++t) {
    const CounterRng rng = root.substream(static_cast<std::uint64_t>(t));
    Eigen::MatrixXcd s(rows, n);
    bool ok = false;
    for (int a = 0; a < options.max_attempts && !ok; ++a) {
      for (Eigen::Index i = 0; i < rows; ++i)
        for (int j = 0; j < n; ++j)
          s(i, j) = rng.complex_normal(static_cast<std::uint64_t>((a * rows + i) * n + j));
      ok = condition_number(s) <= options.max_condition;
    }
    if (!ok)
      throw LabError(ErrorCode::RankDeficiencyPersistent,
                     "slot " + std::to_string(t) + " rejected " + std::to_string(options.max_attempts) + " times");
    r.h.push_back(s.row(0));
    if (topology.kind == TopologyKind::MultiReceiver) {
      r.h_acute.push_back(s.row(1));
      r.g.push_back(s.row(2));
    } else {
      r.g.push_back(s.row(1));
    }
  }
  return r;
}

PowerBudget::PowerBudget(double p, SplitPolicy s) : total_power(p), split(s) {
  if (!(p >= 0) || !std::isfinite(p)) throw LabError(ErrorCode::BadArgument, "power must be finite and nonnegative");
}

}  // namespace sdof
