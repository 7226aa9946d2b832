#include "sdof/schemes.hpp"

#include "sdof/error.hpp"
#include "sdof/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace sdof {

namespace {

constexpr std::uint64_t kTraceStream = 0x7472616365ULL;

struct NamedId {
  SchemeId id;
  const char* name;
};

constexpr NamedId kNames[] = {
    {SchemeId::WT_PP, "wt_pp"},
    {SchemeId::WT_DP, "wt_dp"},
    {SchemeId::WT_PD, "wt_pd"},
    {SchemeId::WT_DD_23, "wt_dd_23"},
    {SchemeId::MR_PPD, "mr_ppd"},
    {SchemeId::MR_PDP, "mr_pdp"},
    {SchemeId::MR_DDP, "mr_ddp"},
    {SchemeId::MR_PDD, "mr_pdd"},
    {SchemeId::MR_S30_29_A, "mr_s30_29_a"},
    {SchemeId::MR_S30_29_B, "mr_s30_29_b"},
    {SchemeId::SUB_PD_DP_UNICAST, "sub_pd_dp_unicast"},
    {SchemeId::SUB_SECURE_MULTICAST, "sub_secure_multicast"},
    {SchemeId::BC_PP_S2, "bc_pp_s2"},
    {SchemeId::BC_DD_S1, "bc_dd_s1"},
    {SchemeId::BC_S1_43, "bc_s1_43"},
    {SchemeId::BC_S2_43, "bc_s2_43"},
};

}  // namespace

const std::vector<SchemeId>& all_scheme_ids() {
  static const std::vector<SchemeId> ids = [] {
    std::vector<SchemeId> v;
    for (const auto& n : kNames) v.push_back(n.id);
    return v;
  }();
  return ids;
}

std::string to_string(SchemeId id) {
  for (const auto& n : kNames)
    if (n.id == id) return n.name;
  return "unknown";
}

SchemeId parse_scheme_id(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const auto& n : kNames)
    if (lower == n.name) return n.id;
  throw LabError(ErrorCode::UnknownScheme, "no scheme named '" + name + "'");
}

std::string to_string(SubProtocol s) { return s == SubProtocol::Tjsp53 ? "tjsp53" : "fallback32"; }

SubProtocol parse_sub_protocol(const std::string& s) {
  if (s == "tjsp53") return SubProtocol::Tjsp53;
  if (s == "fallback32") return SubProtocol::Fallback32;
  throw LabError(ErrorCode::BadParams, "unknown sub-protocol '" + s + "'");
}

Quantity Quantity::symbol(const std::string& name) {
  Term t;
  t.is_symbol = true;
  t.symbol = name;
  return Quantity{{t}};
}

Quantity Quantity::observation(Node node, int slot, std::vector<int> exclude_streams) {
  Term t;
  t.is_symbol = false;
  t.obs = ObsRef{node, slot, std::move(exclude_streams)};
  return Quantity{{t}};
}

Quantity Quantity::operator+(const Quantity& o) const {
  Quantity q = *this;
  q.terms.insert(q.terms.end(), o.terms.begin(), o.terms.end());
  return q;
}

BeamRule BeamRule::along(int axis) {
  BeamRule b;
  b.kind = Kind::Axis;
  b.axis = axis;
  return b;
}

BeamRule BeamRule::null(std::vector<ChannelRef> rows, int column) {
  BeamRule b;
  b.kind = Kind::Null;
  b.null_of = std::move(rows);
  b.column = column;
  return b;
}

// ---------------------------------------------------------------------------
// Scheme construction

namespace {

using Q = Quantity;

Q obs(Node n, int slot, std::vector<int> excl = {}) { return Q::observation(n, slot, std::move(excl)); }

struct Builder {
  SchemeSpec spec;

  int slot(const std::string& state) {
    spec.slots.push_back({StateLabel::parse(state), {}});
    return spec.n_slots() - 1;
  }
  int stream(int s, Q q, BeamRule b) {
    auto& v = spec.slots.at(static_cast<std::size_t>(s)).streams;
    v.push_back({std::move(q), std::move(b)});
    return static_cast<int>(v.size()) - 1;
  }
  Q msg(const std::string& name, Owner o) {
    spec.symbols.add(name, SymbolKind::Message, o);
    return Q::symbol(name);
  }
  Q noise(const std::string& name) {
    spec.symbols.add(name, SymbolKind::Noise, Owner::None);
    return Q::symbol(name);
  }
  /// One stream per quantity, on consecutive antenna axes.
  void axes(int s, const std::vector<Q>& qs) {
    for (std::size_t i = 0; i < qs.size(); ++i) stream(s, qs[i], BeamRule::along(static_cast<int>(i)));
  }
  /// One stream per quantity, on the columns of the nullspace of `rows`.
  void nulled(int s, const std::vector<Q>& qs, const std::vector<ChannelRef>& rows) {
    for (std::size_t i = 0; i < qs.size(); ++i) stream(s, qs[i], BeamRule::null(rows, static_cast<int>(i)));
  }
};

int unicast_block_size(SubProtocol sub) { return sub == SubProtocol::Tjsp53 ? 5 : 3; }

/// PD/DP unicast of given payloads: to_rx1[i] reaches receiver 1 and
/// to_rx2[i] reaches receiver 2. Receiver 1 is S1 (channel h), receiver 2 is
/// S2 (channel h-acute); the block alternates PDD and DPD.
void add_unicast(Builder& b, SubProtocol sub, const std::vector<Q>& to_rx1, const std::vector<Q>& to_rx2) {
  const std::size_t k = static_cast<std::size_t>(unicast_block_size(sub));
  if (to_rx1.size() != to_rx2.size() || to_rx1.size() % k != 0)
    throw LabError(ErrorCode::BadParams, "unicast payload counts must be equal multiples of " + std::to_string(k));
  for (std::size_t base = 0; base < to_rx1.size(); base += k) {
    const auto p = [&](std::size_t i) { return to_rx1[base + i]; };
    const auto q = [&](std::size_t i) { return to_rx2[base + i]; };

    // Fresh pairs, each with one cross stream steered into the P receiver's null.
    const int s1 = b.slot("PDD");
    b.axes(s1, {p(0), p(1)});
    const int q0 = b.stream(s1, q(0), BeamRule::null({{Node::Rx1, s1}}));
    const int s2 = b.slot("DPD");
    b.axes(s2, {q(1), q(2)});
    const int p2 = b.stream(s2, p(2), BeamRule::null({{Node::Rx2, s2}}));

    // What each receiver overheard of the other's pair.
    const Q heard_by_rx2 = obs(Node::Rx2, s1, {q0});
    const Q heard_by_rx1 = obs(Node::Rx1, s2, {p2});

    if (sub == SubProtocol::Fallback32) {
      b.axes(b.slot("PDD"), {heard_by_rx2});
      b.axes(b.slot("DPD"), {heard_by_rx1});
      continue;
    }
    // Each overheard equation is sent twice; every copy also carries one
    // fresh symbol nulled at the receiver whose CSI is current.
    const int s3 = b.slot("PDD");
    b.axes(s3, {heard_by_rx2});
    b.stream(s3, q(3), BeamRule::null({{Node::Rx1, s3}}));
    const int s4 = b.slot("DPD");
    b.axes(s4, {heard_by_rx2});
    b.stream(s4, p(3), BeamRule::null({{Node::Rx2, s4}}));
    const int s5 = b.slot("PDD");
    b.axes(s5, {heard_by_rx1});
    b.stream(s5, q(4), BeamRule::null({{Node::Rx1, s5}}));
    const int s6 = b.slot("DPD");
    b.axes(s6, {heard_by_rx1});
    b.stream(s6, p(4), BeamRule::null({{Node::Rx2, s6}}));
  }
}

/// Secure multicast of common quantities, in pairs: one PDD and one DPD
/// slot, each masked by artificial noise nulled at the P receiver, followed
/// by unicast of the eavesdropper's outputs to the receiver that needs them.
void add_secure_multicast(Builder& b, SubProtocol sub, const std::vector<Q>& commons, const std::string& prefix) {
  const std::size_t k = static_cast<std::size_t>(unicast_block_size(sub));
  if (commons.size() % 2 != 0 || (commons.size() / 2) % k != 0)
    throw LabError(ErrorCode::BadParams, "multicast needs a multiple of " + std::to_string(k) + " pairs");
  std::vector<Q> to_rx1, to_rx2;
  for (std::size_t i = 0; i + 1 < commons.size(); i += 2) {
    const std::string tag = prefix + "q" + std::to_string(i / 2 + 1);
    const int sa = b.slot("PDD");
    b.axes(sa, {commons[i]});
    b.stream(sa, b.noise(tag + "a"), BeamRule::null({{Node::Rx1, sa}}));
    const int sb = b.slot("DPD");
    b.axes(sb, {commons[i + 1]});
    b.stream(sb, b.noise(tag + "b"), BeamRule::null({{Node::Rx2, sb}}));
    to_rx2.push_back(obs(Node::Eve, sa));
    to_rx1.push_back(obs(Node::Eve, sb));
  }
  add_unicast(b, sub, to_rx1, to_rx2);
}

int default_multiplier(SubProtocol sub) { return sub == SubProtocol::Tjsp53 ? 10 : 6; }
int default_batch(SubProtocol sub) { return sub == SubProtocol::Tjsp53 ? 5 : 3; }

void build_s30_29(Builder& b, const SchemeParams& params) {
  const int n = params.multiplier.value_or(default_multiplier(params.sub));
  const int k = unicast_block_size(params.sub);
  if (n <= 0 || n % (2 * k) != 0)
    throw LabError(ErrorCode::BadParams, "multiplier must be a positive multiple of " + std::to_string(2 * k));
  std::vector<Q> side_rx1, side_rx2, commons;
  for (int i = 0; i < n; ++i) {
    const std::string p = "a" + std::to_string(i + 1) + ".";
    const int s1 = b.slot("PDD");
    b.axes(s1, {b.noise(p + "u1"), b.noise(p + "u2"), b.noise(p + "u3")});
    const int s2 = b.slot("PDD");
    b.axes(s2, {b.msg(p + "v1", Owner::Rx1), b.msg(p + "v2", Owner::Rx1), b.msg(p + "v3", Owner::Rx1)});
    b.stream(s2, obs(Node::Rx1, s1), BeamRule::along(0));
    const int s3 = b.slot("PDD");
    b.axes(s3, {b.msg(p + "w1", Owner::Rx2), b.msg(p + "w2", Owner::Rx2), b.msg(p + "w3", Owner::Rx2)});
    b.stream(s3, obs(Node::Rx2, s1), BeamRule::along(0));
    side_rx1.push_back(obs(Node::Eve, s2));
    side_rx2.push_back(obs(Node::Eve, s3));
    commons.push_back(obs(Node::Rx2, s2) + obs(Node::Rx1, s3));
  }
  add_secure_multicast(b, params.sub, commons, "mc.");
  add_unicast(b, params.sub, side_rx1, side_rx2);
}

Node swap_rx(Node n) {
  if (n == Node::Rx1) return Node::Rx2;
  if (n == Node::Rx2) return Node::Rx1;
  return n;
}

/// Exchanges the roles of the two receivers throughout a built spec.
void mirror_receivers(SchemeSpec& spec) {
  for (auto& slot : spec.slots) {
    std::swap(slot.state.per_node[0], slot.state.per_node[1]);
    for (auto& st : slot.streams) {
      for (auto& t : st.payload.terms)
        if (!t.is_symbol) t.obs.node = swap_rx(t.obs.node);
      for (auto& r : st.beam.null_of) r.node = swap_rx(r.node);
    }
  }
  SymbolTable swapped;
  for (const auto& s : spec.symbols.all()) {
    Owner o = s.owner;
    if (o == Owner::Rx1)
      o = Owner::Rx2;
    else if (o == Owner::Rx2)
      o = Owner::Rx1;
    swapped.add(s.name, s.kind, o);
  }
  spec.symbols = swapped;
}

void finalize(SchemeSpec& spec, bool secure) {
  const Topology& top = spec.topology;
  spec.decoders.clear();
  spec.adversaries.clear();
  for (Node n : top.nodes())
    if (n != Node::Eve) spec.decoders.push_back({n, spec.symbols.intended(n), {}});
  if (secure) {
    if (top.has_eavesdropper) {
      spec.adversaries.push_back({Node::Eve, spec.symbols.messages(), {}});
    } else {
      // Broadcast: each receiver eavesdrops on the other, knowing its own messages.
      spec.adversaries.push_back({Node::Rx1, spec.symbols.owned_by(Owner::Rx2), spec.symbols.owned_by(Owner::Rx1)});
      spec.adversaries.push_back({Node::Rx2, spec.symbols.owned_by(Owner::Rx1), spec.symbols.owned_by(Owner::Rx2)});
    }
  }
  spec.nominal = accounting(spec);
}

std::vector<Q> fresh(Builder& b, const std::string& stem, int count, Owner o) {
  std::vector<Q> out;
  for (int i = 1; i <= count; ++i) out.push_back(b.msg(stem + std::to_string(i), o));
  return out;
}

void check_no_params(SchemeId id, const SchemeParams& p) {
  if (p.multiplier || p.batch)
    throw LabError(ErrorCode::BadParams, to_string(id) + " takes no multiplier or batch parameter");
}

}  // namespace

SchemeSpec build_scheme(SchemeId id, const SchemeParams& params) {
  Builder b;
  b.spec.id = id;
  b.spec.params = params;
  bool secure = true;
  const Node rx1 = Node::Rx1, rx2 = Node::Rx2, eve = Node::Eve;

  switch (id) {
    case SchemeId::WT_PP:
    case SchemeId::WT_DP: {
      check_no_params(id, params);
      b.spec.topology = Topology::wiretap();
      const int s = b.slot(id == SchemeId::WT_PP ? "PP" : "DP");
      b.stream(s, b.msg("v", Owner::Rx1), BeamRule::null({{eve, s}}));
      break;
    }
    case SchemeId::WT_PD: {
      check_no_params(id, params);
      b.spec.topology = Topology::wiretap();
      const int s = b.slot("PD");
      b.stream(s, b.msg("v", Owner::Rx1), BeamRule::along(0));
      b.stream(s, b.noise("u"), BeamRule::null({{rx1, s}}));
      break;
    }
    case SchemeId::WT_DD_23: {
      check_no_params(id, params);
      b.spec.topology = Topology::wiretap();
      const int s1 = b.slot("DD");
      b.axes(s1, {b.noise("u1"), b.noise("u2")});
      const int s2 = b.slot("DD");
      b.axes(s2, {b.msg("v1", Owner::Rx1), b.msg("v2", Owner::Rx1)});
      b.stream(s2, obs(rx1, s1), BeamRule::along(0));
      // The eavesdropper's own slot-2 output: useful to the receiver, nothing new to the eavesdropper.
      const int s3 = b.slot("DD");
      b.stream(s3, obs(eve, s2), BeamRule::along(0));
      break;
    }
    case SchemeId::MR_PPD: {
      check_no_params(id, params);
      b.spec.topology = Topology::multi_receiver();
      const int s = b.slot("PPD");
      b.stream(s, b.msg("v", Owner::Rx1), BeamRule::null({{rx2, s}}));
      b.stream(s, b.msg("w", Owner::Rx2), BeamRule::null({{rx1, s}}));
      b.stream(s, b.noise("u"), BeamRule::null({{rx1, s}, {rx2, s}}));
      break;
    }
    case SchemeId::MR_PDP: {
      check_no_params(id, params);
      b.spec.topology = Topology::multi_receiver();
      const int s1 = b.slot("PDP");
      b.nulled(s1, {b.msg("v1", Owner::Rx1), b.msg("v2", Owner::Rx1)}, {{eve, s1}});
      const int w = b.stream(s1, b.msg("w", Owner::Rx2), BeamRule::null({{eve, s1}, {rx1, s1}}));
      const int s2 = b.slot("PDP");
      b.stream(s2, obs(rx2, s1, {w}), BeamRule::null({{eve, s2}}));
      break;
    }
    case SchemeId::MR_DDP: {
      check_no_params(id, params);
      b.spec.topology = Topology::multi_receiver();
      const int s1 = b.slot("DDP");
      b.nulled(s1, {b.msg("v1", Owner::Rx1), b.msg("v2", Owner::Rx1)}, {{eve, s1}});
      const int s2 = b.slot("DDP");
      b.nulled(s2, {b.msg("w1", Owner::Rx2), b.msg("w2", Owner::Rx2)}, {{eve, s2}});
      const int s3 = b.slot("DDP");
      b.stream(s3, obs(rx1, s2) + obs(rx2, s1), BeamRule::null({{eve, s3}}));
      break;
    }
    case SchemeId::MR_PDD: {
      check_no_params(id, params);
      b.spec.topology = Topology::multi_receiver();
      const int s = b.slot("PDD");
      b.stream(s, b.msg("v", Owner::Rx1), BeamRule::along(0));
      b.stream(s, b.noise("u"), BeamRule::null({{rx1, s}}));
      break;
    }
    case SchemeId::MR_S30_29_A:
    case SchemeId::MR_S30_29_B: {
      if (params.batch) throw LabError(ErrorCode::BadParams, "the superframe batch follows from the multiplier");
      b.spec.topology = Topology::multi_receiver();
      build_s30_29(b, params);
      if (id == SchemeId::MR_S30_29_B) mirror_receivers(b.spec);
      break;
    }
    case SchemeId::SUB_PD_DP_UNICAST: {
      if (params.multiplier || params.batch) throw LabError(ErrorCode::BadParams, "unicast block takes no size");
      b.spec.topology = Topology::multi_receiver();
      const int k = unicast_block_size(params.sub);
      const auto p = fresh(b, "p", k, Owner::Rx1);
      const auto q = fresh(b, "q", k, Owner::Rx2);
      add_unicast(b, params.sub, p, q);
      secure = false;
      break;
    }
    case SchemeId::SUB_SECURE_MULTICAST: {
      if (params.multiplier) throw LabError(ErrorCode::BadParams, "multicast takes a batch, not a multiplier");
      b.spec.topology = Topology::multi_receiver();
      const int pairs = params.batch.value_or(default_batch(params.sub));
      if (pairs <= 0) throw LabError(ErrorCode::BadParams, "batch must be positive");
      add_secure_multicast(b, params.sub, fresh(b, "c", 2 * pairs, Owner::Common), "");
      break;
    }
    case SchemeId::BC_PP_S2: {
      check_no_params(id, params);
      b.spec.topology = Topology::broadcast();
      const int s = b.slot("PP");
      b.stream(s, b.msg("v", Owner::Rx1), BeamRule::null({{rx2, s}}));
      b.stream(s, b.msg("w", Owner::Rx2), BeamRule::null({{rx1, s}}));
      break;
    }
    case SchemeId::BC_DD_S1: {
      check_no_params(id, params);
      b.spec.topology = Topology::broadcast();
      const int s1 = b.slot("DD");
      b.axes(s1, {b.noise("u1"), b.noise("u2")});
      const int s2 = b.slot("DD");
      b.axes(s2, {b.msg("v1", Owner::Rx1), b.msg("v2", Owner::Rx1)});
      b.stream(s2, obs(rx1, s1), BeamRule::along(0));
      const int s3 = b.slot("DD");
      b.axes(s3, {b.msg("w1", Owner::Rx2), b.msg("w2", Owner::Rx2)});
      b.stream(s3, obs(rx2, s1), BeamRule::along(0));
      const int s4 = b.slot("DD");
      b.stream(s4, obs(rx2, s2) + obs(rx1, s3), BeamRule::along(0));
      break;
    }
    case SchemeId::BC_S1_43:
    case SchemeId::BC_S2_43: {
      check_no_params(id, params);
      b.spec.topology = Topology::broadcast();
      const bool s1_variant = id == SchemeId::BC_S1_43;
      const int s1 = b.slot(s1_variant ? "DP" : "DD");
      b.axes(s1, {b.noise("u1"), b.noise("u2")});
      const int s2 = b.slot(s1_variant ? "PD" : "DD");
      b.axes(s2, {b.msg("v1", Owner::Rx1), b.msg("v2", Owner::Rx1)});
      b.stream(s2, obs(rx1, s1), BeamRule::along(0));
      const int s3 = b.slot("DP");
      b.axes(s3, {b.msg("w1", Owner::Rx2), b.msg("w2", Owner::Rx2)});
      b.stream(s3, obs(rx2, s1), BeamRule::along(0));
      const int v3 = b.stream(s3, b.msg("v3", Owner::Rx1), BeamRule::null({{rx2, s3}}));
      const int s4 = b.slot("PD");
      b.stream(s4, obs(rx2, s2), BeamRule::along(0));
      b.stream(s4, b.msg("w3", Owner::Rx2), BeamRule::null({{rx1, s4}}));
      // Receiver 1's slot-3 output without v3: interference for receiver 1, wanted by receiver 2.
      const Q mixed = obs(rx1, s3, {v3});
      const int s5 = b.slot("DP");
      b.stream(s5, mixed, BeamRule::along(0));
      b.stream(s5, b.msg("v4", Owner::Rx1), BeamRule::null({{rx2, s5}}));
      const int s6 = b.slot("PD");
      b.stream(s6, mixed, BeamRule::along(0));
      b.stream(s6, b.msg("w4", Owner::Rx2), BeamRule::null({{rx1, s6}}));
      break;
    }
  }
  finalize(b.spec, secure);

  if (id == SchemeId::MR_S30_29_A || id == SchemeId::MR_S30_29_B) {
    SchemeParams sub_params;
    sub_params.sub = params.sub;
    const auto uni = build_scheme(SchemeId::SUB_PD_DP_UNICAST, sub_params);
    const auto mc = build_scheme(SchemeId::SUB_SECURE_MULTICAST, sub_params);
    b.spec.nominal.sub_dof_assumptions["DoF_PD/DP"] =
        uni.nominal.nominal_sdof.at(Node::Rx1) + uni.nominal.nominal_sdof.at(Node::Rx2);
    b.spec.nominal.sub_dof_assumptions["SDoF_common"] = mc.nominal.nominal_sdof.at(Node::Rx1);
  } else if (id == SchemeId::SUB_PD_DP_UNICAST) {
    b.spec.nominal.sub_dof_assumptions["DoF_PD/DP"] =
        b.spec.nominal.nominal_sdof.at(Node::Rx1) + b.spec.nominal.nominal_sdof.at(Node::Rx2);
  } else if (id == SchemeId::SUB_SECURE_MULTICAST) {
    b.spec.nominal.sub_dof_assumptions["SDoF_common"] = b.spec.nominal.nominal_sdof.at(Node::Rx1);
  }
  return b.spec;
}

// ---------------------------------------------------------------------------
// Accounting

AccountingReport accounting(const SchemeSpec& spec) {
  AccountingReport r;
  r.slots_total = spec.n_slots();
  for (Node n : spec.topology.nodes()) {
    if (n == Node::Eve) continue;
    const int k = static_cast<int>(spec.symbols.intended(n).size());
    r.symbols_per_receiver[n] = k;
    r.nominal_sdof[n] = spec.n_slots() == 0 ? Rational(0) : Rational(k) / spec.n_slots();
  }
  r.sub_dof_assumptions = spec.nominal.sub_dof_assumptions;
  return r;
}

AccountingReport composite_accounting(const Rational& sub_dof, int phaseA_symbols, int phaseA_slots) {
  if (sub_dof <= 0) throw LabError(ErrorCode::NonPositiveSubDof, "sub-protocol DoF " + to_string(sub_dof));
  if (sub_dof > 2) throw LabError(ErrorCode::BadParams, "sub-protocol DoF exceeds 2");
  if (phaseA_symbols <= 0 || phaseA_slots <= 0) throw LabError(ErrorCode::BadParams, "phase A sizes must be positive");
  const Rational common = Rational(2) / (2 + 2 / sub_dof);
  const Rational slots = phaseA_slots + 2 / sub_dof + 1 / common;
  const Rational d = Rational(phaseA_symbols) / slots;
  AccountingReport r;
  r.slots_total = slots;
  r.symbols_per_receiver = {{Node::Rx1, phaseA_symbols}, {Node::Rx2, phaseA_symbols}};
  r.nominal_sdof = {{Node::Rx1, d}, {Node::Rx2, d}};
  r.sub_dof_assumptions = {{"DoF_PD/DP", sub_dof}, {"SDoF_common", common}};
  return r;
}

// ---------------------------------------------------------------------------
// Execution

namespace {

[[noreturn]] void csit_violation(int t, const std::string& what) {
  throw LabError(ErrorCode::CsitViolation, "slot " + std::to_string(t) + ": " + what);
}

void check_channel_access(const Topology& top, const StateLabel& state, int t, const ChannelRef& ref) {
  if (!top.has_node(ref.node))
    throw LabError(ErrorCode::BadParams, "node " + to_string(ref.node) + " absent from topology");
  if (ref.slot < 0) throw LabError(ErrorCode::BadParams, "negative slot reference");
  if (ref.slot < t) return;
  if (ref.slot > t) csit_violation(t, "future CSI of " + to_string(ref.node));
  if (state[top.state_index(ref.node)] != Csit::P)
    csit_violation(t, "current CSI of " + to_string(ref.node) + " under state " + state.str());
}

}  // namespace

TransmissionTrace run_scheme(const SchemeSpec& spec, const ChannelRealization& realization, const PowerBudget& power,
                             RunMode mode, std::uint64_t seed) {
  if (!(realization.topology == spec.topology))
    throw LabError(ErrorCode::BadArgument, "realization topology does not match the scheme");
  if (realization.n_slots < spec.n_slots())
    throw LabError(ErrorCode::RealizationTooShort, std::to_string(realization.n_slots) + " slots for a " +
                                                       std::to_string(spec.n_slots()) + "-slot scheme");
  TransmissionTrace tr;
  tr.spec = std::make_shared<const SchemeSpec>(spec);
  tr.topology = spec.topology;
  tr.symbols = spec.symbols;
  for (const auto& a : spec.adversaries) tr.protected_symbols[a.node] = a.protected_symbols;
  tr.realization = realization;
  tr.power = power.total_power;
  tr.mode = mode;
  tr.seed = seed;
  tr.planned_slots = spec.n_slots();

  const int n_tx = spec.topology.n_tx;
  const int n_sym = spec.symbols.size();
  const double amp = std::sqrt(power.total_power);
  const CounterRng base(seed, kTraceStream);
  const CounterRng sym_rng = base.substream(0);

  tr.symbol_values.resize(n_sym);
  for (int i = 0; i < n_sym; ++i) tr.symbol_values(i) = sym_rng.complex_normal(static_cast<std::uint64_t>(i));
  for (Node n : spec.topology.nodes()) {
    tr.observations[n] = {};
    tr.noise[n] = {};
  }

  for (int t = 0; t < spec.n_slots(); ++t) {
    const SlotPlan& plan = spec.slots[static_cast<std::size_t>(t)];
    if (plan.state.arity() != spec.topology.label_arity())
      throw LabError(ErrorCode::BadParams, "slot state " + plan.state.str() + " has the wrong arity");
    const double share = plan.streams.empty() ? 0.0 : 1.0 / static_cast<double>(plan.streams.size());
    std::vector<Eigen::MatrixXcd> gains;
    std::vector<Beamformer> beams;
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(n_tx, n_sym);

    for (const Stream& st : plan.streams) {
      Eigen::RowVectorXcd f = Eigen::RowVectorXcd::Zero(n_sym);
      for (const Term& term : st.payload.terms) {
        if (term.is_symbol) {
          f(spec.symbols.index(term.symbol)) += term.coeff;
          continue;
        }
        const ObsRef& o = term.obs;
        if (!spec.topology.has_node(o.node))
          throw LabError(ErrorCode::BadParams, "node " + to_string(o.node) + " absent from topology");
        if (o.slot >= t) csit_violation(t, "observation of slot " + std::to_string(o.slot) + " is not yet available");
        if (o.slot < 0) throw LabError(ErrorCode::BadParams, "negative slot reference");
        const auto& past = tr.stream_gain[static_cast<std::size_t>(o.slot)];
        Eigen::MatrixXcd sent = Eigen::MatrixXcd::Zero(n_tx, n_sym);
        for (std::size_t j = 0; j < past.size(); ++j)
          if (std::find(o.exclude_streams.begin(), o.exclude_streams.end(), static_cast<int>(j)) ==
              o.exclude_streams.end())
            sent += past[j];
        for (int j : o.exclude_streams)
          if (j < 0 || j >= static_cast<int>(past.size()))
            throw LabError(ErrorCode::BadParams, "excluded stream index out of range");
        f += term.coeff * (realization.row(o.node, o.slot) * sent);
      }

      Beamformer bf;
      if (st.beam.kind == BeamRule::Kind::Axis) {
        if (st.beam.axis < 0 || st.beam.axis >= n_tx) throw LabError(ErrorCode::BadParams, "axis out of range");
        bf.vector = Eigen::VectorXcd::Unit(n_tx, st.beam.axis);
      } else {
        std::vector<Eigen::RowVectorXcd> rows;
        for (const ChannelRef& r : st.beam.null_of) {
          check_channel_access(spec.topology, plan.state, t, r);
          rows.push_back(realization.row(r.node, r.slot));
        }
        bool degenerate = false;
        const Eigen::MatrixXcd basis = null_basis(rows, n_tx, &degenerate);
        if (st.beam.column < 0 || st.beam.column >= basis.cols())
          throw LabError(ErrorCode::BadParams, "nullspace column out of range");
        bf.vector = basis.col(st.beam.column);
        bf.constraints = rows;
        bf.degenerate_rows = degenerate;
      }

      Eigen::MatrixXcd g = bf.vector * f;
      const double p = g.squaredNorm();
      if (p > 0) g *= std::sqrt(share / p);
      gains.push_back(std::move(g));
      total += gains.back();
      beams.push_back(std::move(bf));
    }

    // Streams sharing symbols can add coherently; scale the slot back to budget.
    const double used = total.squaredNorm();
    if (used > 1.0) {
      const double c = 1.0 / std::sqrt(used);
      for (auto& g : gains) g *= c;
      total *= c;
    }

    tr.stream_gain.push_back(std::move(gains));
    tr.beams.push_back(std::move(beams));
    tr.slot_gain.push_back(total);
    const Eigen::VectorXcd x = amp * (total * tr.symbol_values);
    tr.x.push_back(x);
    for (Node n : spec.topology.nodes()) {
      Complex noise = 0.0;
      if (mode == RunMode::Noisy)
        noise = base.substream(1 + static_cast<std::uint64_t>(n)).complex_normal(static_cast<std::uint64_t>(t));
      const Complex y = (realization.row(n, t) * x)(0) + noise;
      tr.observations[n].push_back(y);
      tr.noise[n].push_back(noise);
    }
    ++tr.executed_slots;
  }
  return tr;
}

TransmissionTrace run_with_seed(const SchemeSpec& spec, std::uint64_t seed, double power, RunMode mode) {
  const auto real = sample_channel(spec.topology, std::max(spec.n_slots(), 1), seed);
  return run_scheme(spec, real, PowerBudget(power), mode, seed);
}

// ---------------------------------------------------------------------------
// Decoding

bool DecodeReport::success() const {
  return std::all_of(receivers.begin(), receivers.end(), [](const NodeDecode& d) { return d.success; });
}

bool DecodeReport::secure() const {
  return std::all_of(adversaries.begin(), adversaries.end(), [](const AdversaryOutcome& a) { return a.secure; });
}

double DecodeReport::max_residual() const {
  double m = 0.0;
  for (const auto& d : receivers) m = std::max(m, d.residual);
  return m;
}

namespace {

NodeDecode decode_node(const EffectiveLinearSystem& sys, const TransmissionTrace& tr, const DecodeTask& task) {
  NodeDecode out;
  out.node = task.node;
  out.targets = task.targets;
  if (task.targets.empty()) return out;

  const NodeSystem& ns = sys.node(task.node);
  const auto t_cols = sys.columns(task.targets);
  const auto k_cols = sys.columns(task.known);
  std::vector<int> n_cols;
  for (int j = 0; j < sys.symbols.size(); ++j)
    if (std::find(t_cols.begin(), t_cols.end(), j) == t_cols.end() &&
        std::find(k_cols.begin(), k_cols.end(), j) == k_cols.end())
      n_cols.push_back(j);

  const double amp = std::sqrt(tr.power);
  Eigen::VectorXcd y = ns.observed;
  for (int j : k_cols) y -= amp * ns.gain.col(j) * tr.symbol_values(j);

  const Eigen::MatrixXcd a = amp * sys.block(task.node, t_cols);
  const Eigen::MatrixXcd nu = amp * sys.block(task.node, n_cols);
  Eigen::MatrixXcd proj;  // rows: directions free of nuisance
  if (nu.cols() == 0 || nu.rows() == 0) {
    proj = Eigen::MatrixXcd::Identity(y.size(), y.size());
  } else {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(nu, Eigen::ComputeFullU);
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    const double tol = std::max(1e-8 * std::max(smax, a.norm()), 1e-10 * amp);
    int r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > tol) ++r;
    proj = svd.matrixU().rightCols(y.size() - r).adjoint();
  }
  const Eigen::MatrixXcd pa = proj * a;
  const Eigen::VectorXcd py = proj * y;
  Eigen::VectorXcd est = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(t_cols.size()));
  if (pa.rows() > 0) est = pa.completeOrthogonalDecomposition().solve(py);

  Eigen::VectorXcd truth(static_cast<Eigen::Index>(t_cols.size()));
  for (std::size_t i = 0; i < t_cols.size(); ++i) truth(static_cast<Eigen::Index>(i)) = tr.symbol_values(t_cols[i]);
  out.recovered = est;
  out.residual = (est - truth).norm() / std::max(truth.norm(), 1e-300);
  out.success = out.residual <= kDecodeTolerance;
  return out;
}

}  // namespace

NodeDecode decode_one(const TransmissionTrace& trace, const DecodeTask& task) {
  return decode_node(assemble_effective_system(trace), trace, task);
}

DecodeReport decode(const TransmissionTrace& trace) {
  DecodeReport rep;
  if (!trace.spec) return rep;
  const auto sys = assemble_effective_system(trace);
  for (const auto& task : trace.spec->decoders) rep.receivers.push_back(decode_node(sys, trace, task));
  for (const auto& adv : trace.spec->adversaries) {
    AdversaryOutcome o;
    o.node = adv.node;
    o.identifiable = identifiable_symbols(sys, adv.node, adv.protected_symbols, adv.known);
    o.secure = o.identifiable.empty();
    rep.adversaries.push_back(std::move(o));
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::optional<TheoremBinding> theorem_for(const SchemeSpec& spec) {
  const auto single = [](const char* label) { return make_schedule({{label, Rational(1)}}); };
  const auto alternating = make_schedule({{"PDD", rat(1, 2)}, {"DPD", rat(1, 2)}}, true);
  switch (spec.id) {
    case SchemeId::WT_PP: return TheoremBinding{"thm1", single("PP")};
    case SchemeId::WT_DP: return TheoremBinding{"thm1", single("DP")};
    case SchemeId::WT_PD: return TheoremBinding{"thm1", single("PD")};
    case SchemeId::WT_DD_23: return TheoremBinding{"thm1", single("DD")};
    case SchemeId::MR_PPD: return TheoremBinding{"thm2", single("PPD")};
    case SchemeId::MR_PDP: return TheoremBinding{"thm3", single("PDP")};
    case SchemeId::MR_DDP: return TheoremBinding{"thm4", single("DDP")};
    case SchemeId::MR_PDD:
    case SchemeId::MR_S30_29_A:
    case SchemeId::MR_S30_29_B: return TheoremBinding{"thm6", alternating};
    case SchemeId::SUB_PD_DP_UNICAST:
    case SchemeId::SUB_SECURE_MULTICAST: return std::nullopt;
    case SchemeId::BC_PP_S2:
    case SchemeId::BC_DD_S1:
    case SchemeId::BC_S1_43:
    case SchemeId::BC_S2_43: {
      std::map<StateLabel, Rational> lam;
      for (const auto& s : spec.slots) lam[s.state] += Rational(1) / spec.n_slots();
      return TheoremBinding{"thm7", validate_schedule(lam, false)};
    }
  }
  return std::nullopt;
}

}  // namespace sdof
