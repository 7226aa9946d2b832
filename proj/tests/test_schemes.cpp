#include "sdof/error.hpp"
#include "sdof/schemes.hpp"

#include <gtest/gtest.h>

using namespace sdof;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const LabError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no LabError thrown";
  return ErrorCode::ConfigError;
}

std::string states(const SchemeSpec& s) {
  std::string out;
  for (const auto& p : s.slots) out += p.state.str() + " ";
  return out;
}

}  // namespace

TEST(SchemeIds, RoundTrip) {
  EXPECT_EQ(all_scheme_ids().size(), 16u);
  for (SchemeId id : all_scheme_ids()) EXPECT_EQ(parse_scheme_id(to_string(id)), id);
  EXPECT_EQ(parse_scheme_id("MR_DDP"), SchemeId::MR_DDP);
  EXPECT_EQ(code_of([] { parse_scheme_id("mr_xyz"); }), ErrorCode::UnknownScheme);
}

TEST(Build, DdpShape) {
  const auto s = build_scheme(SchemeId::MR_DDP);
  ASSERT_EQ(s.n_slots(), 3);
  EXPECT_EQ(states(s), "DDP DDP DDP ");
  // Slot 3 carries receiver 1's slot-2 output plus receiver 2's slot-1 output, nulled at the eavesdropper.
  const auto& st = s.slots[2].streams.at(0);
  ASSERT_EQ(st.payload.terms.size(), 2u);
  EXPECT_EQ(st.beam.kind, BeamRule::Kind::Null);
  EXPECT_EQ(st.beam.null_of.at(0).node, Node::Eve);
  EXPECT_EQ(st.beam.null_of.at(0).slot, 2);
  EXPECT_EQ(s.nominal.nominal_sdof.at(Node::Rx1), rat(2, 3));
  EXPECT_EQ(s.nominal.nominal_sdof.at(Node::Rx2), rat(2, 3));
}

TEST(Build, FourThirdsShape) {
  const auto s = build_scheme(SchemeId::BC_S1_43);
  EXPECT_EQ(states(s), "DP PD DP PD DP PD ");
  EXPECT_EQ(s.nominal.symbols_per_receiver.at(Node::Rx1), 4);
  EXPECT_EQ(s.nominal.symbols_per_receiver.at(Node::Rx2), 4);
  EXPECT_EQ(s.nominal.nominal_sdof.at(Node::Rx1), rat(2, 3));
  EXPECT_EQ(states(build_scheme(SchemeId::BC_S2_43)), "DD DD DP PD DP PD ");
}

TEST(Build, SuperframeAccounting) {
  const auto a = build_scheme(SchemeId::MR_S30_29_A);
  EXPECT_EQ(a.n_slots(), 58);
  EXPECT_EQ(a.nominal.symbols_per_receiver.at(Node::Rx1), 30);
  EXPECT_EQ(a.nominal.symbols_per_receiver.at(Node::Rx2), 30);
  EXPECT_EQ(a.nominal.nominal_sdof.at(Node::Rx1), rat(15, 29));
  int pdd = 0;
  for (const auto& p : a.slots) pdd += p.state.str() == "PDD";
  EXPECT_EQ(pdd, 44);  // 22/29 of 58
  EXPECT_EQ(a.nominal.sub_dof_assumptions.at("DoF_PD/DP"), rat(5, 3));
  EXPECT_EQ(a.nominal.sub_dof_assumptions.at("SDoF_common"), rat(5, 8));
  // Consistent with the closed-form composite prediction.
  const auto pred = composite_accounting(a.nominal.sub_dof_assumptions.at("DoF_PD/DP"));
  EXPECT_EQ(pred.nominal_sdof.at(Node::Rx1), a.nominal.nominal_sdof.at(Node::Rx1));

  const auto b = build_scheme(SchemeId::MR_S30_29_B);
  int dpd = 0;
  for (const auto& p : b.slots) dpd += p.state.str() == "DPD";
  EXPECT_EQ(dpd, 44);
  EXPECT_EQ(b.nominal.nominal_sdof.at(Node::Rx2), rat(15, 29));
}

TEST(Build, FallbackAccounting) {
  SchemeParams p;
  p.sub = SubProtocol::Fallback32;
  const auto a = build_scheme(SchemeId::MR_S30_29_A, p);
  EXPECT_EQ(a.nominal.nominal_sdof.at(Node::Rx1), rat(1, 2));
  EXPECT_EQ(a.nominal.sub_dof_assumptions.at("DoF_PD/DP"), rat(3, 2));
  EXPECT_EQ(a.nominal.sub_dof_assumptions.at("SDoF_common"), rat(3, 5));
  const auto u = build_scheme(SchemeId::SUB_PD_DP_UNICAST, p);
  EXPECT_EQ(u.n_slots(), 4);
  const auto m = build_scheme(SchemeId::SUB_SECURE_MULTICAST, p);
  EXPECT_EQ(m.nominal.nominal_sdof.at(Node::Rx1), rat(3, 5));
}

TEST(Build, SubProtocols) {
  const auto u = build_scheme(SchemeId::SUB_PD_DP_UNICAST);
  EXPECT_EQ(u.n_slots(), 6);
  EXPECT_EQ(states(u), "PDD DPD PDD DPD PDD DPD ");
  EXPECT_EQ(u.nominal.symbols_per_receiver.at(Node::Rx1), 5);
  const auto m = build_scheme(SchemeId::SUB_SECURE_MULTICAST);
  EXPECT_EQ(m.n_slots(), 16);
  EXPECT_EQ(m.nominal.symbols_per_receiver.at(Node::Rx1), 10);
  EXPECT_EQ(m.nominal.nominal_sdof.at(Node::Rx1), rat(5, 8));
}

TEST(Build, BadParams) {
  SchemeParams p;
  p.multiplier = 7;
  EXPECT_EQ(code_of([&] { build_scheme(SchemeId::MR_S30_29_A, p); }), ErrorCode::BadParams);
  EXPECT_EQ(code_of([&] { build_scheme(SchemeId::MR_DDP, p); }), ErrorCode::BadParams);
  p.multiplier = 20;
  EXPECT_EQ(build_scheme(SchemeId::MR_S30_29_A, p).n_slots(), 116);
  SchemeParams q;
  q.batch = 4;
  EXPECT_EQ(code_of([&] { build_scheme(SchemeId::SUB_SECURE_MULTICAST, q); }), ErrorCode::BadParams);
  EXPECT_EQ(code_of([] { parse_sub_protocol("tjsp99"); }), ErrorCode::BadParams);
}

TEST(Accounting, Composite) {
  auto r = composite_accounting(rat(5, 3));
  EXPECT_EQ(r.sub_dof_assumptions.at("SDoF_common"), rat(5, 8));
  EXPECT_EQ(r.nominal_sdof.at(Node::Rx1), rat(15, 29));
  r = composite_accounting(rat(3, 2));
  EXPECT_EQ(r.sub_dof_assumptions.at("SDoF_common"), rat(3, 5));
  EXPECT_EQ(r.nominal_sdof.at(Node::Rx1), rat(1, 2));
  r = composite_accounting(rat(2));
  EXPECT_EQ(r.sub_dof_assumptions.at("SDoF_common"), rat(2, 3));
  EXPECT_EQ(r.nominal_sdof.at(Node::Rx1), rat(6, 11));
  EXPECT_EQ(code_of([] { composite_accounting(rat(0)); }), ErrorCode::NonPositiveSubDof);
  EXPECT_EQ(code_of([] { composite_accounting(rat(-1, 2)); }), ErrorCode::NonPositiveSubDof);
}

TEST(Accounting, Examples) {
  const auto pdp = accounting(build_scheme(SchemeId::MR_PDP));
  EXPECT_EQ(pdp.nominal_sdof.at(Node::Rx1), 1);
  EXPECT_EQ(pdp.nominal_sdof.at(Node::Rx2), rat(1, 2));
  EXPECT_EQ(accounting(build_scheme(SchemeId::WT_DD_23)).nominal_sdof.at(Node::Rx1), rat(2, 3));
  for (SchemeId id : all_scheme_ids()) {
    const auto s = build_scheme(id);
    for (const auto& [n, d] : s.nominal.nominal_sdof)
      EXPECT_EQ(d, Rational(s.nominal.symbols_per_receiver.at(n)) / s.n_slots()) << to_string(id);
  }
}

TEST(Run, PpdEavesdropperOutput) {
  const auto spec = build_scheme(SchemeId::MR_PPD);
  const auto real = sample_channel(spec.topology, 1, 17);
  const auto tr = run_scheme(spec, real, PowerBudget(1e4), RunMode::Noiseless, 17);
  // Every receiver-side null holds.
  for (const auto& b : tr.beams[0])
    for (const auto& r : b.constraints) EXPECT_LE(std::abs((r * b.vector)(0)), 1e-10 * r.norm());
  // z = g (b'1 v + b1 w + b12 u): the sum of all three stream contributions.
  Complex z = 0;
  for (const auto& g : tr.stream_gain[0]) z += (real.g[0] * g * tr.symbol_values)(0) * 100.0;
  EXPECT_NEAR(std::abs(z - tr.observations.at(Node::Eve)[0]), 0.0, 1e-9);
  // Receiver 1 sees only v.
  const Eigen::RowVectorXcd y1 = real.h[0] * tr.slot_gain[0];
  EXPECT_LE(std::abs(y1(tr.symbols.index("w"))), 1e-10);
  EXPECT_LE(std::abs(y1(tr.symbols.index("u"))), 1e-10);
}

TEST(Run, PdpEavesdropperNulled) {
  const auto spec = build_scheme(SchemeId::MR_PDP);
  const auto tr = run_with_seed(spec, 3, 1e4);
  for (Complex z : tr.observations.at(Node::Eve)) EXPECT_LE(std::abs(z), 1e-10 * 100.0);
}

TEST(Run, CsitViolationOnMutation) {
  auto spec = build_scheme(SchemeId::MR_PDD);
  // Eavesdropper CSI is delayed in PDD: nulling its current row is illegal.
  spec.slots[0].streams[1].beam = BeamRule::null({{Node::Eve, 0}});
  EXPECT_EQ(code_of([&] { run_with_seed(spec, 1, 10.0); }), ErrorCode::CsitViolation);

  auto spec2 = build_scheme(SchemeId::MR_DDP);
  spec2.slots[0].streams[0].beam = BeamRule::null({{Node::Rx1, 0}});
  EXPECT_EQ(code_of([&] { run_with_seed(spec2, 1, 10.0); }), ErrorCode::CsitViolation);

  auto spec3 = build_scheme(SchemeId::MR_DDP);
  spec3.slots[2].streams[0].payload = Quantity::observation(Node::Rx1, 2);
  EXPECT_EQ(code_of([&] { run_with_seed(spec3, 1, 10.0); }), ErrorCode::CsitViolation);

  auto spec4 = build_scheme(SchemeId::MR_DDP);
  spec4.slots[0].streams[0].beam = BeamRule::null({{Node::Eve, 1}});
  EXPECT_EQ(code_of([&] { run_with_seed(spec4, 1, 10.0); }), ErrorCode::CsitViolation);
}

TEST(Run, LegalityPropertyOverAllSchemes) {
  // Flipping any P entry that a current-slot null depends on must trip the check.
  for (SchemeId id : all_scheme_ids()) {
    const auto spec = build_scheme(id);
    int mutations = 0;
    for (int t = 0; t < spec.n_slots() && mutations < 4; ++t)
      for (const auto& st : spec.slots[t].streams)
        for (const auto& r : st.beam.null_of)
          if (r.slot == t) {
            auto m = spec;
            m.slots[t].state.per_node[spec.topology.state_index(r.node)] = Csit::D;
            EXPECT_EQ(code_of([&] { run_with_seed(m, 2, 10.0); }), ErrorCode::CsitViolation) << to_string(id);
            ++mutations;
          }
  }
}

TEST(Run, RealizationChecks) {
  const auto spec = build_scheme(SchemeId::MR_DDP);
  EXPECT_EQ(code_of([&] {
              run_scheme(spec, sample_channel(spec.topology, 2, 1), PowerBudget(1.0), RunMode::Noiseless, 1);
            }),
            ErrorCode::RealizationTooShort);
  EXPECT_EQ(code_of([&] {
              run_scheme(spec, sample_channel(Topology::broadcast(), 3, 1), PowerBudget(1.0), RunMode::Noiseless, 1);
            }),
            ErrorCode::BadArgument);
}

TEST(Run, PowerAndDeterminism) {
  for (SchemeId id : all_scheme_ids()) {
    const auto spec = build_scheme(id);
    const auto tr = run_with_seed(spec, 6, 1e5);
    for (int t = 0; t < spec.n_slots(); ++t) EXPECT_LE(tr.slot_power(t), 1e5 * (1 + 1e-9)) << to_string(id);
    for (const auto& slot : tr.beams)
      for (const auto& b : slot) {
        EXPECT_NEAR(b.vector.norm(), 1.0, 1e-12);
        for (const auto& r : b.constraints) EXPECT_LE(std::abs((r * b.vector)(0)), 1e-10 * r.norm());
      }
    const auto again = run_with_seed(spec, 6, 1e5);
    EXPECT_TRUE(again.symbol_values == tr.symbol_values);
    EXPECT_TRUE(again.observations == tr.observations);
  }
}

TEST(Decode, AllSchemesManySeeds) {
  for (SchemeId id : all_scheme_ids()) {
    const auto spec = build_scheme(id);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto rep = decode(run_with_seed(spec, seed, 1e4));
      EXPECT_TRUE(rep.success()) << to_string(id) << " seed " << seed << " residual " << rep.max_residual();
      EXPECT_TRUE(rep.secure()) << to_string(id) << " seed " << seed;
    }
  }
}

TEST(Decode, AgreesWithIdentifiabilityOracle) {
  for (SchemeId id : all_scheme_ids()) {
    const auto spec = build_scheme(id);
    for (std::uint64_t seed = 30; seed < 35; ++seed) {
      const auto tr = run_with_seed(spec, seed, 1e4);
      const auto sys = assemble_effective_system(tr);
      const auto rep = decode(tr);
      for (const auto& d : rep.receivers)
        EXPECT_EQ(d.success, identifiability_check(sys, d.node, d.targets, {})) << to_string(id);
      // A target the node cannot see must fail both ways.
      for (const auto& adv : spec.adversaries)
        for (const auto& s : adv.protected_symbols) {
          const auto wrong = decode_one(tr, {adv.node, {s}, adv.known});
          EXPECT_FALSE(wrong.success) << to_string(id) << " " << s;
          break;
        }
    }
  }
}

TEST(Decode, Examples) {
  const auto rep = decode(run_with_seed(build_scheme(SchemeId::BC_S1_43), 12, 1e4));
  ASSERT_EQ(rep.receivers.size(), 2u);
  EXPECT_EQ(rep.receivers[0].targets, (std::vector<std::string>{"v1", "v2", "v3", "v4"}));
  EXPECT_EQ(rep.receivers[1].targets, (std::vector<std::string>{"w1", "w2", "w3", "w4"}));
  EXPECT_TRUE(rep.success());

  const auto pdd = decode(run_with_seed(build_scheme(SchemeId::MR_PDD), 12, 1e4));
  EXPECT_TRUE(pdd.success());
  ASSERT_EQ(pdd.adversaries.size(), 1u);
  EXPECT_TRUE(pdd.adversaries[0].secure);

  SchemeSpec empty;
  empty.topology = Topology::wiretap();
  const auto tr = run_scheme(empty, sample_channel(empty.topology, 1, 1), PowerBudget(1.0), RunMode::Noiseless, 1);
  const auto e = decode(tr);
  EXPECT_TRUE(e.success());
  EXPECT_TRUE(e.receivers.empty());
}

TEST(Decode, NoisyModeFailsAtLowPower) {
  const auto rep = decode(run_with_seed(build_scheme(SchemeId::MR_DDP), 1, 1.0, RunMode::Noisy));
  EXPECT_FALSE(rep.success());
}

TEST(Theorems, Bindings) {
  EXPECT_EQ(theorem_for(build_scheme(SchemeId::MR_PDP))->theorem, "thm3");
  EXPECT_FALSE(theorem_for(build_scheme(SchemeId::SUB_SECURE_MULTICAST)).has_value());
  const auto b = theorem_for(build_scheme(SchemeId::BC_S2_43));
  EXPECT_EQ(b->schedule.fraction("DD"), rat(1, 3));
  EXPECT_EQ(b->schedule.fraction("PD"), rat(1, 3));
}
