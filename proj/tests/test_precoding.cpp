#include "sdof/error.hpp"
#include "sdof/precoding.hpp"
#include "sdof/rng.hpp"
#include "sdof/schemes.hpp"

#include <gtest/gtest.h>

using namespace sdof;

namespace {

Eigen::RowVectorXcd row3(Complex a, Complex b, Complex c) {
  Eigen::RowVectorXcd r(3);
  r << a, b, c;
  return r;
}

Eigen::RowVectorXcd random_row(const CounterRng& rng, std::uint64_t k, int dim) {
  Eigen::RowVectorXcd r(dim);
  for (int j = 0; j < dim; ++j) r(j) = rng.complex_normal(k * 16 + static_cast<std::uint64_t>(j));
  return r;
}

}  // namespace

TEST(NullVector, AxisCase) {
  const auto b = null_vector({row3(1, 0, 0)}, 3);
  EXPECT_NEAR(std::abs(b.vector(0)), 0.0, 1e-15);
  EXPECT_NEAR(b.vector.norm(), 1.0, 1e-14);
  EXPECT_FALSE(b.degenerate_rows);
}

TEST(NullVector, ForcedDirection) {
  const auto b = null_vector({row3(1, 0, 0), row3(0, 1, 0)}, 3);
  EXPECT_NEAR(std::abs(b.vector(0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b.vector(1)), 0.0, 1e-15);
  // Phase convention turns the surviving entry into +1.
  EXPECT_NEAR(b.vector(2).real(), 1.0, 1e-14);
  EXPECT_NEAR(b.vector(2).imag(), 0.0, 1e-15);
}

TEST(NullVector, RandomRowsResidualAndPhase) {
  const CounterRng rng(3);
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const auto r1 = random_row(rng, 2 * trial, 3);
    const auto r2 = random_row(rng, 2 * trial + 1, 3);
    const auto b = null_vector({r1, r2}, 3);
    EXPECT_LE(std::abs((r1 * b.vector)(0)), 1e-10 * r1.norm());
    EXPECT_LE(std::abs((r2 * b.vector)(0)), 1e-10 * r2.norm());
    EXPECT_NEAR(b.vector.norm(), 1.0, 1e-12);
    // First largest-magnitude entry is real and nonnegative.
    Eigen::Index k;
    b.vector.cwiseAbs().maxCoeff(&k);
    EXPECT_GE(b.vector(k).real(), 0.0);
    EXPECT_NEAR(b.vector(k).imag(), 0.0, 1e-15);
    // Pure function: same rows, same bits.
    const auto again = null_vector({r1, r2}, 3);
    EXPECT_TRUE(again.vector == b.vector);
  }
}

TEST(NullVector, Errors) {
  EXPECT_THROW(null_vector({row3(1, 0, 0), row3(0, 1, 0), row3(0, 0, 1)}, 3), LabError);
  try {
    null_vector({row3(1, 0, 0), row3(0, 1, 0), row3(0, 0, 1)}, 3);
  } catch (const LabError& e) {
    EXPECT_EQ(e.code(), ErrorCode::OverConstrained);
  }
  // Parallel rows: accepted, flagged, still orthogonal.
  const auto b = null_vector({row3(1, 2, 0), row3(2, 4, 0)}, 3);
  EXPECT_TRUE(b.degenerate_rows);
  EXPECT_LE(std::abs((row3(1, 2, 0) * b.vector)(0)), 1e-12);
}

TEST(NullBasis, OrthonormalColumns) {
  const CounterRng rng(8);
  const auto r = random_row(rng, 0, 3);
  const auto basis = null_basis({r}, 3);
  ASSERT_EQ(basis.cols(), 2);
  EXPECT_LE((basis.adjoint() * basis - Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LE((r * basis).norm(), 1e-12);
}

TEST(Rank, Tolerances) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  EXPECT_EQ(numerical_rank(m), 0);
  m(0, 0) = 1;
  m(1, 1) = 1e-9;  // below 1e-8 relative
  EXPECT_EQ(numerical_rank(m), 1);
  m(1, 1) = 1e-6;
  EXPECT_EQ(numerical_rank(m), 2);
}

TEST(SymbolTable, Basics) {
  SymbolTable t;
  t.add("v", SymbolKind::Message, Owner::Rx1);
  t.add("w", SymbolKind::Message, Owner::Rx2);
  t.add("c", SymbolKind::Message, Owner::Common);
  t.add("u", SymbolKind::Noise, Owner::Rx1);
  EXPECT_EQ(t.at(3).owner, Owner::None);
  EXPECT_EQ(t.intended(Node::Rx1), (std::vector<std::string>{"v", "c"}));
  EXPECT_EQ(t.intended(Node::Eve).size(), 0u);
  EXPECT_EQ(t.noise(), (std::vector<std::string>{"u"}));
  EXPECT_THROW(t.add("v", SymbolKind::Message, Owner::Rx1), LabError);
  try {
    t.index("nope");
  } catch (const LabError& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownSymbolId);
  }
}

TEST(EffectiveSystem, BroadcastFourThirdsShapes) {
  const auto spec = build_scheme(SchemeId::BC_S1_43);
  const auto tr = run_with_seed(spec, 4, 1e4);
  const auto sys = assemble_effective_system(tr);
  const auto& rx1 = sys.node(Node::Rx1);
  const auto& rx2 = sys.node(Node::Rx2);
  EXPECT_EQ(rx1.gain.rows(), 6);
  EXPECT_EQ(rx2.gain.rows(), 6);
  // Receiver 1 sees every symbol that matters: 4 own, 2 noise, 4 interference.
  EXPECT_EQ(numerical_rank(rx1.gain), 6);
  EXPECT_EQ(numerical_rank(rx2.gain), 6);
  EXPECT_LE(sys.reconstruction_residual, 1e-10);
  // A|B|C partition covers every symbol once.
  for (Node n : {Node::Rx1, Node::Rx2}) {
    const auto& ns = sys.node(n);
    EXPECT_EQ(ns.a_cols.size() + ns.b_cols.size() + ns.c_cols.size(), static_cast<std::size_t>(sys.symbols.size()));
    std::set<int> all(ns.a_cols.begin(), ns.a_cols.end());
    all.insert(ns.b_cols.begin(), ns.b_cols.end());
    all.insert(ns.c_cols.begin(), ns.c_cols.end());
    EXPECT_EQ(all.size(), static_cast<std::size_t>(sys.symbols.size()));
  }
  EXPECT_EQ(rx2.a_cols.size(), 4u);  // receiver 1's symbols are protected from receiver 2
}

TEST(EffectiveSystem, PdpEavesdropperIsZero) {
  const auto spec = build_scheme(SchemeId::MR_PDP);
  const auto tr = run_with_seed(spec, 9, 1e4);
  const auto sys = assemble_effective_system(tr);
  EXPECT_LE(sys.node(Node::Eve).gain.norm(), 1e-10);
}

TEST(EffectiveSystem, EmptyScheme) {
  SchemeSpec empty;
  empty.topology = Topology::multi_receiver();
  const auto tr = run_scheme(empty, sample_channel(empty.topology, 1, 1), PowerBudget(1.0), RunMode::Noiseless, 1);
  const auto sys = assemble_effective_system(tr);
  EXPECT_TRUE(sys.empty());
  EXPECT_EQ(sys.node(Node::Rx1).gain.rows(), 0);
}

TEST(EffectiveSystem, IncompleteTrace) {
  const auto spec = build_scheme(SchemeId::MR_DDP);
  auto tr = run_with_seed(spec, 1, 10.0);
  tr.executed_slots = 2;
  try {
    assemble_effective_system(tr);
    FAIL();
  } catch (const LabError& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompleteTrace);
  }
}

TEST(EffectiveSystem, NoisyReconstruction) {
  const auto spec = build_scheme(SchemeId::MR_S30_29_A);
  const auto tr = run_with_seed(spec, 2, 1e6, RunMode::Noisy);
  const auto sys = assemble_effective_system(tr);
  EXPECT_LE(sys.reconstruction_residual, 1e-10);
}

TEST(Identifiability, PaperExamples) {
  {
    const auto tr = run_with_seed(build_scheme(SchemeId::MR_DDP), 5, 1e4);
    const auto sys = assemble_effective_system(tr);
    EXPECT_TRUE(identifiability_check(sys, Node::Rx1, {"v1", "v2"}, {}));
    EXPECT_TRUE(identifiability_check(sys, Node::Rx2, {"w1", "w2"}, {}));
    EXPECT_FALSE(identifiability_check(sys, Node::Rx1, {"w1"}, {}));
  }
  {
    const auto tr = run_with_seed(build_scheme(SchemeId::MR_PDD), 5, 1e4);
    const auto sys = assemble_effective_system(tr);
    EXPECT_FALSE(identifiability_check(sys, Node::Eve, {"v"}, {}));
    // Knowing the jamming symbol would unmask it.
    EXPECT_TRUE(identifiability_check(sys, Node::Eve, {"v"}, {"u"}));
    EXPECT_TRUE(identifiability_check(sys, Node::Eve, {}, {}));
    EXPECT_THROW(identifiability_check(sys, Node::Eve, {"zz"}, {}), LabError);
  }
}

TEST(Identifiability, BatchAgreesWithRankDefinition) {
  for (SchemeId id : all_scheme_ids()) {
    const auto spec = build_scheme(id);
    const auto sys = assemble_effective_system(run_with_seed(spec, 21, 1e4));
    for (Node n : spec.topology.nodes()) {
      const auto all = sys.symbols.messages();
      const auto batch = identifiable_symbols(sys, n, all, {});
      for (const auto& s : all) {
        const bool in_batch = std::find(batch.begin(), batch.end(), s) != batch.end();
        EXPECT_EQ(in_batch, identifiability_check(sys, n, {s}, {})) << to_string(id) << " " << s;
      }
    }
  }
}
