#include "sdof/error.hpp"
#include "sdof/io.hpp"
#include "sdof/regions.hpp"
#include "sdof/schemes.hpp"

#include <gtest/gtest.h>

#include <random>

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

Point2 pt(long long n1, long long d1, long long n2, long long d2) { return {rat(n1, d1), rat(n2, d2)}; }

bool has_vertex(const RegionPolytope& r, const Point2& p) {
  const auto& v = r.vertices();
  return std::find(v.begin(), v.end(), p) != v.end();
}

RegionPolytope thm(const std::string& id) { return region_from_theorem(id, default_schedule(id)); }

/// Random wiretap-pair schedule with small denominators.
StateSchedule random_pair_schedule(std::mt19937& gen) {
  std::uniform_int_distribution<int> w(0, 6);
  std::array<int, 4> k{};
  int total = 0;
  while (total == 0) {
    total = 0;
    for (auto& x : k) total += (x = w(gen));
  }
  return make_schedule({{"PP", rat(k[0], total)}, {"PD", rat(k[1], total)}, {"DP", rat(k[2], total)},
                        {"DD", rat(k[3], total)}});
}

}  // namespace

TEST(Vertices, UnitSquare) {
  const RegionPolytope r({{1, 0, 1}, {0, 1, 1}});
  const std::vector<Point2> want{pt(0, 1, 0, 1), pt(0, 1, 1, 1), pt(1, 1, 0, 1), pt(1, 1, 1, 1)};
  EXPECT_EQ(r.vertices(), want);
}

TEST(Vertices, Unbounded) {
  EXPECT_EQ(code_of([] { RegionPolytope r({{1, 0, 1}}); }), ErrorCode::Unbounded);
  EXPECT_EQ(code_of([] { RegionPolytope r({{-1, 1, 1}, {0, 1, 5}}); }), ErrorCode::Unbounded);
  EXPECT_EQ(code_of([] { RegionPolytope r({{1, -1, 0}, {-1, 1, 0}}); }), ErrorCode::Unbounded);
  EXPECT_EQ(code_of([] { HalfPlane h(0, 0, 1); }), ErrorCode::BadArgument);
}

TEST(Vertices, MatchBruteForce) {
  std::mt19937 gen(3);
  std::uniform_int_distribution<int> c(-3, 5), b(1, 9);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<HalfPlane> hs{{1, 0, b(gen)}, {0, 1, b(gen)}};
    for (int k = 0; k < 3; ++k) {
      const int a1 = c(gen), a2 = c(gen);
      if (a1 == 0 && a2 == 0) continue;
      hs.emplace_back(a1, a2, b(gen));
    }
    const RegionPolytope r(hs);
    // Each vertex is feasible and on at least two boundary lines.
    for (const auto& v : r.vertices()) {
      EXPECT_TRUE(contains(r, v));
      int tight = 0;
      for (const auto& h : r.halfplanes()) tight += h.tight_at(v) ? 1 : 0;
      EXPECT_GE(tight, 2);
    }
    // Every feasible pairwise intersection is listed.
    const auto& all = r.halfplanes();
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        const Rational det = all[i].a1 * all[j].a2 - all[i].a2 * all[j].a1;
        if (det == 0) continue;
        const Point2 p{(all[i].b * all[j].a2 - all[i].a2 * all[j].b) / det,
                       (all[i].a1 * all[j].b - all[i].b * all[j].a1) / det};
        if (contains(r, p)) {
          EXPECT_TRUE(has_vertex(r, p));
          ++checked;
        }
      }
    EXPECT_TRUE(std::is_sorted(r.vertices().begin(), r.vertices().end()));
  }
  EXPECT_GT(checked, 0);
}

TEST(Catalog, Theorem1Formula) {
  std::mt19937 gen(11);
  for (int i = 0; i < 10; ++i) {
    const auto s = random_pair_schedule(gen);
    const auto r = region_from_theorem("thm1", s);
    ASSERT_TRUE(r.ds);
    EXPECT_EQ(*r.ds, 1 - s.fraction("DD") / 3);
    EXPECT_EQ(r.vertices(), (std::vector<Point2>{{0, 0}, {*r.ds, 0}}));
  }
  EXPECT_EQ(*region_from_theorem("thm1", make_schedule({{"DD", 1}})).ds, rat(2, 3));
  EXPECT_EQ(*region_from_theorem("thm1", make_schedule({{"PD", 1}})).ds, 1);
}

TEST(Catalog, Theorem1MatchesTimeSharing) {
  std::mt19937 gen(5);
  for (int i = 0; i < 10; ++i) {
    const auto s = random_pair_schedule(gen);
    const auto shared = time_share({{{1, 0}, s.fraction("PP")},
                                    {{1, 0}, s.fraction("PD")},
                                    {{1, 0}, s.fraction("DP")},
                                    {{rat(2, 3), 0}, s.fraction("DD")}});
    EXPECT_EQ(shared.first, *region_from_theorem("thm1", s).ds);
  }
}

TEST(Catalog, FixedStateVertices) {
  EXPECT_TRUE(has_vertex(thm("thm2"), pt(1, 1, 1, 1)));
  EXPECT_EQ(thm("thm3").vertices(), (std::vector<Point2>{pt(0, 1, 0, 1), pt(0, 1, 1, 1), pt(1, 1, 0, 1), pt(1, 1, 1, 2)}));
  EXPECT_EQ(thm("thm4").vertices(), (std::vector<Point2>{pt(0, 1, 0, 1), pt(0, 1, 1, 1), pt(2, 3, 2, 3), pt(1, 1, 0, 1)}));
  EXPECT_TRUE(has_vertex(thm("thm5"), pt(17, 20, 17, 20)));
  const auto t6 = thm("thm6");
  EXPECT_TRUE(has_vertex(t6, pt(15, 29, 15, 29)));
  EXPECT_TRUE(has_vertex(t6, pt(1, 1, 0, 1)));
  EXPECT_TRUE(has_vertex(t6, pt(0, 1, 1, 1)));
}

TEST(Catalog, Membership) {
  EXPECT_TRUE(contains(thm("thm5"), pt(15, 29, 15, 29)));
  EXPECT_TRUE(contains(thm("thm2"), pt(1, 1, 1, 1)));
  EXPECT_FALSE(contains(thm("thm3"), pt(1, 1, 1, 1)));
  EXPECT_FALSE(contains(thm("thm5"), pt(1, 1, 1, 1)));
}

TEST(Catalog, Errors) {
  EXPECT_EQ(code_of([] { region_from_theorem("thm9", make_schedule({{"PP", 1}})); }), ErrorCode::UnknownTheorem);
  EXPECT_EQ(code_of([] { default_schedule("thm0"); }), ErrorCode::UnknownTheorem);
  EXPECT_EQ(code_of([] { region_from_theorem("thm2", make_schedule({{"PP", 1}})); }), ErrorCode::ArityMismatch);
  EXPECT_EQ(code_of([] { region_from_theorem("thm7", make_schedule({{"PPD", 1}})); }), ErrorCode::ArityMismatch);
}

TEST(Catalog, Theorem8CoincidesAtExtremes) {
  for (const char* s : {"PP", "DD"}) {
    const auto sched = make_schedule({{s, 1}});
    EXPECT_TRUE(same_region(region_from_theorem("thm7", sched), region_from_theorem("thm8", sched))) << s;
  }
  const auto dd = region_from_theorem("thm7", make_schedule({{"DD", 1}}));
  EXPECT_TRUE(has_vertex(dd, pt(1, 2, 1, 2)));
  EXPECT_EQ(thm("thm7").vertices().back(), pt(1, 1, 1, 1));
}

TEST(Catalog, Theorem8InsideTheorem7) {
  std::mt19937 gen(8);
  for (int i = 0; i < 30; ++i) {
    // Both bounds are stated for lambda_PD == lambda_DP.
    const auto raw = random_pair_schedule(gen);
    const Rational half = (raw.fraction("PD") + raw.fraction("DP")) / 2;
    const auto s = make_schedule({{"PP", raw.fraction("PP")}, {"PD", half}, {"DP", half}, {"DD", raw.fraction("DD")}}, true);
    const auto inner = region_from_theorem("thm8", s);
    const auto outer = region_from_theorem("thm7", s);
    if (inner.degenerate_ds_low) continue;
    EXPECT_NO_THROW(bound_gap(inner, outer));
  }
}

TEST(Catalog, Theorem8DsLowStaysPositive) {
  // ds_low = 1 - DD/3 - 6 PD/11 is at least 5/11 on the simplex, so the
  // degenerate branch never triggers for a valid schedule.
  std::mt19937 gen(21);
  for (int i = 0; i < 50; ++i) {
    const auto s = random_pair_schedule(gen);
    const auto r = region_from_theorem("thm8", s);
    EXPECT_EQ(*r.ds_low, *r.ds - rat(6, 11) * s.fraction("PD"));
    EXPECT_GE(*r.ds_low, rat(5, 11));
    EXPECT_FALSE(r.degenerate_ds_low);
  }
  EXPECT_EQ(*region_from_theorem("thm8", make_schedule({{"PD", 1}})).ds_low, rat(5, 11));
}

TEST(Catalog, ContainmentSixInFive) {
  const auto rep = bound_gap(thm("thm6"), thm("thm5"));
  EXPECT_TRUE(rep.contained);
  EXPECT_EQ(rep.inner_max_sum, rat(30, 29));
  EXPECT_EQ(rep.outer_max_sum, rat(17, 10));
  EXPECT_EQ(rep.inner_symmetric, rat(15, 29));
  EXPECT_EQ(rep.outer_symmetric, rat(17, 20));
  EXPECT_EQ(rep.symmetric_gap, rat(17, 20) - rat(15, 29));

  const auto same = bound_gap(thm("thm4"), thm("thm4"));
  EXPECT_EQ(same.symmetric_gap, 0);
  const RegionPolytope square({{1, 0, 1}, {0, 1, 1}});
  EXPECT_EQ(code_of([&] { bound_gap(square, thm("thm3")); }), ErrorCode::InnerNotContained);
}

TEST(Catalog, SchemePointsInsideTheirTheorem) {
  for (SchemeId id : all_scheme_ids()) {
    const auto spec = build_scheme(id);
    const auto binding = theorem_for(spec);
    if (!binding) continue;
    const auto region = region_from_theorem(binding->theorem, binding->schedule);
    const auto& nom = spec.nominal.nominal_sdof;
    const Point2 p{nom.at(Node::Rx1), nom.count(Node::Rx2) ? nom.at(Node::Rx2) : Rational(0)};
    EXPECT_TRUE(contains(region, p)) << to_string(id) << " " << to_string(p);
  }
}

TEST(TimeShare, Examples) {
  EXPECT_EQ(time_share({{{1, 0}, rat(1, 4)}, {{1, 0}, rat(1, 4)}, {{1, 0}, rat(1, 4)}, {{rat(2, 3), 0}, rat(1, 4)}}),
            pt(11, 12, 0, 1));
  // Four-thirds scheme a third of the time, DP state alone for the rest.
  const auto p = time_share({{{rat(2, 3), rat(2, 3)}, rat(1, 3)}, {{1, 0}, rat(2, 3)}});
  EXPECT_EQ(p.first + p.second, rat(10, 9));
  EXPECT_EQ(time_share({{pt(3, 7, 1, 5), 1}}), pt(3, 7, 1, 5));
  EXPECT_EQ(code_of([] { time_share({{{1, 0}, rat(1, 2)}}); }), ErrorCode::BadWeights);
  EXPECT_EQ(code_of([] { time_share({{{1, 0}, rat(3, 2)}, {{0, 1}, rat(-1, 2)}}); }), ErrorCode::BadWeights);
  EXPECT_EQ(code_of([] { time_share({}); }), ErrorCode::BadWeights);
}

TEST(RegionJson, Layout) {
  const auto j = to_json(thm("thm3"));
  ASSERT_TRUE(j.contains("inequalities"));
  ASSERT_TRUE(j.contains("vertices"));
  EXPECT_EQ(j["inequalities"][1], (Json{1, 1, 2, 1, 2, 1}));
  EXPECT_EQ(j["vertices"].back(), (Json{1, 1, 1, 2}));
  EXPECT_EQ(j.dump(), to_json(thm("thm3")).dump());
}
