#include "sdof/regions.hpp"

#include "sdof/error.hpp"

#include <algorithm>
#include <map>

namespace sdof {

HalfPlane::HalfPlane(Rational a1_, Rational a2_, Rational b_) : a1(std::move(a1_)), a2(std::move(a2_)), b(std::move(b_)) {
  if (a1 == 0 && a2 == 0) throw LabError(ErrorCode::BadArgument, "halfplane with zero normal");
}

std::string to_string(const HalfPlane& h) {
  return to_string(h.a1) + "*d1 + " + to_string(h.a2) + "*d2 <= " + to_string(h.b);
}

std::string to_string(const Point2& p) { return "(" + to_string(p.first) + ", " + to_string(p.second) + ")"; }

namespace {

bool feasible(const std::vector<HalfPlane>& hs, const Point2& p) {
  return std::all_of(hs.begin(), hs.end(), [&](const HalfPlane& h) { return h.satisfied_by(p); });
}

/// A nonzero direction r >= 0 with a.r <= 0 for every halfplane makes the set unbounded.
bool has_recession(const std::vector<HalfPlane>& hs) {
  std::vector<Point2> rays{{1, 0}, {0, 1}};
  for (const auto& h : hs) {
    if (h.a1 * h.a2 < 0) rays.emplace_back(abs(h.a2), abs(h.a1));
  }
  for (const auto& r : rays) {
    const bool recedes = std::all_of(hs.begin(), hs.end(),
                                     [&](const HalfPlane& h) { return h.a1 * r.first + h.a2 * r.second <= 0; });
    if (recedes) return true;
  }
  return false;
}

}  // namespace

std::vector<Point2> vertices(const std::vector<HalfPlane>& hs) {
  if (has_recession(hs)) throw LabError(ErrorCode::Unbounded, "region has no upper bound in some direction");
  std::vector<Point2> out;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    for (std::size_t j = i + 1; j < hs.size(); ++j) {
      const Rational det = hs[i].a1 * hs[j].a2 - hs[i].a2 * hs[j].a1;
      if (det == 0) continue;
      const Point2 p{(hs[i].b * hs[j].a2 - hs[i].a2 * hs[j].b) / det, (hs[i].a1 * hs[j].b - hs[i].b * hs[j].a1) / det};
      if (feasible(hs, p)) out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RegionPolytope::RegionPolytope(std::vector<HalfPlane> halfplanes) : halfplanes_(std::move(halfplanes)) {
  const HalfPlane d1_nonneg(-1, 0, 0);
  const HalfPlane d2_nonneg(0, -1, 0);
  if (std::find(halfplanes_.begin(), halfplanes_.end(), d1_nonneg) == halfplanes_.end())
    halfplanes_.push_back(d1_nonneg);
  if (std::find(halfplanes_.begin(), halfplanes_.end(), d2_nonneg) == halfplanes_.end())
    halfplanes_.push_back(d2_nonneg);
  vertices_ = sdof::vertices(halfplanes_);
}

bool contains(const RegionPolytope& region, const Point2& point) { return feasible(region.halfplanes(), point); }

bool same_region(const RegionPolytope& a, const RegionPolytope& b) { return a.vertices() == b.vertices(); }

Rational wiretap_sdof(const StateSchedule& schedule) { return 1 - schedule.fraction("DD") / 3; }

const std::vector<std::string>& theorem_ids() {
  static const std::vector<std::string> ids{"thm1", "thm2", "thm3", "thm4", "thm5", "thm6", "thm7", "thm8"};
  return ids;
}

namespace {

std::size_t arity_for(const std::string& theorem) {
  if (theorem == "thm1" || theorem == "thm7" || theorem == "thm8") return 2;
  return 3;
}

}  // namespace

StateSchedule default_schedule(const std::string& theorem) {
  if (theorem == "thm1") return make_schedule({{"DD", 1}});
  if (theorem == "thm2") return make_schedule({{"PPD", 1}});
  if (theorem == "thm3") return make_schedule({{"PDP", 1}});
  if (theorem == "thm4") return make_schedule({{"DDP", 1}});
  if (theorem == "thm5" || theorem == "thm6") return make_schedule({{"PDD", rat(1, 2)}, {"DPD", rat(1, 2)}}, true);
  if (theorem == "thm7" || theorem == "thm8") return make_schedule({{"PP", 1}});
  throw LabError(ErrorCode::UnknownTheorem, "no theorem '" + theorem + "'");
}

RegionPolytope region_from_theorem(const std::string& theorem, const StateSchedule& schedule) {
  if (std::find(theorem_ids().begin(), theorem_ids().end(), theorem) == theorem_ids().end())
    throw LabError(ErrorCode::UnknownTheorem, "no theorem '" + theorem + "'");
  if (schedule.arity() != arity_for(theorem))
    throw LabError(ErrorCode::ArityMismatch, theorem + " takes " + std::to_string(arity_for(theorem)) +
                                                 "-node states, got " + std::to_string(schedule.arity()));
  std::vector<HalfPlane> hs;
  std::optional<Rational> ds, ds_low;
  bool degenerate = false;

  if (theorem == "thm1") {
    ds = wiretap_sdof(schedule);
    hs = {{1, 0, *ds}, {0, 1, 0}};
  } else if (theorem == "thm2") {
    hs = {{1, 0, 1}, {0, 1, 1}, {1, 1, 2}};
  } else if (theorem == "thm3") {
    hs = {{1, 0, 1}, {1, 2, 2}};
  } else if (theorem == "thm4") {
    hs = {{1, 2, 2}, {2, 1, 2}};
  } else if (theorem == "thm5") {
    hs = {{16, 4, 17}, {4, 16, 17}};
  } else if (theorem == "thm6") {
    hs = {{15, 14, 15}, {14, 15, 15}};
  } else {
    const Rational pp = schedule.fraction("PP");
    const Rational pd = schedule.fraction("PD");
    ds = wiretap_sdof(schedule);
    hs = {{1, 0, *ds}, {0, 1, *ds}};
    if (theorem == "thm7") {
      const Rational rhs = 2 + 2 * pp + 2 * pd;
      hs.emplace_back(3, 1, rhs);
      hs.emplace_back(1, 3, rhs);
    } else {
      ds_low = *ds - 6 * pd / 11;
      const Rational rhs = 1 + (pp + pd) / 2;
      if (*ds_low > 0) {
        hs.emplace_back(1 / *ds_low, rat(1, 2), rhs);
        hs.emplace_back(rat(1, 2), 1 / *ds_low, rhs);
      } else {
        degenerate = true;
      }
    }
  }
  RegionPolytope r(std::move(hs));
  r.theorem = theorem;
  r.ds = ds;
  r.ds_low = ds_low;
  r.degenerate_ds_low = degenerate;
  return r;
}

Rational max_sum(const RegionPolytope& region) {
  Rational best = 0;
  for (const auto& v : region.vertices()) best = std::max(best, Rational(v.first + v.second));
  return best;
}

Rational symmetric_point(const RegionPolytope& region) {
  std::optional<Rational> t;
  for (const auto& h : region.halfplanes()) {
    const Rational s = h.a1 + h.a2;
    if (s <= 0) continue;
    const Rational cap = h.b / s;
    if (!t || cap < *t) t = cap;
  }
  return t ? std::max(*t, Rational(0)) : Rational(0);
}

Point2 time_share(const std::vector<std::pair<Point2, Rational>>& points) {
  if (points.empty()) throw LabError(ErrorCode::BadWeights, "no points to share time between");
  Rational total = 0;
  Point2 acc{0, 0};
  for (const auto& [p, w] : points) {
    if (w < 0) throw LabError(ErrorCode::BadWeights, "negative weight " + to_string(w));
    total += w;
    acc.first += w * p.first;
    acc.second += w * p.second;
  }
  if (total != 1) throw LabError(ErrorCode::BadWeights, "weights sum to " + to_string(total));
  return acc;
}

BoundGapReport bound_gap(const RegionPolytope& inner, const RegionPolytope& outer) {
  for (const auto& v : inner.vertices())
    if (!contains(outer, v))
      throw LabError(ErrorCode::InnerNotContained, "vertex " + to_string(v) + " lies outside the outer region");
  BoundGapReport r;
  r.inner_max_sum = max_sum(inner);
  r.outer_max_sum = max_sum(outer);
  r.inner_symmetric = symmetric_point(inner);
  r.outer_symmetric = symmetric_point(outer);
  r.symmetric_gap = r.outer_symmetric - r.inner_symmetric;
  return r;
}

}  // namespace sdof
