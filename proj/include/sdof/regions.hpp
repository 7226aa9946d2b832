#pragma once

#include "sdof/model.hpp"
#include "sdof/rational.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sdof {

using Point2 = std::pair<Rational, Rational>;

/// a1*d1 + a2*d2 <= b.
struct HalfPlane {
  Rational a1, a2, b;

  HalfPlane(Rational a1_, Rational a2_, Rational b_);  // throws BadArgument on (0,0)
  bool satisfied_by(const Point2& p) const { return a1 * p.first + a2 * p.second <= b; }
  bool tight_at(const Point2& p) const { return a1 * p.first + a2 * p.second == b; }
  bool operator==(const HalfPlane&) const = default;
};

std::string to_string(const HalfPlane& h);
std::string to_string(const Point2& p);

class RegionPolytope {
 public:
  /// Adds d1 >= 0 and d2 >= 0, then enumerates vertices (throws Unbounded).
  explicit RegionPolytope(std::vector<HalfPlane> halfplanes);

  const std::vector<HalfPlane>& halfplanes() const { return halfplanes_; }
  const std::vector<Point2>& vertices() const { return vertices_; }

  std::string theorem;
  std::optional<Rational> ds;
  std::optional<Rational> ds_low;
  /// thm8 with ds_low <= 0: the two ds_low constraints were dropped.
  bool degenerate_ds_low = false;

 private:
  std::vector<HalfPlane> halfplanes_;
  std::vector<Point2> vertices_;
};

/// Pairwise boundary intersections that satisfy every halfplane, deduplicated
/// and sorted lexicographically. Throws Unbounded if the feasible set has a
/// recession direction.
std::vector<Point2> vertices(const std::vector<HalfPlane>& halfplanes);
inline const std::vector<Point2>& vertices(const RegionPolytope& r) { return r.vertices(); }

bool contains(const RegionPolytope& region, const Point2& point);

/// Vertex sets equal (both regions are convex hulls of their vertices).
bool same_region(const RegionPolytope& a, const RegionPolytope& b);

/// 1 - lambda_DD / 3 for a two-node schedule.
Rational wiretap_sdof(const StateSchedule& schedule);

/// Catalog: "thm1" .. "thm8". thm1 takes a wiretap pair schedule and gives
/// the segment [0, d_s] on the d1 axis. thm2..thm6 take three-node schedules,
/// thm7 and thm8 two-node schedules. Throws UnknownTheorem, ArityMismatch.
RegionPolytope region_from_theorem(const std::string& theorem, const StateSchedule& schedule);

const std::vector<std::string>& theorem_ids();

/// Schedule a theorem is naturally stated for: the fixed state for thm2..thm4,
/// the symmetric PDD/DPD split for thm5 and thm6, all-DD for thm1, all-PP for
/// thm7 and thm8.
StateSchedule default_schedule(const std::string& theorem);

/// Largest d1 + d2 over the region.
Rational max_sum(const RegionPolytope& region);
/// Largest t with (t, t) in the region.
Rational symmetric_point(const RegionPolytope& region);

/// Exact convex combination. Throws BadWeights unless weights are
/// nonnegative and sum to one.
Point2 time_share(const std::vector<std::pair<Point2, Rational>>& points);

struct BoundGapReport {
  bool contained = true;
  Rational inner_max_sum, outer_max_sum;
  Rational inner_symmetric, outer_symmetric;
  Rational symmetric_gap;  // outer_symmetric - inner_symmetric
};

/// Throws InnerNotContained if some inner vertex lies outside outer.
BoundGapReport bound_gap(const RegionPolytope& inner, const RegionPolytope& outer);

}  // namespace sdof
