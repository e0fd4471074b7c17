#pragma once

#include "paretofair/objective.hpp"
#include "paretofair/pdo.hpp"

#include <span>
#include <vector>

namespace pfair {

/// a dominates b: a_i <= b_i everywhere and a_j < b_j somewhere.
/// Throws DataError if either vector holds a NaN.
bool dominates(std::span<const double> a, std::span<const double> b);
bool dominates(const Vector& a, const Vector& b);

/// Indices (ascending) of the points no other point dominates. Exact
/// duplicates collapse onto their first occurrence.
std::vector<std::size_t> non_dominated_filter(const std::vector<Vector>& points);

struct FrontierPoint {
  Vector objective_values;
  Vector w;
  int run_id = 0;
  int iteration = 0;
  StepMode mode = StepMode::Main;
};

/// Mutually non-dominated, duplicate-free points sorted lexicographically by
/// objective vector.
struct FrontierSet {
  std::vector<FrontierPoint> points;
  std::size_t objective_dim = 0;
};

/// Filters arbitrary tagged points into a FrontierSet.
FrontierSet make_frontier(std::vector<FrontierPoint> candidates);

/// Pools every recorded point of every run (run_id = position in `runs`) and
/// keeps the non-dominated ones.
FrontierSet merge_runs(const std::vector<std::vector<TrajectoryPoint>>& runs);

}  // namespace pfair
