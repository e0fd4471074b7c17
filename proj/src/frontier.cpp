#include "paretofair/frontier.hpp"

#include "paretofair/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pfair {

bool dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("dominance needs vectors of equal length");
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i]) || std::isnan(b[i])) throw DataError("dominance test on a NaN objective value");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

bool dominates(const Vector& a, const Vector& b) {
  return dominates(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                   std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

namespace {

bool lex_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

std::vector<std::size_t> non_dominated_filter(const std::vector<Vector>& points) {
  if (points.empty()) return {};
  const Eigen::Index m = points.front().size();
  for (const auto& p : points) {
    if (p.size() != m) throw UsageError("all points must share the objective dimension");
    if (!p.allFinite()) throw DataError("non-dominated filter needs finite objective values");
  }

  // A dominator always precedes the dominated point in lexicographic order, so
  // each point only needs checking against the front kept so far.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lex_less(points[a], points[b]); });

  std::vector<std::size_t> front;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& p = points[order[k]];
    if (k > 0 && p == points[order[k - 1]]) continue;
    bool dominated = false;
    if (m == 2) {
      // Sorted by (f0, f1): only the last kept point can dominate.
      dominated = !front.empty() && points[front.back()][1] <= p[1];
    } else {
      dominated = std::any_of(front.begin(), front.end(),
                              [&](std::size_t j) { return dominates(points[j], p); });
    }
    if (!dominated) front.push_back(order[k]);
  }
  std::sort(front.begin(), front.end());
  return front;
}

FrontierSet make_frontier(std::vector<FrontierPoint> candidates) {
  FrontierSet out;
  if (candidates.empty()) return out;
  out.objective_dim = static_cast<std::size_t>(candidates.front().objective_values.size());
  std::vector<Vector> values;
  values.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (static_cast<std::size_t>(c.objective_values.size()) != out.objective_dim) {
      throw UsageError("cannot merge points with different objective dimensions");
    }
    values.push_back(c.objective_values);
  }
  for (std::size_t idx : non_dominated_filter(values)) out.points.push_back(std::move(candidates[idx]));
  std::stable_sort(out.points.begin(), out.points.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
    return lex_less(a.objective_values, b.objective_values);
  });
  return out;
}

FrontierSet merge_runs(const std::vector<std::vector<TrajectoryPoint>>& runs) {
  std::vector<FrontierPoint> candidates;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (const auto& p : runs[r]) {
      candidates.push_back(FrontierPoint{p.objective_values, p.w, static_cast<int>(r), p.iteration, p.mode});
    }
  }
  return make_frontier(std::move(candidates));
}

}  // namespace pfair
