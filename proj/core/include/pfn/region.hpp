#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "pfn/model.hpp"
#include "pfn/types.hpp"

namespace pfn {

/// Is gamma achievable for the aggregates A^T pi, or for B A^T pi when a
/// transform B (n x d, n <= d) is supplied?
struct RegionQuery {
  Matrix A;
  Vector gamma;
  std::optional<Matrix> transform;
};

enum class RegionVerdict {
  interior,           ///< margin > tol: achievable.
  boundary,           ///< |margin| <= tol, or a single-point region.
  exterior,           ///< inside the affine hull but outside the convex hull.
  outside_affine_hull ///< no alpha at all satisfies the equality constraints.
};

std::string_view to_string(RegionVerdict verdict);

struct MembershipResult {
  bool achievable = false;
  RegionVerdict verdict = RegionVerdict::outside_affine_hull;
  /// Optimal t of: max t s.t. M^T alpha = gamma, 1.alpha = 1, alpha >= t.
  /// -infinity when the equality constraints are infeasible.
  double margin = 0.0;
  /// Strictly positive witness; present only when achievable.
  std::optional<Vector> witness_alpha;
};

/// Interior tolerance: margins in (0, kInteriorTol] are reported as boundary.
inline constexpr double kInteriorTol = 1e-9;

/// Decides membership of gamma in { M^T alpha : alpha in the open simplex }
/// with M = A (or A B^T under a transform) by one LP that maximizes the
/// smallest weight. Throws DimensionError on inconsistent shapes.
MembershipResult check_membership(const RegionQuery& query, double tol_int = kInteriorTol);

/// Convenience overload taking the model's A.
MembershipResult check_membership(const ProductFormModel& model, const Vector& gamma,
                                  const std::optional<Matrix>& transform = std::nullopt,
                                  double tol_int = kInteriorTol);

/// Turns a transformed target gamma' into a plain target gamma = A^T alpha
/// with B gamma = gamma'. solve_dual(gamma) then gives r* with
/// B A^T pi(r*) = gamma'. Throws NotAchievableError if gamma' is not in the
/// open transformed region.
Target achievable_target_from_transform(const ProductFormModel& model, const Matrix& B,
                                        const Vector& gamma_prime);

/// Indices of the rows of A that are vertices of conv{rows of A}. Among
/// identical rows only the first is reported. Each candidate is verified by
/// an LP showing it is not a convex combination of the other distinct rows.
std::vector<std::size_t> region_extremes(const Matrix& A);

}  // namespace pfn
