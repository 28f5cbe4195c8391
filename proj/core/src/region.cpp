#include "pfn/region.hpp"

#include <cmath>
#include <limits>

#include "pfn/error.hpp"
#include "pfn/lp.hpp"

namespace pfn {

std::string_view to_string(RegionVerdict verdict) {
  switch (verdict) {
    case RegionVerdict::interior: return "interior";
    case RegionVerdict::boundary: return "boundary";
    case RegionVerdict::exterior: return "exterior";
    case RegionVerdict::outside_affine_hull: return "outside-affine-hull";
  }
  return "unknown";
}

namespace {

// Columns of the returned matrix are the images of the states (n x S).
Matrix state_images(const RegionQuery& q) {
  if (q.A.rows() < 1 || q.A.cols() < 1) throw DimensionError("A must be non-empty");
  if (!q.transform) {
    if (q.gamma.size() != q.A.cols()) throw DimensionError("gamma must have length d");
    return q.A.transpose();
  }
  const Matrix& B = *q.transform;
  if (B.cols() != q.A.cols()) throw DimensionError("transform must have d columns");
  if (B.rows() > B.cols()) throw DimensionError("transform must have n <= d rows");
  if (q.gamma.size() != B.rows()) throw DimensionError("gamma' must have one entry per row of B");
  return B * q.A.transpose();
}

}  // namespace

MembershipResult check_membership(const RegionQuery& query, double tol_int) {
  const Matrix images = state_images(query);
  const Eigen::Index n = images.rows();
  const Eigen::Index S = images.cols();
  if (!query.gamma.allFinite()) throw DimensionError("gamma must be finite");

  MembershipResult out;

  // A single-point region has empty interior in the sense used here.
  bool single_point = true;
  for (Eigen::Index x = 1; x < S && single_point; ++x)
    single_point = (images.col(x) - images.col(0)).lpNorm<Eigen::Infinity>() <= 1e-12;
  if (single_point) {
    const double dist = (images.col(0) - query.gamma).lpNorm<Eigen::Infinity>();
    out.verdict = dist <= 1e-9 ? RegionVerdict::boundary : RegionVerdict::outside_affine_hull;
    out.margin = dist <= 1e-9 ? 0.0 : -std::numeric_limits<double>::infinity();
    return out;
  }

  // alpha = s + t 1 with s >= 0 and t = t_plus - t_minus free.
  lp::LinearProgram prog;
  prog.A_eq = Matrix::Zero(n + 1, S + 2);
  prog.b_eq = Vector::Zero(n + 1);
  prog.c = Vector::Zero(S + 2);
  const Vector image_sum = images.rowwise().sum();
  prog.A_eq.topLeftCorner(n, S) = images;
  prog.A_eq.block(0, S, n, 1) = image_sum;
  prog.A_eq.block(0, S + 1, n, 1) = -image_sum;
  prog.A_eq.row(n).head(S).setOnes();
  prog.A_eq(n, S) = static_cast<double>(S);
  prog.A_eq(n, S + 1) = -static_cast<double>(S);
  prog.b_eq.head(n) = query.gamma;
  prog.b_eq(n) = 1.0;
  prog.c(S) = 1.0;
  prog.c(S + 1) = -1.0;

  const lp::Solution sol = lp::solve(prog);
  if (sol.status != lp::Status::optimal) {
    // t <= 1/S bounds the objective, so anything else means infeasible.
    out.verdict = RegionVerdict::outside_affine_hull;
    out.margin = -std::numeric_limits<double>::infinity();
    return out;
  }

  const double t = sol.x(S) - sol.x(S + 1);
  Vector alpha = sol.x.head(S).array() + t;
  out.margin = t;
  if (t > tol_int) {
    out.verdict = RegionVerdict::interior;
    out.achievable = true;
    out.witness_alpha = std::move(alpha);
  } else if (t >= -tol_int) {
    out.verdict = RegionVerdict::boundary;
  } else {
    out.verdict = RegionVerdict::exterior;
  }
  return out;
}

MembershipResult check_membership(const ProductFormModel& model, const Vector& gamma,
                                  const std::optional<Matrix>& transform, double tol_int) {
  return check_membership(RegionQuery{model.A(), gamma, transform}, tol_int);
}

Target achievable_target_from_transform(const ProductFormModel& model, const Matrix& B,
                                        const Vector& gamma_prime) {
  const auto result = check_membership(model, gamma_prime, B);
  if (!result.achievable) {
    throw NotAchievableError("transformed target is not in the open achievable region (" +
                             std::string(to_string(result.verdict)) + ", margin " +
                             std::to_string(result.margin) + ")");
  }
  return model.A().transpose() * *result.witness_alpha;
}

std::vector<std::size_t> region_extremes(const Matrix& A) {
  const Eigen::Index S = A.rows();
  const Eigen::Index d = A.cols();

  std::vector<Eigen::Index> distinct;
  for (Eigen::Index x = 0; x < S; ++x) {
    bool duplicate = false;
    for (Eigen::Index y : distinct) {
      if ((A.row(x) - A.row(y)).lpNorm<Eigen::Infinity>() <= 1e-12) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) distinct.push_back(x);
  }

  std::vector<std::size_t> extremes;
  const auto k = static_cast<Eigen::Index>(distinct.size());
  if (k == 1) return {static_cast<std::size_t>(distinct.front())};

  for (Eigen::Index j = 0; j < k; ++j) {
    // Feasibility of sum_{i != j} lambda_i a_i = a_j, sum lambda = 1, lambda >= 0.
    lp::LinearProgram prog;
    prog.A_eq = Matrix::Zero(d + 1, k - 1);
    prog.b_eq = Vector::Zero(d + 1);
    prog.c = Vector::Zero(k - 1);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (i == j) continue;
      prog.A_eq.block(0, col, d, 1) = A.row(distinct[static_cast<std::size_t>(i)]).transpose();
      prog.A_eq(d, col) = 1.0;
      ++col;
    }
    prog.b_eq.head(d) = A.row(distinct[static_cast<std::size_t>(j)]).transpose();
    prog.b_eq(d) = 1.0;
    if (lp::solve(prog).status == lp::Status::infeasible)
      extremes.push_back(static_cast<std::size_t>(distinct[static_cast<std::size_t>(j)]));
  }
  return extremes;
}

}  // namespace pfn
