#include "pfn/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pfn/error.hpp"

namespace pfn::lp {

namespace {

using Index = Eigen::Index;

// Tableau layout: rows 0..m-1 are constraints, last column is the rhs.
// The objective is kept separately as a reduced-cost row (maximization:
// column j may enter while reduced(j) > tol).
class Tableau {
public:
  Tableau(const Matrix& A, const Vector& b)
      : m_(A.rows()), n_(A.cols()), T_(m_, n_ + m_ + 1), basis_(static_cast<std::size_t>(m_)) {
    T_.setZero();
    for (Index i = 0; i < m_; ++i) {
      const double sign = b(i) < 0.0 ? -1.0 : 1.0;
      T_.row(i).head(n_) = sign * A.row(i);
      T_(i, n_ + i) = 1.0;
      T_(i, n_ + m_) = sign * b(i);
      basis_[static_cast<std::size_t>(i)] = n_ + i;
    }
  }

  Index rows() const { return m_; }
  Index structural() const { return n_; }
  Index columns() const { return n_ + m_; }
  bool artificial(Index j) const { return j >= n_; }
  const std::vector<Index>& basis() const { return basis_; }
  double rhs(Index i) const { return T_(i, n_ + m_); }
  double at(Index i, Index j) const { return T_(i, j); }

  void pivot(Index row, Index col) {
    T_.row(row) /= T_(row, col);
    for (Index i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = T_(i, col);
      if (f != 0.0) T_.row(i) -= f * T_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  // Runs primal simplex for "maximize cost . x" over columns allowed by
  // `enterable`. Returns false if unbounded.
  template <class Enterable>
  bool optimize(const Vector& cost, Enterable enterable, const Options& opt, std::size_t& pivots) {
    const Index total = columns();
    Vector reduced(total);
    for (;;) {
      // reduced_j = c_j - c_B . T(:, j)
      Vector cb(m_);
      for (Index i = 0; i < m_; ++i) cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
      reduced = cost.head(total) - (cb.transpose() * T_.leftCols(total)).transpose();

      Index entering = -1;
      for (Index j = 0; j < total; ++j) {
        if (enterable(j) && reduced(j) > opt.pivot_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;

      Index leaving = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m_; ++i) {
        const double a = T_(i, entering);
        if (a <= opt.pivot_tol) continue;
        const double ratio = rhs(i) / a;
        if (ratio < best_ratio - 1e-14 ||
            (std::abs(ratio - best_ratio) <= 1e-14 && leaving >= 0 &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)])) {
          best_ratio = ratio;
          leaving = i;
        }
      }
      if (leaving < 0) return false;
      pivot(leaving, entering);
      if (++pivots > opt.max_pivots) throw Error("simplex pivot limit exceeded");
    }
  }

private:
  Index m_;
  Index n_;
  Matrix T_;
  std::vector<Index> basis_;
};

}  // namespace

Solution solve(const LinearProgram& program, const Options& options) {
  const Matrix& A = program.A_eq;
  const Vector& b = program.b_eq;
  const Index m = A.rows();
  const Index n = A.cols();
  if (b.size() != m || program.c.size() != n)
    throw DimensionError("linear program dimensions are inconsistent");

  Solution out;
  if (m == 0) {
    // No constraints: optimum is x = 0 unless some c_j > 0.
    out.x = Vector::Zero(n);
    out.status = (program.c.array() > 0.0).any() ? Status::unbounded : Status::optimal;
    return out;
  }

  Tableau tab(A, b);
  const Index total = tab.columns();

  // Phase one: maximize -sum(artificials).
  Vector phase1 = Vector::Zero(total);
  phase1.tail(m).setConstant(-1.0);
  tab.optimize(phase1, [](Index) { return true; }, options, out.pivots);

  double infeasibility = 0.0;
  for (Index i = 0; i < m; ++i)
    if (tab.artificial(tab.basis()[static_cast<std::size_t>(i)])) infeasibility += tab.rhs(i);
  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  if (infeasibility > options.feasibility_tol * scale) {
    out.status = Status::infeasible;
    return out;
  }

  // Drive zero-valued artificials out of the basis where a structural
  // column can replace them; rows where none can are redundant.
  for (Index i = 0; i < m; ++i) {
    if (!tab.artificial(tab.basis()[static_cast<std::size_t>(i)])) continue;
    Index col = -1;
    double best = 1e-9;
    for (Index j = 0; j < n; ++j) {
      if (std::abs(tab.at(i, j)) > best) {
        best = std::abs(tab.at(i, j));
        col = j;
      }
    }
    if (col >= 0) tab.pivot(i, col);
  }

  // Phase two on structural columns only.
  Vector phase2 = Vector::Zero(total);
  phase2.head(n) = program.c;
  const bool bounded = tab.optimize(
      phase2, [n](Index j) { return j < n; }, options, out.pivots);
  if (!bounded) {
    out.status = Status::unbounded;
    return out;
  }

  // Recompute the basic solution from the original columns.
  std::vector<Index> basic;
  for (Index i = 0; i < m; ++i) {
    const Index j = tab.basis()[static_cast<std::size_t>(i)];
    if (j < n) basic.push_back(j);
  }
  out.x = Vector::Zero(n);
  if (!basic.empty()) {
    Matrix B(m, static_cast<Index>(basic.size()));
    for (std::size_t k = 0; k < basic.size(); ++k) B.col(static_cast<Index>(k)) = A.col(basic[k]);
    const Vector xb = B.colPivHouseholderQr().solve(b);
    for (std::size_t k = 0; k < basic.size(); ++k) out.x(basic[k]) = xb(static_cast<Index>(k));
  }
  out.status = Status::optimal;
  out.objective = program.c.dot(out.x);
  out.residual = (A * out.x - b).lpNorm<Eigen::Infinity>();
  return out;
}

}  // namespace pfn::lp
