#pragma once

#include <cstddef>
#include <optional>

#include "pfn/model.hpp"
#include "pfn/types.hpp"

namespace pfn {

/// log(sum_i exp(values_i)), shifted by the maximum so it never overflows.
double log_sum_exp(const Vector& values);

struct StationaryDistribution {
  Vector pi;
  double log_z = 0.0;
};

/// pi(r) = exp(A r + b - log Z(r)).
StationaryDistribution stationary(const ProductFormModel& model, const ParameterVector& r);

/// Stationary law from the generator alone: solves pi^T Q = 0, sum pi = 1.
/// Independent of (A, b); used to cross-check the product form.
Vector stationary_from_generator(const GeneratorMatrix& Q);

/// A^T pi(r).
Vector aggregates(const ProductFormModel& model, const ParameterVector& r);

/// u(r) = log Z(r) - alpha . (A r + b) for alpha in the open simplex.
double log_likelihood(const ProductFormModel& model, const Vector& alpha,
                      const ParameterVector& r);

/// Gradient of u: A^T pi(r) - gamma. Only gamma = A^T alpha enters.
Vector gradient(const ProductFormModel& model, const Target& gamma, const ParameterVector& r);

struct DualSolveOptions {
  /// Stop once max_i |(A^T pi(r) - gamma)_i| <= tol.
  double tol = 1e-10;
  std::size_t max_iters = 1'000'000;
  std::optional<ParameterVector> init_r;
  /// ||r||_inf beyond this is read as "target not achievable".
  double divergence_bound = 50.0;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  double initial_step = 1.0;
};

struct DualSolveResult {
  ParameterVector r_star;
  std::size_t iterations = 0;
  double final_grad_norm = 0.0;
};

/// Minimizes u(r) over R^d by gradient descent with Armijo backtracking.
///
/// u is convex, so descent reaches a minimizer whenever gamma lies in the
/// open achievable region. Throws NotAchievableError when ||r||_inf exceeds
/// the divergence bound and MaxIterationsError when the budget runs out.
DualSolveResult solve_dual(const ProductFormModel& model, const Target& gamma,
                           const DualSolveOptions& opts = {});

/// Entropy-program objective -beta . ln beta + (beta - alpha) . b.
/// beta must lie in the open simplex.
double primal_objective(const ProductFormModel& model, const Vector& alpha, const Vector& beta);

/// Throws DimensionError unless v is a probability vector with entries in
/// (0, 1) summing to one within tol.
void check_open_simplex(const Vector& v, std::size_t expected_size, const char* what,
                        double tol = 1e-9);

}  // namespace pfn
