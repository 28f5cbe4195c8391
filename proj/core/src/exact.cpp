#include "pfn/exact.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pfn/error.hpp"

namespace pfn {

double log_sum_exp(const Vector& values) {
  if (values.size() == 0) throw DimensionError("log_sum_exp of an empty vector");
  const double max_value = values.maxCoeff();
  if (!std::isfinite(max_value)) return max_value;
  return max_value + std::log((values.array() - max_value).exp().sum());
}

StationaryDistribution stationary(const ProductFormModel& model, const ParameterVector& r) {
  model.check_parameters(r);
  const Vector w = model.A() * r + model.b();
  const double shift = w.maxCoeff();
  Vector e = (w.array() - shift).exp();
  const double z = e.sum();
  StationaryDistribution out;
  out.pi = e / z;
  out.log_z = shift + std::log(z);
  return out;
}

Vector stationary_from_generator(const GeneratorMatrix& Q) {
  const auto S = Q.rows();
  if (S < 1 || Q.cols() != S) throw DimensionError("generator must be square");
  // Q^T pi = 0 has rank S-1 for an irreducible chain; replace the last
  // balance equation by the normalization.
  Matrix M = Q.transpose();
  M.row(S - 1).setOnes();
  Vector rhs = Vector::Zero(S);
  rhs(S - 1) = 1.0;
  Vector pi = M.fullPivLu().solve(rhs);
  return pi / pi.sum();
}

Vector aggregates(const ProductFormModel& model, const ParameterVector& r) {
  return model.A().transpose() * stationary(model, r).pi;
}

void check_open_simplex(const Vector& v, std::size_t expected_size, const char* what,
                        double tol) {
  if (static_cast<std::size_t>(v.size()) != expected_size) {
    throw DimensionError(std::string(what) + " must have length " +
                         std::to_string(expected_size));
  }
  if (!v.allFinite() || (v.array() <= 0.0).any() || (v.array() >= 1.0).any())
    throw DimensionError(std::string(what) + " must have every entry in (0, 1)");
  if (std::abs(v.sum() - 1.0) > tol) throw DimensionError(std::string(what) + " must sum to 1");
}

double log_likelihood(const ProductFormModel& model, const Vector& alpha,
                      const ParameterVector& r) {
  check_open_simplex(alpha, model.num_states(), "alpha");
  const auto st = stationary(model, r);
  return st.log_z - alpha.dot(model.A() * r + model.b());
}

Vector gradient(const ProductFormModel& model, const Target& gamma, const ParameterVector& r) {
  if (static_cast<std::size_t>(gamma.size()) != model.num_parameters())
    throw DimensionError("target must have length d");
  return aggregates(model, r) - gamma;
}

namespace {

// u(r) up to the r-independent constant alpha . b, since alpha^T A r = gamma^T r.
struct DualObjective {
  const ProductFormModel& model;
  const Target& gamma;

  double value(const ParameterVector& r, Vector* grad) const {
    const auto st = stationary(model, r);
    if (grad) *grad = model.A().transpose() * st.pi - gamma;
    return st.log_z - gamma.dot(r);
  }
};

}  // namespace

DualSolveResult solve_dual(const ProductFormModel& model, const Target& gamma,
                           const DualSolveOptions& opts) {
  const auto d = static_cast<Eigen::Index>(model.num_parameters());
  if (gamma.size() != d) throw DimensionError("target must have length d");
  if (!gamma.allFinite()) throw DimensionError("target must be finite");

  ParameterVector r = opts.init_r.value_or(ParameterVector::Zero(d));
  model.check_parameters(r);

  const DualObjective objective{model, gamma};
  Vector g(d);
  double phi = objective.value(r, &g);
  Vector g_trial(d);

  for (std::size_t iter = 0;; ++iter) {
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= opts.tol) return {r, iter, gnorm};
    if (iter >= opts.max_iters) {
      throw MaxIterationsError("dual solve hit max_iters = " + std::to_string(opts.max_iters) +
                                   " with gradient norm " + std::to_string(gnorm),
                               gnorm);
    }

    const double g2 = g.squaredNorm();
    double step = opts.initial_step;
    ParameterVector trial;
    double phi_trial = 0.0;
    for (;;) {
      trial = r - step * g;
      phi_trial = objective.value(trial, &g_trial);
      if (phi_trial <= phi - opts.armijo_c * step * g2) break;
      // Once the predicted decrease sinks below the rounding noise of phi,
      // the function-value test is meaningless; fall back to requiring a
      // smaller gradient.
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(phi));
      if (opts.armijo_c * step * g2 < noise &&
          g_trial.lpNorm<Eigen::Infinity>() < gnorm)
        break;
      step *= opts.shrink;
      if (step < 1e-30) {
        throw NotAchievableError("line search stalled at gradient norm " + std::to_string(gnorm));
      }
    }
    r = std::move(trial);
    phi = phi_trial;
    g = g_trial;

    if (r.lpNorm<Eigen::Infinity>() > opts.divergence_bound) {
      throw NotAchievableError("parameters exceeded the divergence bound " +
                               std::to_string(opts.divergence_bound) +
                               " (gradient norm " + std::to_string(g.lpNorm<Eigen::Infinity>()) +
                               "); target is likely outside the open achievable region");
    }
  }
}

double primal_objective(const ProductFormModel& model, const Vector& alpha, const Vector& beta) {
  check_open_simplex(beta, model.num_states(), "beta");
  if (static_cast<std::size_t>(alpha.size()) != model.num_states())
    throw DimensionError("alpha must have one entry per state");
  return -(beta.array() * beta.array().log()).sum() + (beta - alpha).dot(model.b());
}

}  // namespace pfn
