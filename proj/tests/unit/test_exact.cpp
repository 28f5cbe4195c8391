#include <gtest/gtest.h>

#include <cmath>

#include "pfn/error.hpp"
#include "pfn/exact.hpp"
#include "pfn/networks.hpp"
#include "pfn/region.hpp"
#include "support/oracles.hpp"

using namespace pfn;
namespace pt = pfn::testing;

namespace {

Vector v1(double a) { return (Vector(1) << a).finished(); }
Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

std::vector<ProductFormModel> example_models() {
  Matrix P(3, 3);
  P << 0, 0.5, 0.5, 0.5, 0, 0.5, 0.5, 0.5, 0;
  return {build_two_state(), build_birth_death({3, {1.0, 2.0, 0.5}}), build_jackson({3, 3, P}),
          build_csma({{2, 5, 3}, CsmaScheme::per_class}),
          build_csma({{2, 5, 3}, CsmaScheme::single_param})};
}

}  // namespace

TEST(LogSumExp, ShiftedAndStable) {
  EXPECT_NEAR(log_sum_exp(v2(1000.0, 1000.0)), 1000.0 + std::log(2.0), 1e-12);
  EXPECT_NEAR(log_sum_exp(v2(-1000.0, 0.0)), 0.0, 1e-15);
  EXPECT_THROW(log_sum_exp(Vector()), DimensionError);
}

TEST(Stationary, TwoStateExamples) {
  const auto m = build_two_state();
  EXPECT_LT((stationary(m, v1(0.0)).pi - v2(0.5, 0.5)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((stationary(m, v1(std::log(2.0))).pi - v2(1.0 / 3, 2.0 / 3)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(stationary(m, v1(0.0)).log_z, std::log(2.0), 1e-15);
}

TEST(Stationary, BirthDeathUniform) {
  const auto m = build_birth_death({2, {1.0, 1.0}});
  EXPECT_LT((stationary(m, Vector::Zero(2)).pi - Vector::Constant(3, 1.0 / 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Stationary, NoOverflowAtLargeParameters) {
  const auto m = build_csma({{2, 5, 3}, CsmaScheme::per_class});
  const Vector r = Vector::Constant(3, 400.0);
  const auto s = stationary(m, r);
  EXPECT_TRUE(s.pi.allFinite());
  EXPECT_TRUE(std::isfinite(s.log_z));
  EXPECT_NEAR(s.pi.sum(), 1.0, 1e-12);
}

TEST(Stationary, NormalizationAcrossModels) {
  std::mt19937_64 rng(17);
  for (const auto& m : example_models()) {
    for (int k = 0; k < 200; ++k) {
      const Vector r = pt::uniform_vector(rng, static_cast<Eigen::Index>(m.num_parameters()), -5, 5);
      EXPECT_NEAR(stationary(m, r).pi.sum(), 1.0, 1e-12);
    }
  }
}

TEST(Stationary, MatchesNaiveFormula) {
  std::mt19937_64 rng(23);
  for (const auto& m : example_models()) {
    const Vector r = pt::uniform_vector(rng, static_cast<Eigen::Index>(m.num_parameters()), -2, 2);
    EXPECT_LE((stationary(m, r).pi - pt::naive_pi(m.A(), m.b(), r)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Aggregates, BirthDeathTails) {
  const auto m = build_birth_death({2, {1.0, 1.0}});
  EXPECT_LT((aggregates(m, Vector::Zero(2)) - v2(2.0 / 3, 1.0 / 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Aggregates, JacksonSymmetricMeans) {
  Matrix P(2, 2);
  P << 0, 1, 1, 0;
  const auto m = build_jackson({2, 2, P});
  EXPECT_LT((aggregates(m, v2(0.7, 0.7)) - v2(-1.0, -1.0)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Aggregates, CsmaMeanActiveNodesByEnumeration) {
  const std::vector<std::size_t> n{2, 5, 3};
  const auto m = build_csma({n, CsmaScheme::single_param});
  const double r = 0.3, nu = std::exp(r);
  // Z = 1 + sum_k sum_l C(n_k, l) nu^l, mean = sum_k sum_l l C(n_k, l) nu^l / Z.
  double z = 1.0, mean = 0.0;
  for (std::size_t nk : n) {
    double c = 1.0;
    for (std::size_t l = 1; l <= nk; ++l) {
      c = c * static_cast<double>(nk - l + 1) / static_cast<double>(l);
      z += c * std::pow(nu, l);
      mean += static_cast<double>(l) * c * std::pow(nu, l);
    }
  }
  EXPECT_NEAR(aggregates(m, v1(r))[0], mean / z, 1e-13);
}

TEST(LogLikelihood, Examples) {
  const auto m = build_two_state();
  EXPECT_NEAR(log_likelihood(m, v2(0.5, 0.5), v1(0.0)), std::log(2.0), 1e-15);
  const Vector r = v1(0.8);
  const Vector pi = stationary(m, r).pi;
  const double entropy = -(pi.array() * pi.array().log()).sum();
  EXPECT_NEAR(log_likelihood(m, pi, r), entropy, 1e-14);
  EXPECT_THROW(log_likelihood(m, v2(1.0, 0.0), r), DimensionError);
  EXPECT_THROW(log_likelihood(m, v2(0.6, 0.6), r), DimensionError);
}

TEST(LogLikelihood, NonnegativeAndConvex) {
  std::mt19937_64 rng(29);
  for (const auto& m : example_models()) {
    const auto S = static_cast<Eigen::Index>(m.num_states());
    const auto d = static_cast<Eigen::Index>(m.num_parameters());
    const Vector alpha = pt::random_interior_weights(rng, S, 0.01);
    const Vector r_star = solve_dual(m, m.A().transpose() * alpha).r_star;
    const double u_min = log_likelihood(m, alpha, r_star);
    EXPECT_GE(u_min, 0.0);
    std::uniform_real_distribution<double> t01(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
      const Vector r1 = pt::uniform_vector(rng, d, -3, 3), r2 = pt::uniform_vector(rng, d, -3, 3);
      const double t = t01(rng);
      EXPECT_GE(log_likelihood(m, alpha, r1) - u_min, -1e-12);
      EXPECT_LE(log_likelihood(m, alpha, t * r1 + (1 - t) * r2),
                t * log_likelihood(m, alpha, r1) + (1 - t) * log_likelihood(m, alpha, r2) + 1e-10);
    }
  }
}

TEST(Gradient, Examples) {
  const auto m = build_two_state();
  EXPECT_NEAR(gradient(m, v1(0.9), v1(0.0))[0], -0.4, 1e-15);
  const Vector r = v1(1.3);
  EXPECT_LT(gradient(m, aggregates(m, r), r).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(gradient(m, v2(0.1, 0.2), r), DimensionError);
}

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(31);
  for (const auto& m : example_models()) {
    const auto S = static_cast<Eigen::Index>(m.num_states());
    const auto d = static_cast<Eigen::Index>(m.num_parameters());
    for (int k = 0; k < 10; ++k) {
      const Vector alpha = pt::random_interior_weights(rng, S, 0.001);
      const Vector gamma = m.A().transpose() * alpha;
      const Vector r = pt::uniform_vector(rng, d, -2, 2);
      const Vector g = gradient(m, gamma, r);
      const Vector fd = pt::central_difference(
          [&](const Vector& x) { return log_likelihood(m, alpha, x); }, r);
      EXPECT_LE((g - fd).cwiseAbs().maxCoeff(), 1e-6 * std::max(1e-3, g.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(SolveDual, StartAtOptimum) {
  const auto m = build_birth_death({2, {1.0, 1.0}});
  const auto res = solve_dual(m, aggregates(m, Vector::Zero(2)));
  EXPECT_EQ(res.iterations, 0u);
  EXPECT_LT(res.r_star.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveDual, BirthDeathTailTarget) {
  const auto m = build_birth_death({2, {1.0, 1.0}});
  const Vector gamma = v2(0.6, 0.3);
  const auto res = solve_dual(m, gamma);
  EXPECT_LE((aggregates(m, res.r_star) - gamma).cwiseAbs().maxCoeff(), 1e-8);
  // pi = (0.4, 0.3, 0.3): e^{r_1} = 0.75, e^{r_2} = 1.
  EXPECT_NEAR(res.r_star[0], std::log(0.75), 1e-8);
  EXPECT_NEAR(res.r_star[1], 0.0, 1e-8);
}

TEST(SolveDual, JacksonMeanQueueLengths) {
  Matrix P(2, 2);
  P << 0, 1, 1, 0;
  const auto m = build_jackson({2, 3, P});
  const Vector gamma = v2(-1.2, -1.8);
  const auto res = solve_dual(m, gamma);
  EXPECT_TRUE(res.r_star.allFinite());
  EXPECT_LE((aggregates(m, res.r_star) - gamma).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SolveDual, TwoStateClosedForm) {
  const auto m = build_two_state();
  const auto res = solve_dual(m, v1(0.75));
  EXPECT_NEAR(res.r_star[0], std::log(3.0), 1e-9);
}

TEST(SolveDual, WarmStartNeedsFewerIterations) {
  Matrix P(2, 2);
  P << 0, 1, 1, 0;
  const auto m = build_jackson({2, 3, P});
  const Vector gamma = v2(-1.2, -1.8);
  const auto cold = solve_dual(m, gamma);
  DualSolveOptions warm;
  warm.init_r = cold.r_star + v2(1e-3, -1e-3);
  EXPECT_LT(solve_dual(m, gamma, warm).iterations, cold.iterations);
}

TEST(SolveDual, DivergesOutsideRegion) {
  const auto m = build_two_state();
  EXPECT_THROW(solve_dual(m, v1(1.5)), NotAchievableError);
  // On the boundary the gradient decays like e^{-r}, so r grows only
  // logarithmically and the budget runs out before the divergence bound.
  DualSolveOptions opts;
  opts.max_iters = 10000;
  EXPECT_THROW(solve_dual(m, v1(1.0), opts), MaxIterationsError);
}

TEST(SolveDual, IterationBudget) {
  const auto m = build_csma({{2, 5, 3}, CsmaScheme::per_class});
  DualSolveOptions opts;
  opts.max_iters = 2;
  opts.tol = 1e-14;
  EXPECT_THROW(solve_dual(m, (Vector(3) << 0.3, 1.0, 0.4).finished(), opts), MaxIterationsError);
}

TEST(PrimalObjective, Examples) {
  const auto m = build_birth_death({2, {1.0, 1.0}});
  const Vector uniform = Vector::Constant(3, 1.0 / 3);
  EXPECT_NEAR(primal_objective(m, uniform, uniform), std::log(3.0), 1e-15);
  const auto m2 = build_birth_death({2, {2.0, 4.0}});
  const Vector alpha = (Vector(3) << 0.2, 0.5, 0.3).finished();
  EXPECT_NEAR(primal_objective(m2, alpha, alpha), -(alpha.array() * alpha.array().log()).sum(), 1e-15);
  EXPECT_THROW(primal_objective(m, uniform, (Vector(3) << 0.5, 0.5, 0.0).finished()), DimensionError);
}

TEST(PrimalObjective, ZeroDualityGap) {
  std::mt19937_64 rng(37);
  for (const auto& m : example_models()) {
    const Vector alpha = pt::random_interior_weights(rng, static_cast<Eigen::Index>(m.num_states()), 0.02);
    const Vector r_star = solve_dual(m, m.A().transpose() * alpha).r_star;
    const Vector beta = stationary(m, r_star).pi;
    EXPECT_LE(std::abs(primal_objective(m, alpha, beta) - log_likelihood(m, alpha, r_star)), 1e-6);
  }
}
