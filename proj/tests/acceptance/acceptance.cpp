// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pfn/error.hpp"
#include "pfn/exact.hpp"
#include "pfn/networks.hpp"
#include "pfn/online.hpp"
#include "pfn/region.hpp"
#include "pfn/schedule.hpp"
#include "pfn/trace_io.hpp"
#include "support/oracles.hpp"

using namespace pfn;
namespace pt = pfn::testing;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Matrix reversible_routing3() {
  Matrix P(3, 3);
  P << 0, 0.5, 0.5, 0.25, 0, 0.75, 0.25, 0.75, 0;
  return P;
}

Matrix tail_to_mass(Eigen::Index n) {
  Matrix B = Matrix::Identity(n, n);
  for (Eigen::Index r = 0; r + 1 < n; ++r) B(r, r + 1) = -1.0;
  return B;
}

Eigen::Index dim(const ProductFormModel& m) { return static_cast<Eigen::Index>(m.num_parameters()); }
Eigen::Index states(const ProductFormModel& m) { return static_cast<Eigen::Index>(m.num_states()); }

bool witness_ok(const Matrix& M, const Vector& gamma, const MembershipResult& r) {
  if (!r.witness_alpha) return false;
  const Vector& a = *r.witness_alpha;
  return (M.transpose() * a - gamma).cwiseAbs().maxCoeff() <= 1e-9 && std::abs(a.sum() - 1.0) <= 1e-12 &&
         a.minCoeff() > 0.0 && a.minCoeff() >= r.margin - 1e-9;
}

// 1. Product-form consistency of the builders.
Outcome criterion1() {
  const std::vector<std::pair<std::string, ProductFormModel>> models{
      {"birth-death", build_birth_death({3, {1.0, 2.0, 0.5}})},
      {"jackson", build_jackson({3, 3, reversible_routing3()})},
      {"csma", build_csma({{2, 5, 3}, CsmaScheme::per_class})}};
  std::mt19937_64 rng(101);
  Outcome out;
  double worst_res = 0.0, worst_tv = 0.0;
  for (const auto& [name, m] : models) {
    std::vector<ParameterVector> probes;
    for (int k = 0; k < 100; ++k) probes.push_back(pt::uniform_vector(rng, dim(m), -3, 3));
    const auto report = validate(m, probes, 1e-10);
    worst_res = std::max(worst_res, report.max_relative_residual);
    if (!report.passed) out.passed = false;
    for (const auto& r : probes) {
      const double tv = pt::total_variation(stationary(m, r).pi, stationary_from_generator(build_generator(m, r)));
      worst_tv = std::max(worst_tv, tv);
    }
  }
  if (worst_tv > 1e-10) out.passed = false;
  out.detail = "max residual " + num(worst_res) + ", max TV " + num(worst_tv);
  return out;
}

// 2. Analytic gradient against central differences.
Outcome criterion2() {
  const std::vector<ProductFormModel> models{
      build_two_state(), build_birth_death({3, {1.0, 2.0, 0.5}}), build_jackson({3, 3, reversible_routing3()}),
      build_csma({{2, 5, 3}, CsmaScheme::per_class}), build_csma({{2, 5, 3}, CsmaScheme::single_param})};
  std::mt19937_64 rng(202);
  double worst = 0.0;
  int triples = 0;
  while (triples < 50) {
    const auto& m = models[static_cast<std::size_t>(triples) % models.size()];
    const Vector alpha = pt::random_interior_weights(rng, states(m), 0.001);
    const Vector gamma = m.A().transpose() * alpha;
    const Vector r = pt::uniform_vector(rng, dim(m), -2, 2);
    const Vector g = gradient(m, gamma, r);
    // Relative error needs a gradient bounded away from zero.
    if (g.cwiseAbs().maxCoeff() < 1e-3) continue;
    const Vector fd = pt::central_difference([&](const Vector& x) { return log_likelihood(m, alpha, x); }, r, 1e-5);
    worst = std::max(worst, (g - fd).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff());
    ++triples;
  }
  return {worst <= 1e-6, "50 triples, max relative error " + num(worst)};
}

// 3. LP membership against the simplex grid (step 0.01).
Outcome criterion3() {
  Matrix P2(2, 2);
  P2 << 0, 1, 1, 0;
  Matrix P3 = Matrix::Constant(3, 3, 0.5);
  P3.diagonal().setZero();
  const std::vector<ProductFormModel> models{
      build_two_state(),
      build_birth_death({2, {1.0, 2.0}}),
      build_birth_death({3, {1.0, 2.0, 0.5}}),
      build_jackson({2, 3, P2}),
      build_jackson({3, 2, P3}),
      build_csma({{2, 3}, CsmaScheme::per_class}),
      build_csma({{2, 3}, CsmaScheme::single_param})};
  constexpr int kSteps = 100;
  constexpr double kBand = 0.02;
  std::mt19937_64 rng(303);
  int targets = 0, band = 0, disagreements = 0;
  for (const auto& m : models) {
    const Matrix& A = m.A();
    const auto S = states(m);
    const double max_abs = A.cwiseAbs().maxCoeff();
    // Grid images.
    for (int k = 0; k < 8; ++k, ++targets) {
      const auto comp = pt::random_composition(rng, kSteps, static_cast<int>(S));
      Vector alpha(S);
      for (Eigen::Index x = 0; x < S; ++x) alpha[x] = comp[static_cast<std::size_t>(x)] / double(kSteps);
      const Vector gamma = A.transpose() * alpha;
      const auto lp = check_membership(m, gamma);
      bool ok = lp.margin >= alpha.minCoeff() - 1e-9;
      if (alpha.minCoeff() >= kBand) ok = ok && lp.achievable;
      else ++band;
      if (lp.achievable) ok = ok && witness_ok(A, gamma, lp);
      ok = ok && pt::grid_best_margin(A, gamma, kSteps, 1e-9) >= alpha.minCoeff() - 1e-12;
      disagreements += !ok;
    }
    // Off-grid targets from the (enlarged) bounding box of the rows.
    const Vector lo = A.colwise().minCoeff().transpose(), hi = A.colwise().maxCoeff().transpose();
    const Vector pad = 0.1 * (hi - lo) + Vector::Constant(dim(m), 0.05);
    for (int k = 0; k < 7; ++k, ++targets) {
      Vector gamma(dim(m));
      for (Eigen::Index i = 0; i < dim(m); ++i)
        gamma[i] = std::uniform_real_distribution<double>(lo[i] - pad[i], hi[i] + pad[i])(rng);
      const auto lp = check_membership(m, gamma);
      bool ok = true;
      if (lp.achievable) ok = witness_ok(A, gamma, lp);
      if (lp.margin >= kBand + 0.01) {
        const double eta = 0.01 * static_cast<double>(S) * max_abs + 1e-12;
        ok = ok && pt::grid_best_margin(A, gamma, kSteps, eta) >= lp.margin - 0.01 - 1e-12;
      } else if (!lp.achievable) {
        ok = ok && pt::grid_best_margin(A, gamma, kSteps, 1e-9) < kBand;
      } else {
        ++band;
      }
      disagreements += !ok;
    }
  }
  return {disagreements == 0 && targets >= 100,
          std::to_string(targets) + " targets on " + std::to_string(models.size()) + " models, " +
              std::to_string(disagreements) + " disagreements, " + std::to_string(band) + " in the band"};
}

// 4. Round trip region -> solve_dual on interior targets, rejection outside.
Outcome criterion4() {
  const std::vector<std::pair<std::string, ProductFormModel>> models{
      {"birth-death", build_birth_death({3, {1.0, 2.0, 0.5}})},
      {"jackson", build_jackson({3, 3, reversible_routing3()})},
      {"csma(i)", build_csma({{2, 5, 3}, CsmaScheme::single_param})},
      {"csma(ii)", build_csma({{2, 5, 3}, CsmaScheme::per_class})}};
  std::mt19937_64 rng(404);
  Outcome out;
  double worst = 0.0;
  int failures = 0, rejected = 0, outside = 0;
  for (const auto& [name, m] : models) {
    const Matrix& A = m.A();
    for (int k = 0; k < 20; ++k) {
      const Vector alpha = pt::random_interior_weights(rng, states(m), 0.05);
      const Vector gamma = A.transpose() * alpha;
      const auto lp = check_membership(m, gamma);
      if (!lp.achievable || lp.margin < 0.05 - 1e-9) {
        ++failures;
        continue;
      }
      try {
        const auto res = solve_dual(m, gamma);
        const double err = (aggregates(m, res.r_star) - gamma).cwiseAbs().maxCoeff();
        worst = std::max(worst, err);
        if (err > 1e-8 || !res.r_star.allFinite()) ++failures;
      } catch (const pfn::Error&) {
        ++failures;
      }
    }
    const auto ext = region_extremes(A);
    const Vector centroid = A.transpose() * Vector::Constant(states(m), 1.0 / static_cast<double>(states(m)));
    for (int k = 0; k < 10; ++k) {
      const Vector v = A.row(static_cast<Eigen::Index>(ext[static_cast<std::size_t>(k) % ext.size()])).transpose();
      const Vector gamma = k < 5 ? v : Vector(v + 0.1 * (v - centroid));
      ++outside;
      if (!check_membership(m, gamma).achievable) ++rejected;
    }
  }
  out.passed = failures == 0 && rejected == outside;
  out.detail = "80 interior targets, " + std::to_string(failures) + " failures, max error " + num(worst) + "; " +
               std::to_string(rejected) + "/" + std::to_string(outside) + " boundary/exterior rejected";
  return out;
}

// 5. Point-mass control of the birth-death chain through the tail transform.
Outcome criterion5() {
  const auto m = build_birth_death({3, {1.0, 2.0, 0.5}});
  const Matrix B = tail_to_mass(3);
  std::mt19937_64 rng(505);
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < 20; ++k) {
    const Vector alpha = pt::random_interior_weights(rng, 4, 0.05);
    const Vector gp = alpha.tail(3);
    try {
      const auto lp = check_membership(m, gp, B);
      if (!lp.achievable || lp.margin < 0.05 - 1e-9) {
        ++failures;
        continue;
      }
      const Vector r = solve_dual(m, achievable_target_from_transform(m, B, gp)).r_star;
      const Vector pi = stationary(m, r).pi;
      const double err = std::max((pi.tail(3) - gp).cwiseAbs().maxCoeff(), (B * aggregates(m, r) - gp).cwiseAbs().maxCoeff());
      worst = std::max(worst, err);
      if (err > 1e-8) ++failures;
    } catch (const pfn::Error&) {
      ++failures;
    }
  }
  int boundary_rejected = 0;
  const std::vector<Vector> boundary{(Vector(3) << 0.2, 0.3, 0.5).finished(),
                                     (Vector(3) << 0.6, 0.3, 0.1).finished(),
                                     (Vector(3) << 1.0 / 3, 1.0 / 3, 1.0 / 3).finished()};
  for (const auto& gp : boundary) boundary_rejected += !check_membership(m, gp, B).achievable;
  return {failures == 0 && boundary_rejected == 3,
          "20 point-mass targets, max error " + num(worst) + ", " + std::to_string(failures) + " failures; sum = 1 rejected " +
              std::to_string(boundary_rejected) + "/3"};
}

// 6. Online convergence over 20 seeds.
Outcome criterion6() {
  struct Case {
    std::string name;
    ProductFormModel model;
    Vector target;
  };
  const std::vector<Case> cases{{"two-state", build_two_state(), (Vector(1) << 0.75).finished()},
                                {"birth-death", build_birth_death({2, {1.0, 1.0}}), (Vector(2) << 0.6, 0.3).finished()}};
  Outcome out;
  std::ostringstream detail;
  bool growth_all = true;
  for (const auto& c : cases) {
    RunConfig cfg;
    cfg.target = c.target;
    cfg.schedule = make_schedule(ScheduleKind::variant_a, 0.1, 1.2, c.model);
    cfg.num_iterations = 200;
    int within = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      cfg.seed = seed;
      const auto trace = run_online(c.model, cfg);
      if (!trace.aborted && final_aggregate_error(trace, c.target) <= 0.1) ++within;
      growth_all = growth_all && parameter_growth_bound(trace, c.model, cfg.schedule).passed;
    }
    if (within < 18) out.passed = false;
    detail << c.name << " " << within << "/20 within 0.1; ";
  }
  out.passed = out.passed && growth_all;
  detail << "growth bound " << (growth_all ? "holds on all traces" : "VIOLATED");
  out.detail = detail.str();
  return out;
}

// 7. Schedule gate and condition checks.
Outcome criterion7() {
  const auto two = build_two_state();
  const auto jackson = build_jackson({3, 3, reversible_routing3()});
  auto rejects = [](const std::function<void()>& f) {
    try {
      f();
    } catch (const ScheduleError&) {
      return true;
    }
    return false;
  };
  bool gate = true;
  for (const auto* m : {&two, &jackson}) {
    const double c4 = constants(*m).c_4;
    gate = gate && rejects([&] { make_schedule(ScheduleKind::variant_a, 0.1, 1.1, *m); });
    gate = gate && rejects([&] { make_schedule(ScheduleKind::variant_a, 0.1, 1.0, *m); });
    gate = gate && !rejects([&] { make_schedule(ScheduleKind::variant_a, 0.1, 1.2, *m); });
    gate = gate && rejects([&] { make_schedule(ScheduleKind::variant_b, 0.1, 1.1 + c4 - 1e-6, *m); });
    gate = gate && !rejects([&] { make_schedule(ScheduleKind::variant_b, 0.1, 1.1 + c4, *m); });
  }
  const std::size_t horizon = 1'000'000;
  const bool a1 = check_schedule_conditions(make_schedule(ScheduleKind::variant_a, 1.0, 2.5, two), horizon).passed;
  const bool a2 = check_schedule_conditions(make_schedule(ScheduleKind::variant_a, 0.1, 1.2, two), horizon).passed;
  const bool b1 = check_schedule_conditions(make_schedule(ScheduleKind::variant_b, 0.1, 7.1, two), horizon).passed;
  const auto inv_sq = Schedule::custom([](double n) { return 1.0 / (n * n); }, [](double n) { return std::pow(n, 1.2); });
  const bool sq_fails = !check_schedule_conditions(inv_sq, horizon).condition_i;
  std::string detail = std::string("gate ") + (gate ? "ok" : "BROKEN") + "; variant_a(1,2.5) " + (a1 ? "pass" : "FAIL") +
                       ", variant_a(0.1,1.2) " + (a2 ? "pass" : "FAIL") + ", variant_b(0.1,7.1) " + (b1 ? "pass" : "FAIL") +
                       "; step n^-2 condition (i) " + (sq_fails ? "fails as expected" : "UNEXPECTEDLY passes");
  return {gate && a1 && a2 && b1 && sq_fails, detail};
}

// 8. CSMA regions.
Outcome criterion8() {
  const std::vector<std::size_t> n{2, 5, 3};
  const auto single = build_csma({n, CsmaScheme::single_param});
  int mismatches_i = 0;
  for (int k = -5; k <= 55; ++k) {
    const double g = k / 10.0;
    const auto r = check_membership(single, (Vector(1) << g).finished());
    const bool inside = g > 0.0 && g < 5.0;
    if ((r.margin > 0.0) != inside || r.achievable != inside) ++mismatches_i;
  }
  const auto per = build_csma({n, CsmaScheme::per_class});
  std::mt19937_64 rng(808);
  int mismatches_ii = 0;
  for (int k = 0; k < 50; ++k) {
    Vector g(3);
    for (Eigen::Index i = 0; i < 3; ++i)
      g[i] = std::uniform_real_distribution<double>(-0.1, 0.7 * static_cast<double>(n[static_cast<std::size_t>(i)]))(rng);
    double load = 0.0;
    bool positive = true;
    for (Eigen::Index i = 0; i < 3; ++i) {
      load += g[i] / static_cast<double>(n[static_cast<std::size_t>(i)]);
      positive = positive && g[i] > 0.0;
    }
    const bool closed_form = positive && load < 1.0;
    if (check_membership(per, g).achievable != closed_form) ++mismatches_ii;
  }
  return {mismatches_i == 0 && mismatches_ii == 0,
          "scheme (i) 61 grid points, " + std::to_string(mismatches_i) + " mismatches; scheme (ii) 50 targets, " +
              std::to_string(mismatches_ii) + " mismatches"};
}

// 9. Byte-identical traces for identical (config, seed).
Outcome criterion9() {
  const auto m = build_csma({{2, 5, 3}, CsmaScheme::per_class});
  RunConfig cfg;
  cfg.target = (Vector(3) << 0.3, 1.5, 0.4).finished();
  cfg.schedule = make_schedule(ScheduleKind::variant_a, 0.1, 1.2, m);
  cfg.num_iterations = 100;
  cfg.seed = 0xC0FFEEULL;
  auto render = [&] {
    std::ostringstream s;
    write_trace_csv(s, run_online(m, cfg), m, {true});
    return s.str();
  };
  const std::string a = render(), b = render();
  cfg.seed += 1;
  const std::string c = render();
  return {a == b && a != c, std::to_string(a.size()) + " bytes, identical: " + (a == b ? "yes" : "no") +
                                ", differs for another seed: " + (a != c ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"product-form consistency", criterion1}, {"gradient correctness", criterion2},
      {"region vs simplex grid", criterion3},   {"interior round trip", criterion4},
      {"affine-transform control", criterion5}, {"online convergence", criterion6},
      {"schedule gate", criterion7},            {"CSMA regions", criterion8},
      {"reproducibility", criterion9}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.passed;
    std::printf("criterion %zu %s  %s: %s (%.2f s)\n", i + 1, o.passed ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed;
}
