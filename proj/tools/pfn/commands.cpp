#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "pfn/error.hpp"
#include "pfn/exact.hpp"
#include "pfn/model_io.hpp"
#include "pfn/online.hpp"
#include "pfn/region.hpp"
#include "pfn/schedule.hpp"
#include "pfn/simulate.hpp"
#include "pfn/trace_io.hpp"

namespace pfn::cli {

namespace {

std::string vec_text(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_number(v[i]);
  }
  return s + ")";
}

Vector require_target(const std::vector<double>& values, std::size_t expected) {
  if (values.empty()) throw pfn::ParseError("--target is required");
  if (values.size() != expected) {
    throw pfn::ParseError("--target has " + std::to_string(values.size()) + " entries, expected " +
                          std::to_string(expected));
  }
  return to_vector(values);
}

std::optional<Matrix> parse_transform(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::error_code ec;
  if (std::filesystem::is_regular_file(text, ec)) return parse_matrix(read_text_file(text));
  return parse_matrix(text);
}

Schedule make_cli_schedule(const ScheduleOptions& o, const ProductFormModel& model) {
  const ScheduleKind kind = parse_schedule_kind(o.kind);
  if (kind != ScheduleKind::custom) return make_schedule(kind, o.alpha, o.delta, model);
  if (!(o.step_power > 0.0)) throw pfn::ParseError("--step-power must be positive");
  const double p = o.step_power, q = o.period_power;
  std::ostringstream label;
  label << "custom(step=n^-" << p << ", period=n^" << q << ")";
  return Schedule::custom([p](double n) { return std::pow(n, -p); },
                          [q](double n) { return std::pow(n, q); }, o.alpha, label.str());
}

std::string region_text(const MembershipResult& m) {
  std::ostringstream out;
  out << "achievable: " << (m.achievable ? "yes" : "no") << "\n"
      << "verdict:    " << to_string(m.verdict) << "\n"
      << "margin:     " << format_number(m.margin) << "\n";
  if (m.witness_alpha) {
    out << "witness:    min weight " << format_number(m.witness_alpha->minCoeff()) << " over "
        << m.witness_alpha->size() << " states\n";
  }
  return out.str();
}

Json region_json(const MembershipResult& m, const Vector& target) {
  Json j;
  j["target"] = to_json(target);
  j["achievable"] = m.achievable;
  j["verdict"] = std::string(to_string(m.verdict));
  j["margin"] = std::isfinite(m.margin) ? Json(m.margin) : Json(nullptr);
  if (m.witness_alpha) j["witness_alpha"] = to_json(*m.witness_alpha);
  return j;
}

}  // namespace

int cmd_model_build(const GlobalOptions& global, const ModelSource& source, const BuildOptions& o) {
  const ProductFormModel model = build_model(o.kind, source);
  const std::string text = serialize_model(model);
  if (!o.output.empty()) write_file(o.output, text);
  if (!global.out_dir.empty()) write_file(std::filesystem::path(global.out_dir) / "model.json", text);
  if (o.output.empty()) {
    std::cout << text;
  } else if (!global.json) {
    std::cout << "wrote " << o.output << " (" << model.num_states() << " states, "
              << model.num_parameters() << " parameters)\n";
  } else {
    std::cout << Json{{"output", o.output}, {"model_hash", model_hash_hex(model)}}.dump(2) << "\n";
  }
  return 0;
}

int cmd_model_show(const GlobalOptions& global, const ModelSource& source) {
  const ProductFormModel model = load_model_source(source);
  Json j;
  j["states"] = model.space().labels();
  j["num_states"] = model.num_states();
  j["num_parameters"] = model.num_parameters();
  j["num_transitions"] = model.transitions().size();
  j["irreducible"] = model.irreducible();
  j["model_hash"] = model_hash_hex(model);
  Json rows = Json::array();
  for (Eigen::Index x = 0; x < model.A().rows(); ++x) rows.push_back(to_json(model.A().row(x).transpose()));
  j["A"] = rows;
  j["b"] = to_json(model.b());

  std::ostringstream out;
  out << model.num_states() << " states, " << model.num_parameters() << " parameters, "
      << model.transitions().size() << " transitions" << (model.irreducible() ? "" : " (reducible)")
      << "\nhash " << model_hash_hex(model) << "\n\nstate          A row                b\n";
  for (std::size_t x = 0; x < model.num_states(); ++x) {
    const auto xi = static_cast<Eigen::Index>(x);
    std::string label = model.space().label(x);
    label.resize(std::max<std::size_t>(label.size() + 1, 15), ' ');
    std::string row = vec_text(model.A().row(xi).transpose());
    row.resize(std::max<std::size_t>(row.size() + 1, 21), ' ');
    out << label << row << format_number(model.b()[xi]) << "\n";
  }
  emit(global, "model_show", j, out.str());
  return 0;
}

int cmd_model_validate(const GlobalOptions& global, const ModelSource& source,
                       const ValidateOptions& o) {
  const ProductFormModel model = load_model_source(source);
  if (o.probes == 0) throw pfn::ParseError("--probes must be positive");
  Rng rng(global.seed);
  std::vector<ParameterVector> points;
  const auto d = static_cast<Eigen::Index>(model.num_parameters());
  for (std::size_t k = 0; k < o.probes; ++k) {
    ParameterVector r(d);
    for (Eigen::Index i = 0; i < d; ++i) r[i] = -3.0 + 6.0 * rng.uniform();
    points.push_back(r);
  }
  const ValidationReport report = validate(model, points, o.tolerance);

  double max_tv = 0.0;
  for (const auto& r : points) {
    const Vector pi = stationary(model, r).pi;
    const Vector ref = stationary_from_generator(build_generator(model, r));
    max_tv = std::max(max_tv, 0.5 * (pi - ref).cwiseAbs().sum());
  }

  Json j;
  j["passed"] = report.passed;
  j["probes"] = o.probes;
  j["tolerance"] = report.tolerance;
  j["max_relative_residual"] = report.max_relative_residual;
  j["max_total_variation"] = max_tv;
  if (!report.passed) j["message"] = report.message;
  std::ostringstream out;
  out << (report.passed ? "valid" : "INVALID") << ": max relative detailed-balance residual "
      << format_number(report.max_relative_residual) << " over " << o.probes
      << " probes (tolerance " << format_number(report.tolerance) << ")\n"
      << "max total variation to the generator null space: " << format_number(max_tv) << "\n";
  if (!report.passed) out << report.message << "\n";
  emit(global, "model_validate", j, out.str());
  return report.passed ? 0 : 1;
}

int cmd_region_check(const GlobalOptions& global, const ModelSource& source, const TargetOptions& o) {
  const ProductFormModel model = load_model_source(source);
  const std::optional<Matrix> B = parse_transform(o.transform);
  const std::size_t expected = B ? static_cast<std::size_t>(B->rows()) : model.num_parameters();
  const Vector gamma = require_target(o.target, expected);
  const MembershipResult m = check_membership(model, gamma, B);
  emit(global, "region_check", region_json(m, gamma), region_text(m));
  return m.achievable ? 0 : 1;
}

int cmd_solve(const GlobalOptions& global, const ModelSource& source, const SolveOptions& o) {
  const ProductFormModel model = load_model_source(source);
  const std::optional<Matrix> B = parse_transform(o.target.transform);
  const std::size_t expected = B ? static_cast<std::size_t>(B->rows()) : model.num_parameters();
  const Vector requested = require_target(o.target.target, expected);

  const MembershipResult m = check_membership(model, requested, B);
  if (!m.achievable) {
    std::cerr << "target not achievable (verdict " << to_string(m.verdict) << ", margin "
              << format_number(m.margin) << "); run `pfn region check` for the full report\n";
    return 1;
  }
  const Target gamma = B ? Target(model.A().transpose() * *m.witness_alpha) : requested;

  DualSolveOptions opts;
  opts.tol = o.tolerance;
  opts.max_iters = o.max_iters;
  if (!o.init.empty()) opts.init_r = parse_vector_or_file(o.init);
  const DualSolveResult res = solve_dual(model, gamma, opts);
  const Vector achieved = aggregates(model, res.r_star);

  Json j;
  j["target"] = to_json(requested);
  j["r_star"] = to_json(res.r_star);
  j["aggregates"] = to_json(achieved);
  if (B) j["transformed_aggregates"] = to_json(*B * achieved);
  j["grad_norm"] = res.final_grad_norm;
  j["iterations"] = res.iterations;
  j["warm_start"] = !o.init.empty();

  std::ostringstream out;
  out << "r*          " << vec_text(res.r_star) << "\n"
      << "aggregates  " << vec_text(achieved) << "\n";
  if (B) out << "transformed " << vec_text(*B * achieved) << "\n";
  out << "grad norm   " << format_number(res.final_grad_norm) << "\n"
      << "iterations  " << res.iterations << (o.init.empty() ? "" : " (warm start)") << "\n";
  emit(global, "solve", j, out.str());
  return 0;
}

namespace {

struct SeedOutcome {
  std::uint64_t seed = 0;
  double final_error = 0.0;
  std::size_t iterations = 0;
  bool aborted = false;
  std::optional<bool> growth_ok;
  Vector final_r;
};

}  // namespace

int cmd_run_online(const GlobalOptions& global, const ModelSource& source, const OnlineOptions& o) {
  const ProductFormModel model = load_model_source(source);
  const Vector gamma = require_target(o.target, model.num_parameters());
  if (o.iterations == 0) throw pfn::ParseError("--iterations must be positive");

  RunConfig base;
  base.target = gamma;
  base.schedule = make_cli_schedule(o.schedule, model);
  base.num_iterations = o.iterations;
  base.oracle = o.oracle;
  if (!o.box.empty()) base.truncation_box = parse_box(o.box, model.num_parameters());
  if (!o.init.empty()) base.init_r = parse_vector_or_file(o.init);
  if (!o.initial_state.empty()) base.initial_state = model.space().index_of(o.initial_state);

  std::vector<std::uint64_t> seeds = o.seeds;
  if (seeds.empty()) {
    const std::size_t k = std::max<std::size_t>(1, o.replications);
    for (std::size_t i = 0; i < k; ++i) seeds.push_back(global.seed + i);
  }
  const std::filesystem::path dir = global.out_dir.empty() ? "pfn-runs" : global.out_dir;
  std::filesystem::create_directories(dir);

  std::vector<SeedOutcome> outcomes(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        RunConfig cfg = base;
        cfg.seed = seeds[i];
        const RunTrace trace = run_online(model, cfg);
        std::ostringstream csv;
        write_trace_csv(csv, trace, model, TraceCsvOptions{o.pi_hat});
        const std::string tag = "seed" + std::to_string(seeds[i]);
        write_file(dir / ("trace_" + tag + ".csv"), csv.str());
        write_file(dir / ("manifest_" + tag + ".json"), run_manifest_json(model, cfg, trace));
        SeedOutcome& out = outcomes[i];
        out.seed = seeds[i];
        out.final_error = final_aggregate_error(trace, gamma);
        out.iterations = trace.records.size();
        out.aborted = trace.aborted;
        out.final_r = trace.final_r();
        if (!cfg.truncation_box) out.growth_ok = parameter_growth_bound(trace, model, cfg.schedule).passed;
        for (const auto& w : trace.warnings) {
          std::lock_guard lock(failure_mutex);
          std::cerr << "warning (seed " << seeds[i] << "): " << w << "\n";
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(o.jobs, 1, seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<double> errors;
  std::size_t within = 0;
  for (const auto& s : outcomes) {
    errors.push_back(s.final_error);
    if (s.final_error <= o.tolerance) ++within;
  }
  std::sort(errors.begin(), errors.end());
  const std::size_t m = errors.size();
  const double median = m % 2 ? errors[m / 2] : 0.5 * (errors[m / 2 - 1] + errors[m / 2]);

  Json runs = Json::array();
  std::ostringstream out;
  out << "seed        final_error      within  growth  final r\n";
  for (const auto& s : outcomes) {
    Json r;
    r["seed"] = s.seed;
    r["final_error"] = s.final_error;
    r["within_tolerance"] = s.final_error <= o.tolerance;
    r["iterations"] = s.iterations;
    r["aborted"] = s.aborted;
    r["growth_bound"] = s.growth_ok ? Json(*s.growth_ok) : Json(nullptr);
    r["final_r"] = to_json(s.final_r);
    runs.push_back(r);

    std::string seed = std::to_string(s.seed), err = format_number(s.final_error);
    seed.resize(std::max<std::size_t>(seed.size() + 1, 12), ' ');
    err.resize(std::max<std::size_t>(err.size() + 1, 17), ' ');
    out << seed << err << (s.final_error <= o.tolerance ? "yes     " : "no      ")
        << (s.growth_ok ? (*s.growth_ok ? "ok      " : "FAIL    ") : "-       ")
        << vec_text(s.final_r) << (s.aborted ? "  (aborted)" : "") << "\n";
  }
  out << "\nmedian final error " << format_number(median) << "; " << within << "/" << m
      << " runs within " << format_number(o.tolerance) << "\ntraces in " << dir.string() << "\n";

  Json j;
  j["schedule"] = base.schedule.label();
  j["tolerance"] = o.tolerance;
  j["runs"] = runs;
  j["median_final_error"] = median;
  j["within_tolerance"] = within;
  j["fraction_within_tolerance"] = static_cast<double>(within) / static_cast<double>(m);
  if (global.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << out.str();
  }
  write_file(dir / "summary.json", j.dump(2) + "\n");
  return 0;
}

int cmd_constants(const GlobalOptions& global, const ModelSource& source) {
  const ProductFormModel model = load_model_source(source);
  const ModelConstants c = constants(model);
  Json j{{"c_g", c.c_g},
         {"c_l", c.c_l},
         {"c_4", c.c_4},
         {"max_abs_entry", c.max_abs_entry},
         {"max_abs_row_sum", c.max_abs_row_sum}};
  std::ostringstream out;
  out << "c_g              " << format_number(c.c_g) << "\n"
      << "c_l              " << format_number(c.c_l) << "\n"
      << "c_4              " << format_number(c.c_4) << "\n"
      << "max |A_xi|       " << format_number(c.max_abs_entry) << "\n"
      << "max ||A_x||_1    " << format_number(c.max_abs_row_sum) << "\n";
  emit(global, "constants", j, out.str());
  return 0;
}

int cmd_schedule_check(const GlobalOptions& global, const ModelSource& source,
                       const ScheduleCheckOptions& o) {
  const ProductFormModel model = load_model_source(source);
  const Schedule schedule = make_cli_schedule(o.schedule, model);
  if (!(o.horizon >= 1000.0) || o.horizon > 1e9) throw pfn::ParseError("--horizon must lie in [1e3, 1e9]");
  const ConditionReport r = check_schedule_conditions(schedule, static_cast<std::size_t>(o.horizon));

  auto probe_json = [](const SeriesProbe& p) {
    Json j{{"passed", p.passed},
           {"n_star", std::isfinite(p.n_star) ? Json(p.n_star) : Json(nullptr)},
           {"tail_beyond_horizon", std::isfinite(p.tail_beyond_horizon) ? Json(p.tail_beyond_horizon) : Json(nullptr)},
           {"max_tail_summand", p.max_tail_summand}};
    return j;
  };
  Json probes = Json::array();
  for (const auto& p : r.error_probes) {
    Json j = probe_json(p);
    j["c2"] = p.c2;
    j["c3"] = p.c3;
    j["c4"] = p.c4;
    probes.push_back(j);
  }
  Json j;
  j["schedule"] = schedule.label();
  j["horizon"] = r.horizon;
  j["step_sum_at_horizon"] = r.step_sum_at_horizon;
  j["step_growth_beyond_horizon"] = r.step_growth_beyond_horizon;
  j["step_sum_diverges"] = r.step_sum_diverges;
  j["step_squares"] = probe_json(r.step_squares);
  j["condition_i"] = r.condition_i;
  j["condition_ii"] = r.condition_ii;
  j["error_probes"] = probes;
  j["passed"] = r.passed;

  std::size_t ok = 0;
  for (const auto& p : r.error_probes) ok += p.passed;
  std::ostringstream out;
  out << "schedule " << schedule.label() << ", horizon " << r.horizon << "\n"
      << "condition (i):  " << (r.condition_i ? "pass" : "FAIL") << "\n"
      << "  sum a_n at horizon " << format_number(r.step_sum_at_horizon) << ", growth beyond "
      << format_number(r.step_growth_beyond_horizon) << (r.step_sum_diverges ? " (diverges)" : " (converges)")
      << "\n  sum a_n^2 tail " << format_number(r.step_squares.tail_beyond_horizon)
      << (r.step_squares.passed ? " (Cauchy)" : " (not Cauchy)") << "\n"
      << "condition (ii): " << (r.condition_ii ? "pass" : "FAIL") << " (" << ok << "/"
      << r.error_probes.size() << " probes)\n";
  for (const auto& p : r.error_probes) {
    if (p.passed) continue;
    out << "  failed at c2=" << format_number(p.c2) << " c3=" << format_number(p.c3)
        << " c4=" << format_number(p.c4) << "\n";
  }
  out << "(numerical diagnostic, not a proof)\n";
  emit(global, "schedule_check", j, out.str());
  return r.passed ? 0 : 1;
}

}  // namespace pfn::cli
