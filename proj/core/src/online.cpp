#include "pfn/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pfn/error.hpp"
#include "pfn/exact.hpp"
#include "pfn/simulate.hpp"

namespace pfn {

void check_box(const Box& box, std::size_t dim) {
  if (box.size() != dim) {
    throw ConfigError("truncation box has " + std::to_string(box.size()) +
                      " intervals, expected " + std::to_string(dim));
  }
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (!(box[i].lo < box[i].hi)) {
      throw ConfigError("truncation box interval " + std::to_string(i + 1) +
                        " must satisfy min < max");
    }
  }
}

ParameterVector clamp(const ParameterVector& r, const Box& box) {
  if (static_cast<std::size_t>(r.size()) != box.size())
    throw DimensionError("clamp: parameter and box dimensions differ");
  ParameterVector out(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const auto& iv = box[static_cast<std::size_t>(i)];
    out[i] = std::max(iv.lo, std::min(iv.hi, r[i]));
  }
  return out;
}

const ParameterVector& RunTrace::final_r() const {
  return records.empty() ? init_r : records.back().r;
}

namespace {

void check_config(const ProductFormModel& model, const RunConfig& config, ParameterVector& r0) {
  const auto d = static_cast<Eigen::Index>(model.num_parameters());
  if (config.target.size() != d) throw DimensionError("target length must equal d");
  if (!config.target.allFinite()) throw DimensionError("target must be finite");
  if (config.schedule.empty()) throw ConfigError("run configuration has no schedule");
  if (config.num_iterations == 0) throw ConfigError("num_iterations must be positive");
  if (config.initial_state >= model.num_states()) throw ConfigError("initial state out of range");
  if (!model.irreducible()) throw ModelError("online runs need an irreducible model");
  r0 = config.init_r.size() == 0 ? ParameterVector::Zero(d) : config.init_r;
  model.check_parameters(r0);
  if (config.truncation_box) {
    check_box(*config.truncation_box, model.num_parameters());
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto& iv = (*config.truncation_box)[static_cast<std::size_t>(i)];
      if (r0[i] < iv.lo || r0[i] > iv.hi) throw ConfigError("init_r lies outside the truncation box");
    }
  }
}

}  // namespace

RunTrace run_online(const ProductFormModel& model, const RunConfig& config) {
  RunTrace trace;
  check_config(model, config, trace.init_r);

  if (config.schedule.kind() == ScheduleKind::custom) {
    const ConditionReport report = check_schedule_conditions(config.schedule, 10'000);
    if (!report.condition_i)
      trace.warnings.push_back("custom schedule: condition (i) not confirmed numerically");
    if (!report.condition_ii)
      trace.warnings.push_back("custom schedule: condition (ii) not confirmed numerically");
  }

  const Matrix& A = model.A();
  SimState sim = make_sim_state(config.seed, config.initial_state);
  ParameterVector r = trace.init_r;
  double elapsed = 0.0;
  trace.records.reserve(config.num_iterations);

  for (std::size_t n = 1; n <= config.num_iterations; ++n) {
    const double nn = static_cast<double>(n);
    IterationRecord rec;
    rec.n = n;
    rec.step = config.schedule.step(nn);
    rec.period = config.schedule.period(nn);
    if (!(rec.step > 0.0) || !std::isfinite(rec.step) || !(rec.period > 0.0) ||
        !std::isfinite(rec.period)) {
      trace.aborted = true;
      trace.abort_reason = "schedule produced a non-positive or non-finite value at n = " +
                           std::to_string(n);
      break;
    }

    if (config.oracle) {
      rec.pi_hat = stationary(model, r).pi;
    } else {
      rec.pi_hat = simulate_window(model, r, sim, rec.period).pi_hat;
    }
    elapsed += rec.period;
    rec.sim_time = elapsed;
    rec.aggregate = A.transpose() * rec.pi_hat;
    rec.grad = rec.aggregate - config.target;

    ParameterVector next = r - rec.step * rec.grad;
    if (config.truncation_box) next = clamp(next, *config.truncation_box);
    if (!next.allFinite()) {
      trace.aborted = true;
      trace.abort_reason = "non-finite parameter update at n = " + std::to_string(n);
      break;
    }
    r = std::move(next);
    rec.r = r;
    if (config.record_objective)
      rec.u_value = stationary(model, r).log_z - config.target.dot(r);
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

double final_aggregate_error(const RunTrace& trace, const Target& target) {
  if (trace.records.empty()) return std::numeric_limits<double>::infinity();
  return (trace.records.back().aggregate - target).cwiseAbs().maxCoeff();
}

GrowthCheck parameter_growth_bound(const RunTrace& trace, const ProductFormModel& model,
                                   const Schedule& schedule) {
  GrowthCheck out;
  out.worst_slack = std::numeric_limits<double>::infinity();
  const double c_g = constants(model).c_g;
  double step_sum = 0.0;
  std::size_t m = 0;
  for (const auto& rec : trace.records) {
    while (m < rec.n) step_sum += schedule.step(static_cast<double>(++m));
    for (Eigen::Index i = 0; i < rec.r.size(); ++i) {
      const double bound = std::abs(trace.init_r[i]) + c_g * step_sum;
      const double slack = bound - std::abs(rec.r[i]);
      if (slack < out.worst_slack) {
        out.worst_slack = slack;
        out.worst_n = rec.n;
        out.worst_component = static_cast<std::size_t>(i);
      }
      // Relative rounding allowance on the accumulated sum.
      if (slack < -1e-12 * std::max(1.0, bound)) out.passed = false;
    }
  }
  return out;
}

DeviationBound deviation_bound(const ProductFormModel& model, const Schedule& schedule,
                               std::size_t n, double epsilon, const ParameterVector& init_r) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (n == 0) throw ConfigError("deviation_bound needs n >= 1");
  const auto d = static_cast<Eigen::Index>(model.num_parameters());
  const ParameterVector r0 = init_r.size() == 0 ? ParameterVector::Zero(d) : init_r;
  model.check_parameters(r0);

  const ModelConstants mc = constants(model);
  const double states = static_cast<double>(model.num_states());
  const double edges = states * (states - 1.0) / 2.0;
  const double r0_max = r0.size() ? r0.cwiseAbs().maxCoeff() : 0.0;

  double c_q = 0.0;
  for (const auto& t : model.transitions())
    if (!t.parameterized()) c_q = std::max(c_q, 1.0 / t.base_rate);

  DeviationBound out;
  const double log_c1_sq = std::log(states) + model.b().maxCoeff() - model.b().minCoeff() +
                           2.0 * r0_max * mc.max_abs_row_sum;
  out.c1 = std::exp(0.5 * log_c1_sq);
  out.c2 = mc.c_g * mc.max_abs_row_sum;
  const double log_c3 = std::log(2.0) - std::log(states) - log_c1_sq - 2.0 * std::log(states) -
                        2.0 * std::log(edges) - std::log(std::exp(r0_max) + c_q);
  out.c3 = std::exp(log_c3);
  out.c4 = mc.c_4;

  for (std::size_t m = 1; m <= n; ++m) out.step_sum += schedule.step(static_cast<double>(m));

  double decay = 0.0;
  if (epsilon > 0.0) {
    decay = std::exp(log_c3 + 2.0 * std::log(epsilon) +
                     schedule.log_period(static_cast<double>(n)) - out.c4 * out.step_sum);
  }
  out.log_value = 0.5 * log_c1_sq + out.c2 * out.step_sum - decay;
  out.value = std::exp(out.log_value);
  return out;
}

}  // namespace pfn
