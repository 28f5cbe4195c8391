#include "pfn/schedule.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pfn/error.hpp"

namespace pfn {

ModelConstants constants(const ProductFormModel& model) {
  const Matrix& A = model.A();
  ModelConstants c;
  c.max_abs_entry = A.cwiseAbs().maxCoeff();
  c.max_abs_row_sum = A.cwiseAbs().rowwise().sum().maxCoeff();
  c.c_g = static_cast<double>(model.num_states()) * static_cast<double>(model.num_parameters()) *
          c.max_abs_entry;
  c.c_l = 2.0 * c.max_abs_entry;
  c.c_4 = c.c_g * (1.0 + 2.0 * c.max_abs_row_sum);
  return c;
}

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::variant_a: return "variant_a";
    case ScheduleKind::variant_b: return "variant_b";
    case ScheduleKind::custom: return "custom";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(std::string_view text) {
  if (text == "a" || text == "variant_a" || text == "variant-a") return ScheduleKind::variant_a;
  if (text == "b" || text == "variant_b" || text == "variant-b") return ScheduleKind::variant_b;
  if (text == "custom") return ScheduleKind::custom;
  throw ParseError("unknown schedule kind '" + std::string(text) + "' (expected a or b)");
}

Schedule Schedule::custom(Fn step, Fn period, double alpha, std::string label) {
  if (!step || !period) throw std::invalid_argument("custom schedule needs step and period");
  Schedule s;
  s.kind_ = ScheduleKind::custom;
  s.alpha_ = alpha;
  s.label_ = std::move(label);
  s.step_ = std::move(step);
  s.period_ = std::move(period);
  return s;
}

double Schedule::step(double n) const {
  switch (kind_) {
    case ScheduleKind::variant_a: return 1.0 / (n * std::log(n + 1.0));
    case ScheduleKind::variant_b: return 1.0 / n;
    case ScheduleKind::custom: return step_(n);
  }
  return 0.0;
}

double Schedule::period(double n) const { return std::exp(log_period(n)); }

double Schedule::log_period(double n) const {
  switch (kind_) {
    case ScheduleKind::variant_a: return delta_ * std::log(n);
    case ScheduleKind::variant_b: return 2.0 * std::log(std::log(n) + 1.0) + delta_ * std::log(n);
    case ScheduleKind::custom: return std::log(period_(n));
  }
  return 0.0;
}

double Schedule::log_error(double n, double step_sum_before) const {
  if (kind_ == ScheduleKind::variant_b)
    return -0.5 * alpha_ * std::log(n) - std::log(step_sum_before);
  return -0.5 * alpha_ * std::log(n);
}

double min_delta(ScheduleKind kind, double alpha, const ModelConstants& constants) {
  switch (kind) {
    case ScheduleKind::variant_a: return 1.0 + alpha;
    case ScheduleKind::variant_b: return 1.0 + alpha + constants.c_4;
    case ScheduleKind::custom: break;
  }
  throw std::invalid_argument("custom schedules have no delta constraint");
}

Schedule make_schedule(ScheduleKind kind, double alpha, double delta,
                       const ProductFormModel& model) {
  if (kind == ScheduleKind::custom)
    throw std::invalid_argument("use Schedule::custom for user-supplied sequences");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ScheduleError("alpha must be positive", 0.0);
  const ModelConstants c = constants(model);
  const double bound = min_delta(kind, alpha, c);
  const bool ok = kind == ScheduleKind::variant_a ? delta > bound : delta >= bound;
  if (!ok) {
    std::ostringstream msg;
    msg << to_string(kind) << " requires delta " << (kind == ScheduleKind::variant_a ? ">" : ">=")
        << " " << bound << " for alpha = " << alpha << " (got " << delta << ")";
    throw ScheduleError(msg.str(), bound);
  }
  Schedule s;
  s.kind_ = kind;
  s.alpha_ = alpha;
  s.delta_ = delta;
  s.label_ = std::string(to_string(kind));
  s.constants_ = c;
  return s;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Partial step sums: exact up to the horizon, then on a uniform grid in
// t = ln n out to n = 1e300 by trapezoidal quadrature of a(e^t) e^t.
struct StepSums {
  std::vector<double> exact;   // exact[n] = sum_{m<=n} a_m, exact[0] = 0
  std::vector<double> grid_t;  // grid_t[0] = ln(horizon)
  std::vector<double> grid_sum;
  double h = 0.01;
};

StepSums step_sums(const Schedule& s, std::size_t horizon) {
  StepSums out;
  out.exact.resize(horizon + 1, 0.0);
  double sum = 0.0, comp = 0.0;
  for (std::size_t n = 1; n <= horizon; ++n) {
    // Kahan summation; a million terms of very different size.
    const double y = s.step(static_cast<double>(n)) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    out.exact[n] = sum;
  }
  const double t0 = std::log(static_cast<double>(horizon));
  const double t_max = std::log(1e300);
  const auto k = static_cast<std::size_t>(std::ceil((t_max - t0) / out.h));
  out.grid_t.resize(k + 1);
  out.grid_sum.resize(k + 1);
  auto density = [&](double t) { return s.step(std::exp(t)) * std::exp(t); };
  out.grid_t[0] = t0;
  out.grid_sum[0] = sum;
  double prev = density(t0);
  for (std::size_t i = 1; i <= k; ++i) {
    out.grid_t[i] = t0 + static_cast<double>(i) * out.h;
    const double cur = density(out.grid_t[i]);
    out.grid_sum[i] = out.grid_sum[i - 1] + 0.5 * out.h * (prev + cur);
    prev = cur;
  }
  return out;
}

// Tail analysis of a positive series given ln(summand) on the exact range
// and on the extrapolation grid.
template <class LogSummand>
SeriesProbe analyze_tail(const StepSums& sums, double threshold, LogSummand log_summand) {
  const std::size_t N = sums.exact.size() - 1;
  const std::size_t K = sums.grid_t.size() - 1;
  const double h = sums.h;
  SeriesProbe probe;

  std::vector<double> lg(K + 1);
  for (std::size_t i = 0; i <= K; ++i) {
    const double n = std::exp(sums.grid_t[i]);
    // Past the horizon a_n is negligible next to S_n, so S_{n-1} ~ S_n.
    lg[i] = log_summand(n, sums.grid_sum[i], sums.grid_sum[i]);
  }

  // Remaining sum beyond the last grid point: s(n) ~ n^{-p}.
  double log_tail = kNegInf;
  if (lg[K] != kNegInf) {
    const double p = -(lg[K] - lg[K - 1]) / h;
    log_tail = p > 1.0 ? lg[K] + sums.grid_t[K] - std::log(p - 1.0)
                       : std::numeric_limits<double>::infinity();
  }

  // Backward accumulation over the grid; record the first grid point where
  // the remaining sum drops below threshold.
  std::vector<double> grid_tail(K + 1);
  grid_tail[K] = log_tail;
  for (std::size_t i = K; i-- > 0;) {
    const double piece = std::log(0.5 * h) + log_add(lg[i] + sums.grid_t[i],
                                                    lg[i + 1] + sums.grid_t[i + 1]);
    grid_tail[i] = log_add(grid_tail[i + 1], piece);
  }
  probe.tail_beyond_horizon = std::exp(grid_tail[0]);

  const double log_threshold = std::log(threshold);
  probe.n_star = std::numeric_limits<double>::infinity();
  if (log_tail < log_threshold) {
    // Exact range: suffix sums from the horizon downward.
    double suffix = grid_tail[0];
    double found = -1.0;
    double max_decade = 0.0;
    const std::size_t decade_start = std::max<std::size_t>(1, N / 10);
    std::vector<double> exact_lg(N + 1, kNegInf);
    for (std::size_t n = 1; n <= N; ++n)
      exact_lg[n] = log_summand(static_cast<double>(n), sums.exact[n - 1], sums.exact[n]);
    for (std::size_t n = N; n >= 1; --n) {
      if (n >= decade_start) max_decade = std::max(max_decade, std::exp(exact_lg[n]));
      if (suffix < log_threshold) found = static_cast<double>(n);
      suffix = log_add(suffix, exact_lg[n]);
    }
    probe.max_tail_summand = max_decade;
    if (found > 0.0) {
      probe.n_star = found;
    } else {
      for (std::size_t i = 0; i <= K; ++i) {
        if (grid_tail[i] < log_threshold) {
          probe.n_star = std::exp(sums.grid_t[i]);
          break;
        }
      }
    }
  } else {
    const std::size_t decade_start = std::max<std::size_t>(1, N / 10);
    for (std::size_t n = decade_start; n <= N; ++n) {
      probe.max_tail_summand =
          std::max(probe.max_tail_summand,
                   std::exp(log_summand(static_cast<double>(n), sums.exact[n - 1], sums.exact[n])));
    }
  }
  probe.passed = std::isfinite(probe.n_star);
  return probe;
}

}  // namespace

ConditionReport check_schedule_conditions(const Schedule& schedule, std::size_t horizon) {
  if (horizon < 1000) throw std::invalid_argument("schedule check horizon must be >= 1000");

  ConditionReport report;
  report.horizon = horizon;
  const StepSums sums = step_sums(schedule, horizon);

  report.step_sum_at_horizon = sums.exact.back();
  report.step_growth_beyond_horizon = sums.grid_sum.back() - sums.exact.back();
  report.step_sum_diverges = report.step_growth_beyond_horizon >= report.growth_threshold;

  report.step_squares = analyze_tail(sums, report.cauchy_threshold,
                                     [&](double n, double, double) {
                                       return 2.0 * std::log(schedule.step(n));
                                     });
  report.condition_i = report.step_sum_diverges && report.step_squares.passed;

  constexpr std::array<double, 3> samples{0.1, 1.0, 10.0};
  std::vector<std::array<double, 3>> triples;
  for (double c2 : samples) {
    for (double c3 : samples) {
      if (schedule.kind() == ScheduleKind::variant_b && schedule.model_constants()) {
        triples.push_back({c2, c3, schedule.model_constants()->c_4});
      } else {
        for (double c4 : samples) triples.push_back({c2, c3, c4});
      }
    }
  }

  report.condition_ii = true;
  for (const auto& [c2, c3, c4] : triples) {
    // a_n S_{n-1} (e_n + exp(c2 S_n - c3 e_n^2 / f_n exp(-c4 S_n)))
    auto log_summand = [&, c2 = c2, c3 = c3, c4 = c4](double n, double s_before, double s_n) {
      if (!(s_before > 0.0)) return kNegInf;
      const double log_e = schedule.log_error(n, s_before);
      const double y = std::log(c3) + 2.0 * log_e + schedule.log_period(n) - c4 * s_n;
      const double x = y > 700.0 ? kNegInf : c2 * s_n - std::exp(y);
      return std::log(schedule.step(n)) + std::log(s_before) + log_add(log_e, x);
    };
    SeriesProbe probe = analyze_tail(sums, report.cauchy_threshold, log_summand);
    probe.c2 = c2;
    probe.c3 = c3;
    probe.c4 = c4;
    report.condition_ii = report.condition_ii && probe.passed;
    report.error_probes.push_back(probe);
  }

  report.passed = report.condition_i && report.condition_ii;
  return report;
}

}  // namespace pfn
