#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfn/model.hpp"

namespace pfn {

/// Model-derived constants bounding the online algorithm:
///   c_g = |Omega| d max|A_xi|          (gradient norm bound)
///   c_l = 2 max|A_xi|                  (Lipschitz constant in total variation)
///   c_4 = c_g (1 + 2 max_x ||A_x||_1)  (schedule exponent requirement)
struct ModelConstants {
  double c_g = 0.0;
  double c_l = 0.0;
  double c_4 = 0.0;
  double max_abs_entry = 0.0;
  double max_abs_row_sum = 0.0;
};

ModelConstants constants(const ProductFormModel& model);

enum class ScheduleKind { variant_a, variant_b, custom };

std::string_view to_string(ScheduleKind kind);
/// Accepts "a", "variant_a", "variant-a" and likewise for b.
ScheduleKind parse_schedule_kind(std::string_view text);

/// Step sizes a_n and observation periods 1/f_n of the online algorithm.
///
///   variant_a: a_n = 1/(n ln(n+1)),  period_n = n^delta,             delta > 1 + alpha
///   variant_b: a_n = 1/n,            period_n = (ln n + 1)^2 n^delta, delta >= 1 + alpha + c_4
///
/// alpha also fixes the analysis sequence e_n used by the diagnostics.
/// Both functions accept real n so tails can be extrapolated past a finite
/// horizon.
class Schedule {
public:
  using Fn = std::function<double(double)>;

  /// Placeholder with no sequences; must be replaced before use.
  Schedule() = default;
  bool empty() const noexcept { return kind_ == ScheduleKind::custom && !step_; }

  /// User-supplied sequences; condition checks on these are advisory.
  static Schedule custom(Fn step, Fn period, double alpha = 0.1, std::string label = "custom");

  ScheduleKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  double delta() const noexcept { return delta_; }
  const std::string& label() const noexcept { return label_; }
  const std::optional<ModelConstants>& model_constants() const noexcept { return constants_; }

  double step(double n) const;
  double period(double n) const;
  /// ln(period_n), evaluated without forming period_n (which overflows for
  /// large n under variant_b's exponents).
  double log_period(double n) const;
  /// ln e_n given the partial step sum S_{n-1} = sum_{m<n} a_m.
  double log_error(double n, double step_sum_before) const;

private:
  friend Schedule make_schedule(ScheduleKind, double, double, const ProductFormModel&);

  ScheduleKind kind_ = ScheduleKind::custom;
  double alpha_ = 0.1;
  double delta_ = 0.0;
  std::string label_;
  Fn step_;
  Fn period_;
  std::optional<ModelConstants> constants_;
};

/// Smallest admissible delta (exclusive bound for variant_a, inclusive for
/// variant_b).
double min_delta(ScheduleKind kind, double alpha, const ModelConstants& constants);

/// Builds a variant_a or variant_b schedule. Throws ScheduleError naming the
/// minimal admissible delta when the constraint is violated.
Schedule make_schedule(ScheduleKind kind, double alpha, double delta,
                       const ProductFormModel& model);

/// Numerical probe of one series' tail.
struct SeriesProbe {
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  bool passed = false;
  /// First n past which the remaining sum is below the Cauchy threshold
  /// (infinity if never found).
  double n_star = 0.0;
  /// Remaining sum beyond the horizon, extrapolated.
  double tail_beyond_horizon = 0.0;
  /// Largest summand over the last decade of the horizon.
  double max_tail_summand = 0.0;
};

struct ConditionReport {
  std::size_t horizon = 0;
  double cauchy_threshold = 1e-8;

  /// Condition (i), first part: sum a_n diverges. Read off as growth of the
  /// partial sums beyond the horizon exceeding `growth_threshold`.
  double step_sum_at_horizon = 0.0;
  double step_growth_beyond_horizon = 0.0;
  double growth_threshold = 1e-2;
  bool step_sum_diverges = false;

  /// Condition (i), second part: sum a_n^2 converges (numerically Cauchy).
  SeriesProbe step_squares;

  /// Condition (ii) for each sampled (c2, c3, c4).
  std::vector<SeriesProbe> error_probes;

  bool condition_i = false;
  bool condition_ii = false;
  bool passed = false;
};

/// Advisory numerical check of the two convergence conditions. Partial sums
/// are exact up to `horizon`; beyond it they are extended by quadrature in
/// log n out to n = 1e300.
///
/// c2, c3, c4 are sampled from {0.1, 1, 10}; for variant_b, c4 is pinned to
/// the model constant c_4 the schedule was built against, since that
/// variant is only claimed for it. Throws std::invalid_argument for
/// horizon < 1000.
ConditionReport check_schedule_conditions(const Schedule& schedule, std::size_t horizon);

}  // namespace pfn
