#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pfn/model.hpp"
#include "pfn/schedule.hpp"
#include "pfn/types.hpp"

namespace pfn {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Per-coordinate parameter bounds.
using Box = std::vector<Interval>;

/// Throws ConfigError unless every interval has lo < hi.
void check_box(const Box& box, std::size_t dim);

/// Component-wise projection onto the box.
ParameterVector clamp(const ParameterVector& r, const Box& box);

struct RunConfig {
  Target target;
  Schedule schedule;
  /// Absent: untruncated update.
  std::optional<Box> truncation_box;
  /// Empty means the zero vector.
  ParameterVector init_r;
  std::size_t num_iterations = 200;
  std::uint64_t seed = 0;
  std::size_t initial_state = 0;
  /// Replace the occupancy estimate by the exact pi(r) (noise-free
  /// gradient descent). For testing.
  bool oracle = false;
  /// Record the exact dual objective log Z(r_n) - gamma . r_n.
  bool record_objective = false;
};

/// Iteration n observes a window of length period(n) at r_{n-1} and then
/// moves to r_n = clamp(r_{n-1} - step(n) * grad).
struct IterationRecord {
  std::size_t n = 0;
  ParameterVector r;
  Vector pi_hat;
  Vector aggregate;
  Vector grad;
  double step = 0.0;
  double period = 0.0;
  std::optional<double> u_value;
  /// Cumulative simulated time at the end of the window.
  double sim_time = 0.0;
};

struct RunTrace {
  ParameterVector init_r;
  std::vector<IterationRecord> records;
  bool aborted = false;
  std::string abort_reason;
  std::vector<std::string> warnings;

  /// r after the last recorded iteration (init_r when empty).
  const ParameterVector& final_r() const;
};

/// Runs the simulate-then-update iteration. The Markov state carries over
/// between windows. A non-finite update stops the run and returns the trace
/// so far with `aborted` set.
RunTrace run_online(const ProductFormModel& model, const RunConfig& config);

/// ||aggregate_n - gamma||_inf of the final record.
double final_aggregate_error(const RunTrace& trace, const Target& target);

struct GrowthCheck {
  bool passed = true;
  /// min over (n, i) of bound - |R_n^i|; +inf for an empty trace.
  double worst_slack = 0.0;
  std::size_t worst_n = 0;
  std::size_t worst_component = 0;
};

/// Checks |R_n^i| <= |R_0^i| + c_g * sum_{m<=n} step(m) on every record.
GrowthCheck parameter_growth_bound(const RunTrace& trace, const ProductFormModel& model,
                                   const Schedule& schedule);

struct DeviationBound {
  double value = 0.0;
  double log_value = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double step_sum = 0.0;
};

/// Upper estimate of P(|pi_hat_x - pi_x| >= epsilon) at iteration n:
///   c1 exp(c2 S_n - c3 epsilon^2 period(n) exp(-c4 S_n)),  S_n = sum_{m<=n} a_m.
/// c1 and c3 depend on the starting point through max|R_0|.
DeviationBound deviation_bound(const ProductFormModel& model, const Schedule& schedule,
                               std::size_t n, double epsilon,
                               const ParameterVector& init_r = {});

}  // namespace pfn
