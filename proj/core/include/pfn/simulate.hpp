#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

#include "pfn/model.hpp"
#include "pfn/types.hpp"

namespace pfn {

/// 64-bit Mersenne Twister with portable uniform and exponential draws
/// (the standard distributions are implementation-defined, these are not).
class Rng {
public:
  /// `stream` separates independent replications sharing one seed.
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Exponential with the given rate (> 0).
  double exponential(double rate);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

private:
  std::mt19937_64 engine_;
};

struct SimState {
  std::size_t current_state = 0;
  double clock = 0.0;
  Rng rng;
};

SimState make_sim_state(std::uint64_t seed, std::size_t initial_state = 0,
                        std::uint64_t stream = 0);

/// Fraction of one observation window spent in each state.
struct OccupancyMeasure {
  Vector pi_hat;
  double window_length = 0.0;
};

/// Called once at window start and at every jump with (time, new state).
using TrajectorySink = std::function<void(double time, std::size_t state)>;

/// Simulates the chain at fixed parameters r for `duration` time units and
/// returns the occupancy measure. `sim` is advanced in place, so the next
/// window continues from where this one ended. The holding interval that
/// straddles the window end is credited up to the boundary only.
OccupancyMeasure simulate_window(const ProductFormModel& model, const ParameterVector& r,
                                 SimState& sim, double duration,
                                 const TrajectorySink& sink = {});

/// A^T pi_hat.
Vector estimate_aggregates(const ProductFormModel& model, const OccupancyMeasure& occupancy);

}  // namespace pfn
