#include "pfn/simulate.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pfn/error.hpp"

namespace pfn {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() {
  // 53 random mantissa bits, offset by half an ulp to stay off 0 and 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::exponential(double rate) { return -std::log(uniform()) / rate; }

SimState make_sim_state(std::uint64_t seed, std::size_t initial_state, std::uint64_t stream) {
  return SimState{initial_state, 0.0, Rng(seed, stream)};
}

namespace {

struct JumpTable {
  std::vector<double> total_rate;
  // Per state: (target, cumulative rate) pairs in template order.
  std::vector<std::vector<std::pair<std::size_t, double>>> cumulative;
};

JumpTable realize(const ProductFormModel& model, const ParameterVector& r) {
  const std::size_t S = model.num_states();
  JumpTable table;
  table.total_rate.assign(S, 0.0);
  table.cumulative.resize(S);
  const auto& transitions = model.transitions();
  for (std::size_t x = 0; x < S; ++x) {
    double acc = 0.0;
    for (std::size_t k : model.outgoing()[x]) {
      acc += transitions[k].rate(r);
      table.cumulative[x].emplace_back(transitions[k].target, acc);
    }
    table.total_rate[x] = acc;
  }
  return table;
}

}  // namespace

OccupancyMeasure simulate_window(const ProductFormModel& model, const ParameterVector& r,
                                 SimState& sim, double duration, const TrajectorySink& sink) {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw SimulationError("window duration must be positive and finite");
  model.check_parameters(r);
  const std::size_t S = model.num_states();
  if (sim.current_state >= S) throw SimulationError("simulation state index out of range");

  const JumpTable table = realize(model, r);
  std::vector<double> occupied(S, 0.0);
  double elapsed = 0.0;
  std::size_t x = sim.current_state;
  if (sink) sink(sim.clock, x);

  for (;;) {
    const double total = table.total_rate[x];
    if (!(total > 0.0))
      throw SimulationError("absorbing state '" + model.space().label(x) + "' reached");
    const double hold = sim.rng.exponential(total);
    if (elapsed + hold >= duration) {
      occupied[x] += duration - elapsed;
      break;
    }
    occupied[x] += hold;
    elapsed += hold;

    const double u = sim.rng.uniform() * total;
    const auto& cum = table.cumulative[x];
    std::size_t next = cum.back().first;
    for (const auto& [target, c] : cum) {
      if (u < c) {
        next = target;
        break;
      }
    }
    x = next;
    if (sink) sink(sim.clock + elapsed, x);
  }

  sim.current_state = x;
  sim.clock += duration;

  OccupancyMeasure out;
  out.window_length = duration;
  out.pi_hat = Eigen::Map<const Vector>(occupied.data(), static_cast<Eigen::Index>(S)) / duration;
  return out;
}

Vector estimate_aggregates(const ProductFormModel& model, const OccupancyMeasure& occupancy) {
  if (static_cast<std::size_t>(occupancy.pi_hat.size()) != model.num_states())
    throw DimensionError("occupancy measure must have one entry per state");
  return model.A().transpose() * occupancy.pi_hat;
}

}  // namespace pfn
