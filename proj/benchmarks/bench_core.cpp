#include <benchmark/benchmark.h>

#include "pfn/exact.hpp"
#include "pfn/networks.hpp"
#include "pfn/online.hpp"
#include "pfn/region.hpp"
#include "pfn/schedule.hpp"
#include "pfn/simulate.hpp"

namespace {

pfn::ProductFormModel jackson(std::size_t customers) {
  pfn::Matrix P = pfn::Matrix::Constant(3, 3, 0.5);
  P.diagonal().setZero();
  return pfn::build_jackson({3, customers, P});
}

void BM_Stationary(benchmark::State& state) {
  const auto m = jackson(static_cast<std::size_t>(state.range(0)));
  const pfn::Vector r = pfn::Vector::Constant(3, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(pfn::stationary(m, r).log_z);
  state.counters["states"] = static_cast<double>(m.num_states());
}
BENCHMARK(BM_Stationary)->Arg(5)->Arg(20)->Arg(60);

void BM_SolveDual(benchmark::State& state) {
  const auto m = pfn::build_csma({{2, 5, 3}, pfn::CsmaScheme::per_class});
  const pfn::Vector gamma = (pfn::Vector(3) << 0.3, 1.5, 0.4).finished();
  for (auto _ : state) benchmark::DoNotOptimize(pfn::solve_dual(m, gamma).r_star);
}
BENCHMARK(BM_SolveDual);

void BM_Membership(benchmark::State& state) {
  const auto m = jackson(static_cast<std::size_t>(state.range(0)));
  const pfn::Vector gamma = m.A().colwise().mean().transpose();
  for (auto _ : state) benchmark::DoNotOptimize(pfn::check_membership(m, gamma).margin);
  state.counters["states"] = static_cast<double>(m.num_states());
}
BENCHMARK(BM_Membership)->Arg(5)->Arg(10)->Arg(20);

void BM_SimulateWindow(benchmark::State& state) {
  const auto m = pfn::build_csma({{2, 5, 3}, pfn::CsmaScheme::per_class});
  const pfn::Vector r = pfn::Vector::Zero(3);
  auto sim = pfn::make_sim_state(1);
  const double duration = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pfn::simulate_window(m, r, sim, duration).pi_hat);
}
BENCHMARK(BM_SimulateWindow)->Arg(100)->Arg(10000);

void BM_ScheduleCheck(benchmark::State& state) {
  const auto m = pfn::build_two_state();
  const auto s = pfn::make_schedule(pfn::ScheduleKind::variant_a, 0.1, 1.2, m);
  for (auto _ : state)
    benchmark::DoNotOptimize(pfn::check_schedule_conditions(s, static_cast<std::size_t>(state.range(0))).passed);
}
BENCHMARK(BM_ScheduleCheck)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
