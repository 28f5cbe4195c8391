#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "support.hpp"

namespace pfn::cli {

struct BuildOptions {
  std::string kind;
  std::string output;
};

struct ValidateOptions {
  std::size_t probes = 100;
  double tolerance = 1e-10;
};

struct TargetOptions {
  std::vector<double> target;
  /// Inline matrix text or a file holding one.
  std::string transform;
};

struct SolveOptions {
  TargetOptions target;
  double tolerance = 1e-10;
  std::size_t max_iters = 1'000'000;
  std::string init;
};

struct ScheduleOptions {
  std::string kind = "a";
  double alpha = 0.1;
  double delta = 1.2;
  /// custom: step n^-step_power, period n^period_power.
  double step_power = 1.0;
  double period_power = 1.2;
};

struct OnlineOptions {
  std::vector<double> target;
  ScheduleOptions schedule;
  std::size_t iterations = 200;
  std::vector<std::uint64_t> seeds;
  std::size_t replications = 0;
  std::vector<std::string> box;
  std::string init;
  std::string initial_state;
  bool oracle = false;
  bool pi_hat = false;
  std::size_t jobs = 1;
  double tolerance = 0.1;
};

struct ScheduleCheckOptions {
  ScheduleOptions schedule;
  double horizon = 1e6;
};

int cmd_model_build(const GlobalOptions&, const ModelSource&, const BuildOptions&);
int cmd_model_show(const GlobalOptions&, const ModelSource&);
int cmd_model_validate(const GlobalOptions&, const ModelSource&, const ValidateOptions&);
int cmd_region_check(const GlobalOptions&, const ModelSource&, const TargetOptions&);
int cmd_solve(const GlobalOptions&, const ModelSource&, const SolveOptions&);
int cmd_run_online(const GlobalOptions&, const ModelSource&, const OnlineOptions&);
int cmd_constants(const GlobalOptions&, const ModelSource&);
int cmd_schedule_check(const GlobalOptions&, const ModelSource&, const ScheduleCheckOptions&);

}  // namespace pfn::cli
