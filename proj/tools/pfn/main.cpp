#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "commands.hpp"
#include "pfn/error.hpp"

using namespace pfn::cli;

namespace {

void add_schedule_options(CLI::App& cmd, ScheduleOptions& s) {
  cmd.add_option("--schedule", s.kind, "a, b or custom")->capture_default_str();
  cmd.add_option("--alpha", s.alpha, "Schedule alpha")->capture_default_str();
  cmd.add_option("--delta", s.delta, "Schedule delta")->capture_default_str();
  cmd.add_option("--step-power", s.step_power, "custom: step n^-p")->capture_default_str();
  cmd.add_option("--period-power", s.period_power, "custom: period n^q")->capture_default_str();
}

void add_target_options(CLI::App& cmd, TargetOptions& t) {
  cmd.add_option("--target", t.target, "Target aggregates, comma separated")->delimiter(',');
  cmd.add_option("--transform", t.transform, "Transform B: file or inline rows '1,-1;0,1'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Product-form Markov network toolkit: achievable targets, exact and online solves"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonOrTomlConfig>());
  app.set_config("--config", "", "TOML or JSON configuration file; flags win over the file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  GlobalOptions global;
  ModelSource source;
  app.add_option("--seed", global.seed, "Random seed")->capture_default_str();
  app.add_flag("--json", global.json, "Machine-readable JSON output");
  app.add_option("--out-dir", global.out_dir, "Directory for output files");
  add_model_source_options(app, source);

  enum class Cmd { none, build, show, validate, region, solve, online, constants, schedule };
  Cmd chosen = Cmd::none;

  auto* model = app.add_subcommand("model", "Build, inspect and validate models");
  model->require_subcommand(1);
  BuildOptions build;
  auto* build_cmd = model->add_subcommand("build", "Emit an example network as a model file");
  build_cmd->add_option("kind", build.kind, "two-state, birth-death, jackson or csma")->required();
  build_cmd->add_option("-o,--output", build.output, "Write the model here instead of stdout");
  build_cmd->callback([&] { chosen = Cmd::build; });
  model->add_subcommand("show", "Summarize a model")->callback([&] { chosen = Cmd::show; });
  ValidateOptions validate;
  auto* validate_cmd = model->add_subcommand("validate", "Check detailed balance at random parameters");
  validate_cmd->add_option("--probes", validate.probes, "Number of random r in [-3,3]^d")->capture_default_str();
  validate_cmd->add_option("--tol", validate.tolerance, "Relative residual tolerance")->capture_default_str();
  validate_cmd->callback([&] { chosen = Cmd::validate; });

  auto* region = app.add_subcommand("region", "Achievable-region queries");
  region->require_subcommand(1);
  TargetOptions region_target;
  auto* check_cmd = region->add_subcommand("check", "Is the target achievable?");
  add_target_options(*check_cmd, region_target);
  check_cmd->callback([&] { chosen = Cmd::region; });

  SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Find r* with A^T pi(r*) equal to the target");
  add_target_options(*solve_cmd, solve.target);
  solve_cmd->add_option("--tol", solve.tolerance, "Gradient sup-norm tolerance")->capture_default_str();
  solve_cmd->add_option("--max-iters", solve.max_iters, "Iteration budget")->capture_default_str();
  solve_cmd->add_option("--init", solve.init, "Warm start: inline vector or file");
  solve_cmd->callback([&] { chosen = Cmd::solve; });

  OnlineOptions online;
  auto* online_cmd = app.add_subcommand("run-online", "Stochastic online algorithm, one trace per seed");
  online_cmd->add_option("--target", online.target, "Target aggregates")->delimiter(',');
  add_schedule_options(*online_cmd, online.schedule);
  online_cmd->add_option("--iterations", online.iterations, "Iteration budget")->capture_default_str();
  online_cmd->add_option("--seeds", online.seeds, "Explicit seed list")->delimiter(',');
  online_cmd->add_option("--replications", online.replications, "Seeds seed, seed+1, ...");
  online_cmd->add_option("--box", online.box, "Truncation box lo:hi per coordinate")->delimiter(',');
  online_cmd->add_option("--init", online.init, "Initial parameters: inline vector or file");
  online_cmd->add_option("--initial-state", online.initial_state, "Initial state label");
  online_cmd->add_flag("--oracle", online.oracle, "Use exact pi instead of simulation");
  online_cmd->add_flag("--pihat", online.pi_hat, "Include pihat columns in traces");
  online_cmd->add_option("--jobs", online.jobs, "Worker threads")->capture_default_str();
  online_cmd->add_option("--tolerance", online.tolerance, "Summary tolerance")->capture_default_str();
  online_cmd->callback([&] { chosen = Cmd::online; });

  app.add_subcommand("constants", "Model constants c_g, c_l, c_4")->callback([&] { chosen = Cmd::constants; });

  auto* schedule = app.add_subcommand("schedule", "Schedule diagnostics");
  schedule->require_subcommand(1);
  ScheduleCheckOptions sched;
  auto* sched_cmd = schedule->add_subcommand("check", "Numerical check of the convergence conditions");
  add_schedule_options(*sched_cmd, sched.schedule);
  sched_cmd->add_option("--horizon", sched.horizon, "Exact partial sums up to this n")->capture_default_str();
  sched_cmd->callback([&] { chosen = Cmd::schedule; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    switch (chosen) {
      case Cmd::build: return cmd_model_build(global, source, build);
      case Cmd::show: return cmd_model_show(global, source);
      case Cmd::validate: return cmd_model_validate(global, source, validate);
      case Cmd::region: return cmd_region_check(global, source, region_target);
      case Cmd::solve: return cmd_solve(global, source, solve);
      case Cmd::online: return cmd_run_online(global, source, online);
      case Cmd::constants: return cmd_constants(global, source);
      case Cmd::schedule: return cmd_schedule_check(global, source, sched);
      case Cmd::none: break;
    }
    std::cerr << app.help();
    return 2;
  } catch (const pfn::ScheduleError& e) {
    std::cerr << "error: " << e.what() << "\nminimal admissible delta: " << e.min_delta() << "\n";
    return 2;
  } catch (const pfn::NotAchievableError& e) {
    std::cerr << "not achievable: " << e.what() << "\n";
    return 1;
  } catch (const pfn::MaxIterationsError& e) {
    std::cerr << "error: " << e.what() << " (gradient norm " << e.grad_norm() << ")\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
