#include "pfn/trace_io.hpp"

#include <charconv>
#include <cmath>

#include <nlohmann/json.hpp>

#include "pfn/model_io.hpp"
#include "pfn/schedule.hpp"

namespace pfn {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const RunTrace& trace, const ProductFormModel& model,
                     const TraceCsvOptions& options) {
  const std::size_t d = model.num_parameters();
  const std::size_t S = model.num_states();
  std::string line = "n";
  for (std::size_t i = 1; i <= d; ++i) line += ",r_" + std::to_string(i);
  if (options.include_pi_hat)
    for (std::size_t x = 1; x <= S; ++x) line += ",pihat_" + std::to_string(x);
  for (std::size_t i = 1; i <= d; ++i) line += ",agg_" + std::to_string(i);
  line += ",grad_norm,step,period,sim_time\n";
  out << line;

  for (const auto& rec : trace.records) {
    line = std::to_string(rec.n);
    for (Eigen::Index i = 0; i < rec.r.size(); ++i) line += "," + format_number(rec.r[i]);
    if (options.include_pi_hat)
      for (Eigen::Index x = 0; x < rec.pi_hat.size(); ++x) line += "," + format_number(rec.pi_hat[x]);
    for (Eigen::Index i = 0; i < rec.aggregate.size(); ++i)
      line += "," + format_number(rec.aggregate[i]);
    line += "," + format_number(rec.grad.size() ? rec.grad.cwiseAbs().maxCoeff() : 0.0);
    line += "," + format_number(rec.step);
    line += "," + format_number(rec.period);
    line += "," + format_number(rec.sim_time);
    line += '\n';
    out << line;
  }
}

namespace {

nlohmann::ordered_json vec(const Vector& v) {
  auto out = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

std::string run_manifest_json(const ProductFormModel& model, const RunConfig& config,
                              const RunTrace& trace) {
  using Json = nlohmann::ordered_json;
  Json cfg;
  cfg["target"] = vec(config.target);
  Json sched;
  sched["kind"] = std::string(to_string(config.schedule.kind()));
  sched["label"] = config.schedule.label();
  sched["alpha"] = config.schedule.alpha();
  sched["delta"] = config.schedule.delta();
  cfg["schedule"] = std::move(sched);
  if (config.truncation_box) {
    Json box = Json::array();
    for (const auto& iv : *config.truncation_box) box.push_back(Json::array({iv.lo, iv.hi}));
    cfg["truncation_box"] = std::move(box);
  } else {
    cfg["truncation_box"] = nullptr;
  }
  cfg["init_r"] = vec(trace.init_r);
  cfg["num_iterations"] = config.num_iterations;
  cfg["initial_state"] = model.space().label(config.initial_state);
  cfg["oracle"] = config.oracle;

  const ModelConstants mc = constants(model);
  Json root;
  root["config"] = std::move(cfg);
  root["seed"] = config.seed;
  root["model_hash"] = model_hash_hex(model);
  root["constants"] = {{"c_g", mc.c_g}, {"c_l", mc.c_l}, {"c_4", mc.c_4}};
  Json result;
  result["iterations_completed"] = trace.records.size();
  result["aborted"] = trace.aborted;
  if (trace.aborted) result["abort_reason"] = trace.abort_reason;
  result["final_r"] = vec(trace.final_r());
  result["final_error"] = final_aggregate_error(trace, config.target);
  result["warnings"] = trace.warnings;
  root["result"] = std::move(result);
  return root.dump(2) + "\n";
}

}  // namespace pfn
