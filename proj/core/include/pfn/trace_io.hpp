#pragma once

#include <ostream>
#include <string>

#include "pfn/model.hpp"
#include "pfn/online.hpp"

namespace pfn {

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

struct TraceCsvOptions {
  bool include_pi_hat = false;
};

/// Columns: n, r_1..r_d, [pihat_1..pihat_S], agg_1..agg_d, grad_norm,
/// step, period, sim_time. grad_norm is the sup norm. Output depends only
/// on the trace, so equal traces give identical bytes.
void write_trace_csv(std::ostream& out, const RunTrace& trace, const ProductFormModel& model,
                     const TraceCsvOptions& options = {});

/// JSON run manifest: configuration, seed, model hash, model constants and
/// a short outcome summary.
std::string run_manifest_json(const ProductFormModel& model, const RunConfig& config,
                              const RunTrace& trace);

}  // namespace pfn
