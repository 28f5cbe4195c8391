#include "pfn/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pfn/error.hpp"
#include "pfn/exact.hpp"

namespace pfn {

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) throw ModelError("state space needs at least two states");
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], i).second)
      throw ModelError("duplicate state label '" + labels_[i] + "'");
  }
}

std::size_t StateSpace::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw ModelError("unknown state label '" + label + "'");
  return it->second;
}

std::optional<std::size_t> StateSpace::find(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double TransitionTemplate::rate(const ParameterVector& r) const {
  return base_rate * std::exp(exponent_coeffs.dot(r));
}

bool TransitionTemplate::parameterized() const {
  return (exponent_coeffs.array() != 0.0).any();
}

namespace {

bool strongly_connected(std::size_t n, const std::vector<TransitionTemplate>& transitions) {
  std::vector<std::vector<std::size_t>> fwd(n), bwd(n);
  for (const auto& t : transitions) {
    fwd[t.source].push_back(t.target);
    bwd[t.target].push_back(t.source);
  }
  auto reaches_all = [n](const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t y : adj[x]) {
        if (!seen[y]) {
          seen[y] = 1;
          ++count;
          stack.push_back(y);
        }
      }
    }
    return count == n;
  };
  return reaches_all(fwd) && reaches_all(bwd);
}

}  // namespace

ProductFormModel::ProductFormModel(StateSpace space, std::vector<TransitionTemplate> transitions,
                                   Matrix A, Vector b)
    : space_(std::move(space)),
      transitions_(std::move(transitions)),
      A_(std::move(A)),
      b_(std::move(b)) {
  const auto S = static_cast<Eigen::Index>(space_.size());
  if (A_.cols() < 1) throw ModelError("model needs at least one parameter (d >= 1)");
  if (A_.rows() != S) {
    throw DimensionError("A has " + std::to_string(A_.rows()) + " rows but the state space has " +
                         std::to_string(S) + " states");
  }
  if (b_.size() != S) throw DimensionError("b must have one entry per state");
  if (!A_.allFinite() || !b_.allFinite()) throw ModelError("A and b must be finite");

  outgoing_.assign(space_.size(), {});
  for (std::size_t k = 0; k < transitions_.size(); ++k) {
    const auto& t = transitions_[k];
    if (t.source >= space_.size() || t.target >= space_.size())
      throw ModelError("transition " + std::to_string(k) + " references an unknown state");
    if (t.source == t.target)
      throw ModelError("transition " + std::to_string(k) + " is a self-loop");
    if (!(t.base_rate > 0.0) || !std::isfinite(t.base_rate))
      throw ModelError("transition " + std::to_string(k) + " needs a positive finite base rate");
    if (t.exponent_coeffs.size() != A_.cols())
      throw DimensionError("transition " + std::to_string(k) +
                           " exponent_coeffs must have length d = " + std::to_string(A_.cols()));
    if (!t.exponent_coeffs.allFinite())
      throw ModelError("transition " + std::to_string(k) + " has non-finite exponent_coeffs");
    outgoing_[t.source].push_back(k);
  }
  irreducible_ = strongly_connected(space_.size(), transitions_);
}

void ProductFormModel::check_parameters(const ParameterVector& r) const {
  if (r.size() != A_.cols()) {
    throw DimensionError("parameter vector has length " + std::to_string(r.size()) +
                         ", expected " + std::to_string(A_.cols()));
  }
  if (!r.allFinite()) throw DimensionError("parameter vector must be finite");
}

GeneratorMatrix build_generator(const ProductFormModel& model, const ParameterVector& r) {
  model.check_parameters(r);
  const auto S = static_cast<Eigen::Index>(model.num_states());
  GeneratorMatrix Q = GeneratorMatrix::Zero(S, S);
  for (const auto& t : model.transitions()) {
    const auto x = static_cast<Eigen::Index>(t.source);
    const auto y = static_cast<Eigen::Index>(t.target);
    const double q = t.rate(r);
    Q(x, y) += q;
    Q(x, x) -= q;
  }
  return Q;
}

ValidationReport validate(const ProductFormModel& model,
                          const std::vector<ParameterVector>& probe_points, double tolerance) {
  if (probe_points.empty()) throw DimensionError("validate needs at least one probe point");
  if (!model.irreducible()) throw ModelError("transition graph is reducible");

  ValidationReport report;
  report.tolerance = tolerance;
  const auto S = static_cast<Eigen::Index>(model.num_states());

  for (const auto& r : probe_points) {
    const GeneratorMatrix Q = build_generator(model, r);
    const Vector pi = stationary(model, r).pi;

    ProbeResult probe;
    probe.r = r;
    probe.irreducible = true;

    double max_flow = 0.0;
    for (Eigen::Index x = 0; x < S; ++x)
      for (Eigen::Index y = 0; y < S; ++y)
        if (x != y) max_flow = std::max(max_flow, pi(x) * Q(x, y));

    double worst = 0.0;
    for (Eigen::Index x = 0; x < S; ++x) {
      for (Eigen::Index y = x + 1; y < S; ++y) {
        const double residual = std::abs(pi(x) * Q(x, y) - pi(y) * Q(y, x));
        if (residual > worst) {
          worst = residual;
          probe.worst_source = static_cast<std::size_t>(x);
          probe.worst_target = static_cast<std::size_t>(y);
        }
      }
    }
    probe.relative_residual = max_flow > 0.0 ? worst / max_flow : 0.0;
    report.max_relative_residual = std::max(report.max_relative_residual, probe.relative_residual);

    if (probe.relative_residual > tolerance &&
        probe.relative_residual >= report.max_relative_residual) {
      report.passed = false;
      std::ostringstream msg;
      msg << "detailed balance violated on edge " << model.space().label(probe.worst_source)
          << " <-> " << model.space().label(probe.worst_target)
          << ": relative residual " << probe.relative_residual << " > " << tolerance;
      report.message = msg.str();
    }
    report.probes.push_back(std::move(probe));
  }
  return report;
}

}  // namespace pfn
