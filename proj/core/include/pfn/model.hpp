#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pfn/types.hpp"

namespace pfn {

/// Finite, ordered set of state labels. The order fixes the indexing of
/// every state-indexed vector and matrix in the library.
class StateSpace {
public:
  explicit StateSpace(std::vector<std::string> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Index of a label; throws ModelError if unknown.
  std::size_t index_of(const std::string& label) const;
  std::optional<std::size_t> find(const std::string& label) const;

private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// One transition x -> y whose rate at parameters r is
/// base_rate * exp(exponent_coeffs . r).
struct TransitionTemplate {
  std::size_t source = 0;
  std::size_t target = 0;
  double base_rate = 1.0;
  Vector exponent_coeffs;

  double rate(const ParameterVector& r) const;
  bool parameterized() const;
};

/// Reversible Markov process with a claimed product-form law
/// pi(r) proportional to exp(A r + b).
///
/// The transitions define the dynamics; (A, b) define the stationary law.
/// Nothing ties the two together at construction beyond dimensions; use
/// validate() to check detailed balance numerically. Immutable after
/// construction.
class ProductFormModel {
public:
  ProductFormModel(StateSpace space, std::vector<TransitionTemplate> transitions,
                   Matrix A, Vector b);

  std::size_t num_states() const noexcept { return space_.size(); }
  std::size_t num_parameters() const noexcept { return static_cast<std::size_t>(A_.cols()); }

  const StateSpace& space() const noexcept { return space_; }
  const std::vector<TransitionTemplate>& transitions() const noexcept { return transitions_; }
  const Matrix& A() const noexcept { return A_; }
  const Vector& b() const noexcept { return b_; }

  /// Whether the transition graph is strongly connected. Realized rates are
  /// positive for every finite r, so this does not depend on r.
  bool irreducible() const noexcept { return irreducible_; }

  /// Outgoing transition indices for each state.
  const std::vector<std::vector<std::size_t>>& outgoing() const noexcept { return outgoing_; }

  /// Throws DimensionError unless r has length d and finite entries.
  void check_parameters(const ParameterVector& r) const;

private:
  StateSpace space_;
  std::vector<TransitionTemplate> transitions_;
  Matrix A_;
  Vector b_;
  std::vector<std::vector<std::size_t>> outgoing_;
  bool irreducible_ = false;
};

/// Realized generator at r. Parallel transitions between the same ordered
/// pair are summed.
GeneratorMatrix build_generator(const ProductFormModel& model, const ParameterVector& r);

struct ProbeResult {
  ParameterVector r;
  bool irreducible = true;
  /// max |pi_x Q_xy - pi_y Q_yx| divided by the largest flow pi_x Q_xy.
  double relative_residual = 0.0;
  std::size_t worst_source = 0;
  std::size_t worst_target = 0;
};

struct ValidationReport {
  bool passed = true;
  double tolerance = 1e-10;
  double max_relative_residual = 0.0;
  std::vector<ProbeResult> probes;
  /// Human-readable reason when !passed.
  std::string message;
};

/// Checks detailed balance of the realized generator against the
/// exp(A r + b) law at every probe point.
///
/// Throws ModelError for a reducible transition graph (no probe can fix it)
/// and DimensionError for an empty probe list or malformed probes.
ValidationReport validate(const ProductFormModel& model,
                          const std::vector<ParameterVector>& probe_points,
                          double tolerance = 1e-10);

}  // namespace pfn
