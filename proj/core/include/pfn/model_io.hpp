#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "pfn/model.hpp"

namespace pfn {

/// JSON model file:
///
///   {
///     "format": "pfn-model",
///     "version": 1,
///     "states": ["0", "1"],
///     "transitions": [
///       {"source": "0", "target": "1", "base_rate": 1.0, "exponent_coeffs": [1.0]}
///     ],
///     "A": [[0.0], [1.0]],
///     "b": [0.0, 0.0]
///   }
///
/// Unknown fields are rejected. Serializing a parsed file reproduces the
/// canonical text byte for byte.
std::string serialize_model(const ProductFormModel& model);

/// Throws ParseError on malformed input and ModelError on an inconsistent
/// model.
ProductFormModel parse_model(const std::string& text);

void save_model(const ProductFormModel& model, const std::filesystem::path& path);
ProductFormModel load_model(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical serialization.
std::uint64_t model_hash(const ProductFormModel& model);
/// model_hash as 16 lowercase hex digits.
std::string model_hash_hex(const ProductFormModel& model);

}  // namespace pfn
