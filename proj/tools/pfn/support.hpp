#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pfn/model.hpp"
#include "pfn/online.hpp"
#include "pfn/types.hpp"

namespace pfn::cli {

using Json = nlohmann::ordered_json;

/// Config files: TOML, or JSON when the text starts with '{'. JSON objects
/// become sections, so {"run-online": {"iterations": 50}} equals the TOML
/// [run-online] table.
class JsonOrTomlConfig : public CLI::ConfigTOML {
public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

/// Whole file contents; throws pfn::ParseError if the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

Vector to_vector(const std::vector<double>& values);
Json to_json(const Vector& v);

/// Rows separated by ';' or newlines, entries by ',' or whitespace. A JSON
/// array of arrays is accepted as well.
Matrix parse_matrix(const std::string& text);

/// Vector from an inline list ("1,2") or from a file holding a JSON array,
/// a comma list, or a JSON object with an "r_star" field.
Vector parse_vector_or_file(const std::string& text);

/// "lo:hi" entries, one per coordinate; a single entry is broadcast.
Box parse_box(const std::vector<std::string>& entries, std::size_t dim);

/// Global options shared by every command.
struct GlobalOptions {
  std::uint64_t seed = 0;
  bool json = false;
  std::string out_dir;
};

/// Where the model comes from: a file or one of the builders.
struct ModelSource {
  std::string file;
  std::string builder;
  std::size_t n = 2;
  std::vector<double> mu;
  std::size_t queues = 2;
  std::size_t customers = 2;
  std::string routing;
  std::vector<std::size_t> sizes;
  std::string scheme = "per_class";
};

void add_model_source_options(CLI::App& app, ModelSource& source);
ProductFormModel build_model(const std::string& kind, const ModelSource& source);
ProductFormModel load_model_source(const ModelSource& source);

/// Prints the JSON (with --json) or the text form, and stores the JSON as
/// <out-dir>/<name>.json when --out-dir is set.
void emit(const GlobalOptions& global, const std::string& name, const Json& json,
          const std::string& text);

void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace pfn::cli
