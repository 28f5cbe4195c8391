#include "support.hpp"

#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pfn/error.hpp"
#include "pfn/model_io.hpp"
#include "pfn/networks.hpp"

namespace pfn::cli {

namespace {

void json_to_toml(const Json& obj, const std::string& section, std::ostream& out) {
  for (const auto& [key, value] : obj.items()) {
    if (value.is_object()) continue;
    out << key << " = ";
    if (value.is_array()) {
      out << "[";
      bool first = true;
      for (const auto& v : value) {
        if (!first) out << ", ";
        first = false;
        if (v.is_structured()) throw pfn::ParseError("config key '" + key + "': nested arrays are not supported");
        out << v.dump();
      }
      out << "]";
    } else if (value.is_null()) {
      throw pfn::ParseError("config key '" + key + "' is null");
    } else {
      out << value.dump();
    }
    out << "\n";
  }
  for (const auto& [key, value] : obj.items()) {
    if (!value.is_object()) continue;
    const std::string name = section.empty() ? key : section + "." + key;
    out << "[" << name << "]\n";
    json_to_toml(value, name, out);
  }
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& token) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw pfn::ParseError("not a number: '" + token + "'");
  }
  if (used != token.size()) throw pfn::ParseError("not a number: '" + token + "'");
  return v;
}

Vector parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::string token;
  for (char c : text + ",") {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) values.push_back(parse_double(token));
      token.clear();
    } else {
      token += c;
    }
  }
  return to_vector(values);
}

}  // namespace

std::vector<CLI::ConfigItem> JsonOrTomlConfig::from_config(std::istream& input) const {
  std::stringstream buffer;
  buffer << input.rdbuf();
  const std::string text = buffer.str();
  if (trim(text).rfind('{', 0) != 0) {
    std::istringstream again(text);
    return CLI::ConfigTOML::from_config(again);
  }
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  std::ostringstream toml;
  try {
    json_to_toml(root, "", toml);
  } catch (const pfn::ParseError& e) {
    throw CLI::ConfigError(e.what());
  }
  std::istringstream converted(toml.str());
  return CLI::ConfigTOML::from_config(converted);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pfn::ParseError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vector to_vector(const std::vector<double>& values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Matrix parse_matrix(const std::string& raw) {
  const std::string text = trim(raw);
  std::vector<Vector> rows;
  if (!text.empty() && text.front() == '[') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw pfn::ParseError(std::string("matrix is not valid JSON: ") + e.what());
    }
    if (!j.is_array()) throw pfn::ParseError("matrix must be an array of rows");
    for (const auto& row : j) {
      if (!row.is_array()) throw pfn::ParseError("matrix must be an array of rows");
      Vector v(static_cast<Eigen::Index>(row.size()));
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (!row[i].is_number()) throw pfn::ParseError("matrix entries must be numbers");
        v[static_cast<Eigen::Index>(i)] = row[i].get<double>();
      }
      rows.push_back(v);
    }
  } else {
    std::string line;
    for (char c : text + ";") {
      if (c == ';' || c == '\n') {
        if (!trim(line).empty()) rows.push_back(parse_number_list(line));
        line.clear();
      } else {
        line += c;
      }
    }
  }
  if (rows.empty()) throw pfn::ParseError("matrix is empty");
  Matrix M(static_cast<Eigen::Index>(rows.size()), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != M.cols()) throw pfn::ParseError("matrix rows differ in length");
    M.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  }
  return M;
}

Vector parse_vector_or_file(const std::string& text) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(text, ec)) return parse_number_list(text);
  const std::string contents = trim(read_text_file(text));
  if (!contents.empty() && (contents.front() == '[' || contents.front() == '{')) {
    Json j;
    try {
      j = Json::parse(contents);
    } catch (const Json::parse_error& e) {
      throw pfn::ParseError(text + " is not valid JSON: " + e.what());
    }
    if (j.is_object()) {
      if (!j.contains("r_star")) throw pfn::ParseError(text + ": expected an \"r_star\" field");
      j = j["r_star"];
    }
    if (!j.is_array()) throw pfn::ParseError(text + ": expected an array of numbers");
    std::vector<double> values;
    for (const auto& v : j) {
      if (!v.is_number()) throw pfn::ParseError(text + ": expected an array of numbers");
      values.push_back(v.get<double>());
    }
    return to_vector(values);
  }
  return parse_number_list(contents);
}

Box parse_box(const std::vector<std::string>& entries, std::size_t dim) {
  Box box;
  for (const auto& e : entries) {
    const auto colon = e.find(':');
    if (colon == std::string::npos) throw pfn::ParseError("box entry '" + e + "' must be lo:hi");
    box.push_back({parse_double(trim(e.substr(0, colon))), parse_double(trim(e.substr(colon + 1)))});
  }
  if (box.size() == 1 && dim > 1) box.assign(dim, box[0]);
  check_box(box, dim);
  return box;
}

void add_model_source_options(CLI::App& app, ModelSource& source) {
  app.add_option("--model", source.file, "Model file (JSON)");
  app.add_option("--builder", source.builder, "Example network: two-state, birth-death, jackson, csma");
  app.add_option("--n", source.n, "Birth-death: number of up-steps (states 0..n)");
  app.add_option("--mu", source.mu, "Birth-death: down-rates, one value broadcasts")->delimiter(',');
  app.add_option("--queues", source.queues, "Jackson: number of queues");
  app.add_option("--customers", source.customers, "Jackson: number of customers");
  app.add_option("--routing", source.routing, "Jackson: routing matrix, rows separated by ';'");
  app.add_option("--sizes", source.sizes, "CSMA: class sizes")->delimiter(',');
  app.add_option("--scheme", source.scheme, "CSMA: single_param or per_class");
}

ProductFormModel build_model(const std::string& kind, const ModelSource& source) {
  if (kind == "two-state") return build_two_state();
  if (kind == "birth-death") {
    BirthDeathSpec spec;
    spec.n = source.n;
    spec.mu = source.mu.empty() ? std::vector<double>(source.n, 1.0) : source.mu;
    if (spec.mu.size() == 1 && source.n > 1) spec.mu.assign(source.n, spec.mu[0]);
    return build_birth_death(spec);
  }
  if (kind == "jackson") {
    JacksonSpec spec;
    spec.d = source.queues;
    spec.n = source.customers;
    if (source.routing.empty()) {
      if (spec.d < 2) throw pfn::ModelError("Jackson network needs d >= 2 queues");
      const auto d = static_cast<Eigen::Index>(spec.d);
      spec.P = Matrix::Constant(d, d, 1.0 / static_cast<double>(spec.d - 1));
      spec.P.diagonal().setZero();
    } else {
      spec.P = parse_matrix(source.routing);
    }
    return build_jackson(spec);
  }
  if (kind == "csma") {
    CsmaPartiteSpec spec;
    spec.sizes = source.sizes.empty() ? std::vector<std::size_t>{2, 5, 3} : source.sizes;
    spec.scheme = parse_csma_scheme(source.scheme);
    return build_csma(spec);
  }
  throw pfn::ParseError("unknown builder '" + kind +
                        "' (expected two-state, birth-death, jackson or csma)");
}

ProductFormModel load_model_source(const ModelSource& source) {
  if (!source.file.empty() && !source.builder.empty())
    throw pfn::ParseError("pass either --model or --builder, not both");
  if (!source.file.empty()) return load_model(source.file);
  if (!source.builder.empty()) return build_model(source.builder, source);
  throw pfn::ParseError("no model given: pass --model FILE or --builder KIND");
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pfn::Error("cannot open " + path.string() + " for writing");
  out << contents;
  if (!out) throw pfn::Error("failed writing " + path.string());
}

void emit(const GlobalOptions& global, const std::string& name, const Json& json,
          const std::string& text) {
  if (global.json) {
    std::cout << json.dump(2) << "\n";
  } else {
    std::cout << text;
  }
  if (!global.out_dir.empty())
    write_file(std::filesystem::path(global.out_dir) / (name + ".json"), json.dump(2) + "\n");
}

}  // namespace pfn::cli
