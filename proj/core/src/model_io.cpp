#include "pfn/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pfn/error.hpp"

namespace pfn {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kFormat = "pfn-model";
constexpr int kVersion = 1;

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

void require_fields(const Json& obj, const std::set<std::string>& allowed,
                    const std::set<std::string>& required, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ParseError("unknown field '" + key + "' in " + where);
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) throw ParseError("missing field '" + key + "' in " + where);
  }
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + " must be a number");
  return j.get<double>();
}

Vector vector_from(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

}  // namespace

std::string serialize_model(const ProductFormModel& model) {
  Json root;
  root["format"] = kFormat;
  root["version"] = kVersion;
  root["states"] = model.space().labels();
  Json transitions = Json::array();
  for (const auto& t : model.transitions()) {
    Json jt;
    jt["source"] = model.space().label(t.source);
    jt["target"] = model.space().label(t.target);
    jt["base_rate"] = t.base_rate;
    jt["exponent_coeffs"] = vector_json(t.exponent_coeffs);
    transitions.push_back(std::move(jt));
  }
  root["transitions"] = std::move(transitions);
  Json A = Json::array();
  for (Eigen::Index x = 0; x < model.A().rows(); ++x) A.push_back(vector_json(model.A().row(x).transpose()));
  root["A"] = std::move(A);
  root["b"] = vector_json(model.b());
  return root.dump(2) + "\n";
}

ProductFormModel parse_model(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  require_fields(root, {"format", "version", "states", "transitions", "A", "b"},
                 {"format", "version", "states", "transitions", "A", "b"}, "model");
  if (root["format"] != kFormat) throw ParseError("model format must be \"pfn-model\"");
  if (!root["version"].is_number_integer() || root["version"].get<int>() != kVersion)
    throw ParseError("unsupported model version");

  const Json& js = root["states"];
  if (!js.is_array()) throw ParseError("states must be an array of strings");
  std::vector<std::string> labels;
  for (const auto& s : js) {
    if (!s.is_string()) throw ParseError("states must be an array of strings");
    labels.push_back(s.get<std::string>());
  }
  StateSpace space(std::move(labels));

  const Json& jA = root["A"];
  if (!jA.is_array() || jA.empty()) throw ParseError("A must be a non-empty array of rows");
  const std::size_t rows = jA.size();
  const std::size_t cols = jA[0].is_array() ? jA[0].size() : 0;
  Matrix A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t x = 0; x < rows; ++x) {
    const Vector row = vector_from(jA[x], "A[" + std::to_string(x) + "]");
    if (static_cast<std::size_t>(row.size()) != cols) throw ParseError("A rows differ in length");
    A.row(static_cast<Eigen::Index>(x)) = row.transpose();
  }
  Vector b = vector_from(root["b"], "b");

  const Json& jt = root["transitions"];
  if (!jt.is_array()) throw ParseError("transitions must be an array");
  std::vector<TransitionTemplate> transitions;
  for (std::size_t k = 0; k < jt.size(); ++k) {
    const std::string where = "transitions[" + std::to_string(k) + "]";
    require_fields(jt[k], {"source", "target", "base_rate", "exponent_coeffs"},
                   {"source", "target", "base_rate", "exponent_coeffs"}, where);
    if (!jt[k]["source"].is_string() || !jt[k]["target"].is_string())
      throw ParseError(where + ": source and target must be state labels");
    TransitionTemplate t;
    t.source = space.index_of(jt[k]["source"].get<std::string>());
    t.target = space.index_of(jt[k]["target"].get<std::string>());
    t.base_rate = number(jt[k]["base_rate"], where + ".base_rate");
    t.exponent_coeffs = vector_from(jt[k]["exponent_coeffs"], where + ".exponent_coeffs");
    transitions.push_back(std::move(t));
  }
  return ProductFormModel(std::move(space), std::move(transitions), std::move(A), std::move(b));
}

void save_model(const ProductFormModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << serialize_model(model);
  if (!out) throw Error("failed writing " + path.string());
}

ProductFormModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::uint64_t model_hash(const ProductFormModel& model) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : serialize_model(model)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string model_hash_hex(const ProductFormModel& model) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(model_hash(model)));
  return buf;
}

}  // namespace pfn
