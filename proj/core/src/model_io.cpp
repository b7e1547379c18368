#include "simec/errors.hpp"
#include "simec/nn.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace simec {

using nlohmann::json;

MlpModel model_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelFormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array()) {
    throw ModelFormatError("model file must be an object with a 'layers' array");
  }
  std::vector<Layer> layers;
  std::size_t idx = 0;
  for (const auto& jl : doc["layers"]) {
    const std::string where = "layer " + std::to_string(idx++);
    if (!jl.contains("weights") || !jl.contains("bias") || !jl.contains("activation")) {
      throw ModelFormatError(where + " needs 'weights', 'bias' and 'activation'");
    }
    const auto& rows = jl["weights"];
    if (!rows.is_array() || rows.empty() || !rows[0].is_array()) {
      throw ModelFormatError(where + ": 'weights' must be a non-empty array of rows");
    }
    Layer l;
    const auto n_rows = static_cast<Eigen::Index>(rows.size());
    const auto n_cols = static_cast<Eigen::Index>(rows[0].size());
    l.weights.resize(n_rows, n_cols);
    for (Eigen::Index r = 0; r < n_rows; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols) {
        throw ModelFormatError(where + ": ragged weight rows");
      }
      for (Eigen::Index c = 0; c < n_cols; ++c) {
        const auto& v = row[static_cast<std::size_t>(c)];
        if (!v.is_number()) throw ModelFormatError(where + ": non-numeric weight");
        l.weights(r, c) = v.get<double>();
      }
    }
    const auto& bias = jl["bias"];
    if (!bias.is_array()) throw ModelFormatError(where + ": 'bias' must be an array");
    l.bias.resize(static_cast<Eigen::Index>(bias.size()));
    for (std::size_t i = 0; i < bias.size(); ++i) {
      if (!bias[i].is_number()) throw ModelFormatError(where + ": non-numeric bias");
      l.bias[static_cast<Eigen::Index>(i)] = bias[i].get<double>();
    }
    if (!jl["activation"].is_string()) {
      throw ModelFormatError(where + ": 'activation' must be a string");
    }
    l.activation = parse_activation(jl["activation"].get<std::string>());
    layers.push_back(std::move(l));
  }
  return MlpModel(std::move(layers));
}

std::string model_to_json(const MlpModel& model) {
  json doc;
  doc["layers"] = json::array();
  for (const auto& l : model.layers()) {
    json jl;
    jl["weights"] = json::array();
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) row.push_back(l.weights(r, c));
      jl["weights"].push_back(std::move(row));
    }
    jl["bias"] = json::array();
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) jl["bias"].push_back(l.bias[i]);
    jl["activation"] = std::string(to_string(l.activation));
    doc["layers"].push_back(std::move(jl));
  }
  // nlohmann serializes doubles with round-trip precision.
  return doc.dump(1) + "\n";
}

MlpModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

void save_model(const MlpModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write model file '" + path + "'");
  out << model_to_json(model);
}

}  // namespace simec
