#include "memnet/net_json.hpp"

#include <fstream>

#include "memnet/error.hpp"

namespace memnet {
namespace {

std::size_t get_size(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_unsigned()) {
    throw SchemaError(std::string("expected nonnegative integer \"") + key + "\"");
  }
  return j.at(key).get<std::size_t>();
}

}  // namespace

nlohmann::json metrics_to_json(const NetMetrics& m) {
  return {{"width", m.width},
          {"depth", m.depth},
          {"params", m.params},
          {"bits", m.bits},
          {"exponent_range", m.exponent_range}};
}

nlohmann::json net_to_json(const LayeredNet& net, const nlohmann::json& construction) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : net.layers()) {
    nlohmann::json lj;
    lj["rows"] = layer.out_dim();
    lj["cols"] = layer.in_dim;
    lj["relu"] = layer.relu;
    nlohmann::json b = nlohmann::json::array();
    nlohmann::json pass = nlohmann::json::array();
    std::size_t nnz = 0;
    for (std::size_t r = 0; r < layer.rows.size(); ++r) {
      b.push_back(to_json(layer.rows[r].bias));
      if (layer.rows[r].passthrough) pass.push_back(r);
      nnz += layer.rows[r].entries.size();
    }
    lj["b"] = std::move(b);
    lj["pass"] = std::move(pass);
    if (2 * nnz >= layer.out_dim() * layer.in_dim) {
      const nlohmann::json zero = to_json(Dyadic());
      nlohmann::json w = nlohmann::json::array();
      for (const auto& row : layer.rows) {
        nlohmann::json wr(layer.in_dim, zero);
        for (const auto& e : row.entries) wr[e.col] = to_json(e.weight);
        w.push_back(std::move(wr));
      }
      lj["w"] = std::move(w);
    } else {
      nlohmann::json w = nlohmann::json::array();
      for (std::size_t r = 0; r < layer.rows.size(); ++r) {
        for (const auto& e : layer.rows[r].entries) w.push_back({r, e.col, to_json(e.weight)});
      }
      lj["w_sparse"] = std::move(w);
    }
    layers.push_back(std::move(lj));
  }
  nlohmann::json j;
  j["schema"] = kNetSchema;
  j["version"] = kNetSchemaVersion;
  j["input_dim"] = net.input_dim();
  j["provenance"] = net.provenance();
  j["layers"] = std::move(layers);
  j["metrics"] = metrics_to_json(net.metrics());
  if (!construction.is_null()) j["construction"] = construction;
  return j;
}

LayeredNet net_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("network file must be a JSON object");
  if (j.value("schema", std::string()) != kNetSchema) throw SchemaError("not a memnet network file");
  if (j.value("version", 0) != kNetSchemaVersion) throw SchemaError("unsupported network schema version");
  const std::size_t input_dim = get_size(j, "input_dim");
  if (!j.contains("layers") || !j.at("layers").is_array()) throw SchemaError("missing \"layers\"");
  std::vector<AffineLayer> layers;
  for (const auto& lj : j.at("layers")) {
    AffineLayer layer;
    const std::size_t rows = get_size(lj, "rows");
    layer.in_dim = get_size(lj, "cols");
    if (!lj.contains("relu") || !lj.at("relu").is_boolean()) throw SchemaError("layer needs boolean \"relu\"");
    layer.relu = lj.at("relu").get<bool>();
    layer.rows.resize(rows);
    const auto& b = lj.at("b");
    if (!b.is_array() || b.size() != rows) throw SchemaError("bias length does not match \"rows\"");
    for (std::size_t r = 0; r < rows; ++r) layer.rows[r].bias = dyadic_from_json(b[r]);
    if (lj.contains("pass")) {
      for (const auto& p : lj.at("pass")) {
        if (!p.is_number_unsigned() || p.get<std::size_t>() >= rows) throw SchemaError("bad \"pass\" index");
        layer.rows[p.get<std::size_t>()].passthrough = true;
      }
    }
    if (lj.contains("w")) {
      const auto& w = lj.at("w");
      if (!w.is_array() || w.size() != rows) throw SchemaError("weight rows do not match \"rows\"");
      for (std::size_t r = 0; r < rows; ++r) {
        if (!w[r].is_array() || w[r].size() != layer.in_dim) throw SchemaError("weight row length mismatch");
        for (std::size_t c = 0; c < layer.in_dim; ++c) {
          Dyadic v = dyadic_from_json(w[r][c]);
          if (!v.is_zero()) layer.rows[r].entries.push_back({static_cast<std::uint32_t>(c), std::move(v), 0.0});
        }
      }
    } else if (lj.contains("w_sparse")) {
      for (const auto& t : lj.at("w_sparse")) {
        if (!t.is_array() || t.size() != 3 || !t[0].is_number_unsigned() || !t[1].is_number_unsigned()) {
          throw SchemaError("w_sparse entries are [row, col, dyadic]");
        }
        const auto r = t[0].get<std::size_t>();
        const auto c = t[1].get<std::size_t>();
        if (r >= rows || c >= layer.in_dim) throw SchemaError("w_sparse index out of range");
        layer.rows[r].entries.push_back({static_cast<std::uint32_t>(c), dyadic_from_json(t[2]), 0.0});
      }
    } else {
      throw SchemaError("layer needs \"w\" or \"w_sparse\"");
    }
    layers.push_back(std::move(layer));
  }
  try {
    return LayeredNet(input_dim, std::move(layers), j.value("provenance", std::string()));
  } catch (const DimensionError& e) {
    throw SchemaError(std::string("inconsistent network: ") + e.what());
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path);
}

}  // namespace memnet
