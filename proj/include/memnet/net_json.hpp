#pragma once

#include <string>

#include "json.hpp"
#include "memnet/net.hpp"

namespace memnet {

inline constexpr const char* kNetSchema = "memnet.net";
inline constexpr int kNetSchemaVersion = 1;

nlohmann::json metrics_to_json(const NetMetrics& m);

// Layers are written dense ("w") unless fewer than half the entries are
// nonzero, in which case "w_sparse" holds [row, col, dyadic] triples.
// `construction` is stored verbatim when not null.
nlohmann::json net_to_json(const LayeredNet& net, const nlohmann::json& construction = nullptr);
// Metrics in the file are informational; they are recomputed on load.
LayeredNet net_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
// Sorted keys, two-space indent, trailing newline.
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace memnet
