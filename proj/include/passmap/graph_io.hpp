#pragma once

#include <filesystem>
#include <string>

#include "passmap/scene_graph.hpp"

namespace passmap {

inline constexpr const char* kGraphSchema = "sgraph/1";

// Single JSON document; field names in docs/schema.md. Output depends only on
// the graph, so equal graphs serialize to identical bytes.
std::string save_graph(const SceneGraph& graph);

// Throws SchemaVersionMismatch, DanglingReference, or SchemaError for any
// missing, mistyped or unknown field.
SceneGraph load_graph(const std::string& document);

void write_graph(const std::filesystem::path& path, const SceneGraph& graph);
SceneGraph read_graph(const std::filesystem::path& path);

}  // namespace passmap
