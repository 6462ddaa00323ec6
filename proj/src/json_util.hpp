#pragma once

// Strict readers shared by the document formats. Every failure throws
// SchemaError naming the JSON path.

#include <cstdint>
#include <set>
#include <string>

#include <json.hpp>

#include "passmap/errors.hpp"
#include "passmap/geometry.hpp"

namespace passmap::jsonu {

using nlohmann::json;

inline void check_schema(const json& doc, const std::string& expected) {
  if (!doc.is_object()) throw SchemaError("document root must be an object");
  auto it = doc.find("schema");
  if (it == doc.end() || !it->is_string()) throw SchemaError("missing 'schema' field");
  const auto found = it->get<std::string>();
  if (found != expected) throw SchemaVersionMismatch(expected, found);
}

inline double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path + ": expected a number");
  return v.get<double>();
}

inline std::int64_t as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path + ": expected an integer");
  return v.get<std::int64_t>();
}

inline bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw SchemaError(path + ": expected a boolean");
  return v.get<bool>();
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path + ": expected a string");
  return v.get<std::string>();
}

inline const json& as_array(const json& v, const std::string& path, std::size_t size = SIZE_MAX) {
  if (!v.is_array()) throw SchemaError(path + ": expected an array");
  if (size != SIZE_MAX && v.size() != size) {
    throw SchemaError(path + ": expected " + std::to_string(size) + " elements");
  }
  return v;
}

inline Point3 as_vec3(const json& v, const std::string& path) {
  as_array(v, path, 3);
  return {as_double(v[0], path), as_double(v[1], path), as_double(v[2], path)};
}

inline Vec2 as_vec2(const json& v, const std::string& path) {
  as_array(v, path, 2);
  return {as_double(v[0], path), as_double(v[1], path)};
}

inline json vec_json(const Point3& p) { return json::array({p.x(), p.y(), p.z()}); }
inline json vec_json(const Vec2& p) { return json::array({p.x(), p.y()}); }

// Field access on one object; finish() rejects fields nobody asked for.
class Object {
 public:
  Object(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_ + ": expected an object");
  }

  const json& req(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw SchemaError(path_ + ": missing field '" + key + "'");
    return *it;
  }
  const json* opt(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string at(const std::string& key) const { return path_ + "." + key; }
  const std::string& path() const { return path_; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw SchemaError(path_ + ": unknown field '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace passmap::jsonu
