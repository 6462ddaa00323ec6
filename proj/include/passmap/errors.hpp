#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace passmap {

// Root of every error raised by the library. Each subclass maps onto a
// distinct failure the callers are expected to handle differently.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plane fitting
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class NoConsensus : public Error {
 public:
  using Error::Error;
};

// Dataset ingestion
class ManifestMissing : public Error {
 public:
  explicit ManifestMissing(const std::string& path)
      : Error("manifest not found: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class MalformedFrame : public Error {
 public:
  MalformedFrame(std::int64_t id, const std::string& reason)
      : Error("malformed frame " + std::to_string(id) + ": " + reason), id_(id) {}
  std::int64_t id() const { return id_; }

 private:
  std::int64_t id_;
};

class PoseNotRigid : public Error {
 public:
  PoseNotRigid(std::int64_t id, double err)
      : Error("pose of frame " + std::to_string(id) +
              " is not a rigid rotation (orthogonality error " + std::to_string(err) + ")"),
        id_(id) {}
  std::int64_t id() const { return id_; }

 private:
  std::int64_t id_;
};

// Passage detection
class InsufficientCoverage : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

// Documents (graph, config, scene, prior)
class SchemaError : public Error {
 public:
  using Error::Error;
};

class SchemaVersionMismatch : public SchemaError {
 public:
  SchemaVersionMismatch(const std::string& expected, const std::string& found)
      : SchemaError("schema version mismatch: expected '" + expected + "', found '" + found + "'") {}
};

class DanglingReference : public SchemaError {
 public:
  DanglingReference(const std::string& entity, std::int64_t id)
      : SchemaError("dangling reference: " + entity + " " + std::to_string(id)),
        entity_(entity),
        id_(id) {}
  const std::string& entity() const { return entity_; }
  std::int64_t id() const { return id_; }

 private:
  std::string entity_;
  std::int64_t id_;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace passmap
