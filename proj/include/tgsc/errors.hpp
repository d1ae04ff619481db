#pragma once

#include <stdexcept>
#include <string>

namespace tgsc {

// Shape or layer-width mismatch anywhere in the numeric pipelines.
struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input files (XML, CSV, binary formats).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally well-formed input that violates a domain rule
// (unknown node in a demand, disconnected OD pair, ragged split, ...).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Out-of-range or mutually inconsistent algorithm parameters.
struct ParameterError : std::runtime_error {
  explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

// Bad magic, version or digest in a binary artifact/checkpoint.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Model/dataset or model/artifact incompatibility.
struct CompatibilityError : std::runtime_error {
  explicit CompatibilityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tgsc
