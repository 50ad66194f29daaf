#pragma once

#include <stdexcept>
#include <string>

namespace mfopt {

struct InsufficientSamples : std::runtime_error {
  explicit InsufficientSamples(const std::string& what) : std::runtime_error(what) {}
};

struct NonMonotoneSizes : std::runtime_error {
  explicit NonMonotoneSizes(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidLevel : std::runtime_error {
  explicit InvalidLevel(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidHorizon : std::runtime_error {
  explicit InvalidHorizon(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateRadius : std::runtime_error {
  explicit DegenerateRadius(const std::string& what) : std::runtime_error(what) {}
};

struct NonFinite : std::runtime_error {
  explicit NonFinite(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateSimplex : std::runtime_error {
  explicit DegenerateSimplex(const std::string& what) : std::runtime_error(what) {}
};

struct MissingReference : std::runtime_error {
  explicit MissingReference(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mfopt
