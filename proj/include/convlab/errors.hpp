#pragma once

#include <stdexcept>
#include <string>

namespace convlab {

/** Base class for all errors raised by the library. */
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/** Malformed or incompatible coordinate window. */
class WindowError : public Error {
 public:
  explicit WindowError(const std::string& what) : Error(what) {}
};

/** Norm family cannot evaluate the requested quantity. */
class NormError : public Error {
 public:
  explicit NormError(const std::string& what) : Error(what) {}
};

/** Linear program construction or solve failure (degenerate inputs). */
class LpError : public Error {
 public:
  explicit LpError(const std::string& what) : Error(what) {}
};

/** Invalid convex set instance or unsupported set combination. */
class SetError : public Error {
 public:
  explicit SetError(const std::string& what) : Error(what) {}
};

/** Sets are not strictly separated (gap is zero). */
class SeparationError : public Error {
 public:
  explicit SeparationError(const std::string& what) : Error(what) {}
};

/** Certificate data violates its invariants. */
class CertificateError : public Error {
 public:
  explicit CertificateError(const std::string& what) : Error(what) {}
};

/** Scenario configuration error; carries the offending field path. */
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace convlab
