#pragma once

#include <stdexcept>
#include <string>

namespace presto {

enum class ErrorCode {
  Io,
  Format,
  Data,
  Manifest,
  Domain,
  Degenerate,
  State,
  Provenance,
  UnsupportedDimension,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorCode::Io, m) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& m) : Error(ErrorCode::Format, m) {}
};
struct DataError : Error {
  explicit DataError(const std::string& m) : Error(ErrorCode::Data, m) {}
};
struct ManifestError : Error {
  explicit ManifestError(const std::string& m) : Error(ErrorCode::Manifest, m) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error(ErrorCode::Domain, m) {}
};
struct DegenerateError : Error {
  explicit DegenerateError(const std::string& m) : Error(ErrorCode::Degenerate, m) {}
};
struct StateError : Error {
  explicit StateError(const std::string& m) : Error(ErrorCode::State, m) {}
};
struct ProvenanceError : Error {
  explicit ProvenanceError(const std::string& m) : Error(ErrorCode::Provenance, m) {}
};
struct UnsupportedDimensionError : Error {
  explicit UnsupportedDimensionError(const std::string& m)
      : Error(ErrorCode::UnsupportedDimension, m) {}
};

}  // namespace presto
