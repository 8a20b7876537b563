#pragma once

#include <stdexcept>
#include <string>

namespace spinconc {

/// Failure categories reported by the engine. Mirrored one-to-one by the
/// status codes of the C API (include/spinconc.h).
enum class ErrorCode {
  Normalization,  ///< coefficients or state norm out of tolerance
  Label,          ///< duplicate / unknown / inconsistent mode labels
  Identity,       ///< unknown or mismatched electron ids
  Projection,     ///< requested measurement branch has (near-)zero weight
  Exclusion,      ///< two electrons in the same (mode, spin) slot
  Domain,         ///< scalar argument outside its domain
  ProtocolState,  ///< state does not have the shape a protocol step expects
  Io,
  InvalidArgument,
  Internal,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spinconc
