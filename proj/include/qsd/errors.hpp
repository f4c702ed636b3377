#pragma once

#include <stdexcept>
#include <string>

namespace qsd {

/// Base class of every error raised by the library. `module()` names the
/// component that raised it so the CLI can report provenance.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

#define QSD_DEFINE_ERROR(Name, Module)                                  \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(Module, what) {}     \
  };

// model
QSD_DEFINE_ERROR(NonMonotoneScheme, "model")
QSD_DEFINE_ERROR(EmptyInterior, "model")
QSD_DEFINE_ERROR(AlphaOutOfRange, "model")
QSD_DEFINE_ERROR(InvalidSpec, "model")

// spectral
QSD_DEFINE_ERROR(NonConvergence, "spectral")
QSD_DEFINE_ERROR(NoLinearRegime, "spectral")

// simulate
QSD_DEFINE_ERROR(AllPathsKilled, "simulate")

// ldp
QSD_DEFINE_ERROR(DerivativeMismatch, "ldp")

// cli
QSD_DEFINE_ERROR(ConfigError, "cli")
QSD_DEFINE_ERROR(MismatchedExperiments, "cli")

#undef QSD_DEFINE_ERROR

}  // namespace qsd
