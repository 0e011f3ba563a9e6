#pragma once

#include <stdexcept>
#include <string>

namespace spillover {

/// Failure class of an error. Determines the CLI exit code.
enum class ErrorClass { usage = 1, data = 2, numeric = 3 };

class Error : public std::runtime_error {
public:
  Error(ErrorClass cls, std::string kind, const std::string& message)
      : std::runtime_error(message), cls_(cls), kind_(std::move(kind)) {}

  ErrorClass error_class() const noexcept { return cls_; }
  /// Short machine-readable name, e.g. "RankDeficiencyError".
  const std::string& kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(cls_); }

private:
  ErrorClass cls_;
  std::string kind_;
};

#define SPILLOVER_DEFINE_ERROR(Name, Class)                                    \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string& message)                                  \
        : Error(ErrorClass::Class, #Name, message) {}                          \
  };

// Model construction and graph queries
SPILLOVER_DEFINE_ERROR(CycleError, data)
SPILLOVER_DEFINE_ERROR(SimultaneityError, data)
SPILLOVER_DEFINE_ERROR(UnknownVariableError, data)
SPILLOVER_DEFINE_ERROR(ModelSpecError, data)
SPILLOVER_DEFINE_ERROR(PreconditionError, usage)

// Moments and population regression
SPILLOVER_DEFINE_ERROR(SingularityError, numeric)
SPILLOVER_DEFINE_ERROR(CollinearityError, numeric)
SPILLOVER_DEFINE_ERROR(DegenerateExposureError, numeric)

// Estimation
SPILLOVER_DEFINE_ERROR(EmptyDataError, data)
SPILLOVER_DEFINE_ERROR(InvalidDataError, data)
SPILLOVER_DEFINE_ERROR(InsufficientDataError, data)
SPILLOVER_DEFINE_ERROR(RankDeficiencyError, numeric)
SPILLOVER_DEFINE_ERROR(DimensionMismatchError, usage)

// Simulation and I/O
SPILLOVER_DEFINE_ERROR(ConfigError, usage)
SPILLOVER_DEFINE_ERROR(SchemaError, data)
SPILLOVER_DEFINE_ERROR(ParseError, data)
SPILLOVER_DEFINE_ERROR(IoError, data)
SPILLOVER_DEFINE_ERROR(UsageError, usage)

#undef SPILLOVER_DEFINE_ERROR

} // namespace spillover
