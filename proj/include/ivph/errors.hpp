#pragma once

#include <stdexcept>
#include <string>

namespace ivph {

// Coarse categories used by the C API / CLI exit codes.
enum class ErrorCategory : int {
  config = 2,
  data = 3,
  numeric = 4,
  internal = 5,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCategory cat, std::string msg)
    : std::runtime_error(std::move(msg)), category_(cat) {}
  ErrorCategory category() const { return category_; }

private:
  ErrorCategory category_;
};

struct ConfigError final : Error {
  explicit ConfigError(std::string msg) : Error(ErrorCategory::config, std::move(msg)) {}
};

// Data ingestion problems.
struct ParseError final : Error {
  ParseError(std::size_t line, std::string msg)
    : Error(ErrorCategory::data, "line " + std::to_string(line) + ": " + msg), line(line) {}
  std::size_t line;
};
struct SchemaError final : Error {
  explicit SchemaError(std::string msg) : Error(ErrorCategory::data, std::move(msg)) {}
};
struct EmptyFileError final : Error {
  explicit EmptyFileError(std::string msg) : Error(ErrorCategory::data, std::move(msg)) {}
};
struct EmptyCellError final : Error {
  explicit EmptyCellError(std::string msg) : Error(ErrorCategory::data, std::move(msg)) {}
};
struct InsufficientDataError final : Error {
  explicit InsufficientDataError(std::string msg) : Error(ErrorCategory::data, std::move(msg)) {}
};

// Numerical / estimation failures.
struct InvalidKernelError final : Error {
  explicit InvalidKernelError(std::string msg) : Error(ErrorCategory::numeric, std::move(msg)) {}
};
struct ZeroMassError final : Error {
  explicit ZeroMassError(std::string msg) : Error(ErrorCategory::numeric, std::move(msg)) {}
};
struct SaturatedError final : Error {
  SaturatedError(int level, std::string msg)
    : Error(ErrorCategory::numeric, std::move(msg)), level(level) {}
  int level;  // 0-based treatment level whose pseudo-inverse saturated
};
struct NoConvergenceError final : Error {
  explicit NoConvergenceError(std::string msg) : Error(ErrorCategory::numeric, std::move(msg)) {}
};
struct CollinearError final : Error {
  explicit CollinearError(std::string msg) : Error(ErrorCategory::numeric, std::move(msg)) {}
};
struct NoEventsError final : Error {
  explicit NoEventsError(std::string msg) : Error(ErrorCategory::numeric, std::move(msg)) {}
};
struct DegenerateSdError final : Error {
  explicit DegenerateSdError(std::string msg) : Error(ErrorCategory::numeric, std::move(msg)) {}
};
struct SaturationBudgetError final : Error {
  explicit SaturationBudgetError(std::string msg) : Error(ErrorCategory::numeric, std::move(msg)) {}
};
struct FailureBudgetError final : Error {
  explicit FailureBudgetError(std::string msg) : Error(ErrorCategory::numeric, std::move(msg)) {}
};

}  // namespace ivph
