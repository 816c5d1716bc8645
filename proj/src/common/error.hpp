#pragma once

#include <stdexcept>
#include <string>

namespace trustpcl {

enum class ErrorCode {
  kConfig = 1,
  kNumeric = 2,
  kShape = 3,
  kUsage = 4,
  kDomain = 5,
  kInfeasible = 6,
  kInsufficientData = 7,
  kIo = 8,
  kVerification = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorCode::kConfig, m) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& m) : Error(ErrorCode::kNumeric, m) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& m) : Error(ErrorCode::kShape, m) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& m) : Error(ErrorCode::kUsage, m) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error(ErrorCode::kDomain, m) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& m) : Error(ErrorCode::kInfeasible, m) {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& m) : Error(ErrorCode::kInsufficientData, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCode::kIo, m) {}
};

}  // namespace trustpcl
