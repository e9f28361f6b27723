#pragma once

#include <stdexcept>
#include <string>

namespace weldgeom {

// Base for every error raised by the library. Callers that only care about
// "something went wrong" catch this; the subclasses exist for tests and for the
// CLI to pick exit messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or invalid input data (CSV rows, non-positive values, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Dimension or scheme mismatch between arguments.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Least-squares design matrix without full column rank.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& message, std::string column)
      : Error(message), column_(std::move(column)) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

// Training diverged (non-finite loss) or could not be set up.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& message, int epoch)
      : Error(message), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

#define WELDGEOM_REQUIRE(cond, ExcType, msg) \
  do {                                       \
    if (!(cond)) throw ExcType(msg);         \
  } while (0)

}  // namespace weldgeom
