#pragma once

#include <stdexcept>
#include <string>

namespace elsis {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problems with user-supplied data or configuration (CLI exit code 2).
struct DataError : Error {
  using Error::Error;
};

struct MissingColumn : DataError {
  explicit MissingColumn(const std::string& name)
      : DataError("missing column: " + name) {}
};

struct NonNumericCell : DataError {
  NonNumericCell(long row, const std::string& column, const std::string& cell)
      : DataError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                  ", column " + column) {}
};

struct RaggedRow : DataError {
  RaggedRow(long row, long got, long expected)
      : DataError("row " + std::to_string(row) + " has " + std::to_string(got) +
                  " fields, expected " + std::to_string(expected)) {}
};

struct ConstantColumn : DataError {
  explicit ConstantColumn(long column_index)
      : DataError("column " + std::to_string(column_index) +
                  " has zero sample variance"),
        column(column_index) {}
  long column;
};

struct InvalidCovariance : DataError {
  using DataError::DataError;
};

struct DimensionMismatch : DataError {
  using DataError::DataError;
};

// Numerical failures (CLI exit code 3).
struct NumericError : Error {
  using Error::Error;
};

// The estimating-function values cannot support the statistic (too few
// observations, identical values, collinear components).
struct DegenerateInput : NumericError {
  using NumericError::NumericError;
};

struct DomainViolation : NumericError {
  using NumericError::NumericError;
};

}  // namespace elsis
