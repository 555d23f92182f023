#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flowallo {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)), detail_(detail) {}

  /// Short error name such as "SingularNetwork".
  const std::string& kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  std::string kind_;
  std::string detail_;
};

// Bad input data or configuration. The CLI maps these to exit code 1.
class InputError : public Error {
public:
  using Error::Error;
};

// A computation could not produce a meaningful number. Exit code 2.
class NumericalError : public Error {
public:
  using Error::Error;
};

class ParseError : public InputError {
public:
  ParseError(std::size_t row, std::string column, std::string reason)
      : InputError("ParseError", "row " + std::to_string(row) + ", " + column + ": " + reason),
        row_(row), column_(std::move(column)), reason_(std::move(reason)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }
  const std::string& reason() const noexcept { return reason_; }

private:
  std::size_t row_;
  std::string column_;
  std::string reason_;
};

class InvalidValue : public InputError {
public:
  explicit InvalidValue(const std::string& what) : InputError("InvalidValue", what) {}
};

class EmptySelection : public InputError {
public:
  explicit EmptySelection(const std::string& what) : InputError("EmptySelection", what) {}
};

class NegativeFlow : public InputError {
public:
  explicit NegativeFlow(const std::string& what) : InputError("NegativeFlow", what) {}
};

class DuplicateCountry : public InputError {
public:
  explicit DuplicateCountry(const std::string& code)
      : InputError("DuplicateCountry", code), code_(code) {}
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

class NotATree : public InputError {
public:
  explicit NotATree(const std::string& what) : InputError("NotATree", what) {}
};

class BadSpec : public InputError {
public:
  explicit BadSpec(const std::string& what) : InputError("BadSpec", what) {}
};

class NoExports : public InputError {
public:
  explicit NoExports(const std::string& country) : InputError("NoExports", country) {}
};

class NoMarket : public InputError {
public:
  explicit NoMarket(const std::string& product) : InputError("NoMarket", product) {}
};

class SingularNetwork : public NumericalError {
public:
  explicit SingularNetwork(const std::string& what) : NumericalError("SingularNetwork", what) {}
};

class TooFewPoints : public NumericalError {
public:
  explicit TooFewPoints(const std::string& what) : NumericalError("TooFewPoints", what) {}
};

class DegenerateFit : public NumericalError {
public:
  explicit DegenerateFit(const std::string& what) : NumericalError("DegenerateFit", what) {}
};

class AllZero : public NumericalError {
public:
  explicit AllZero(const std::string& what) : NumericalError("AllZero", what) {}
};

class ZeroVariance : public NumericalError {
public:
  explicit ZeroVariance(const std::string& what) : NumericalError("ZeroVariance", what) {}
};

}  // namespace flowallo
