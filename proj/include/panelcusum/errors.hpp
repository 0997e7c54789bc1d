#ifndef PANELCUSUM_ERRORS_HPP_
#define PANELCUSUM_ERRORS_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace panelcusum {

// Base class for every error raised by the library. `kind()` is a stable
// identifier used by the CLI when reporting failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string &what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string &kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class EmptyPanel : public Error {
 public:
  EmptyPanel() : Error("EmptyPanel", "panel has no rows") {}
};

class TooFewColumns : public Error {
 public:
  explicit TooFewColumns(std::size_t columns)
      : Error("TooFewColumns", "panel has " + std::to_string(columns) +
                                   " time columns, at least 3 required"),
        columns_(columns) {}

  std::size_t columns() const noexcept { return columns_; }

 private:
  std::size_t columns_;
};

class NonFinite : public Error {
 public:
  NonFinite(std::size_t row, std::size_t col)
      : Error("NonFinite", "non-finite value at row " + std::to_string(row) +
                               ", column " + std::to_string(col)),
        row_(row), col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class NonPositivePrice : public Error {
 public:
  NonPositivePrice(std::size_t row, std::size_t col)
      : Error("NonPositivePrice", "non-positive price at row " +
                                      std::to_string(row) + ", column " +
                                      std::to_string(col)),
        row_(row), col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class LagTooLarge : public Error {
 public:
  LagTooLarge(std::size_t lag, std::size_t length)
      : Error("LagTooLarge", "lag " + std::to_string(lag) +
                                 " is not below series length " +
                                 std::to_string(length)) {}
};

// Squared residuals of a series are constant, so no variance normalizer
// exists. `row()` names the panel unit when known.
class DegenerateSeries : public Error {
 public:
  explicit DegenerateSeries(std::optional<std::size_t> row = std::nullopt)
      : Error("DegenerateSeries",
              row ? "squared residuals of panel row " + std::to_string(*row) +
                        " are constant"
                  : std::string("squared residuals are constant")),
        row_(row) {}

  std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  std::optional<std::size_t> row_;
};

class OutOfRange : public Error {
 public:
  explicit OutOfRange(const std::string &what) : Error("OutOfRange", what) {}
};

class NotFactorable : public Error {
 public:
  explicit NotFactorable(const std::string &what)
      : Error("NotFactorable", what) {}
};

class InvalidSpec : public Error {
 public:
  explicit InvalidSpec(const std::string &what) : Error("InvalidSpec", what) {}
};

class StudyAborted : public Error {
 public:
  StudyAborted(std::size_t failures, std::size_t replications)
      : Error("StudyAborted",
              std::to_string(failures) + " of " +
                  std::to_string(replications) +
                  " replications failed (limit is 1%)") {}
};

}  // namespace panelcusum

#endif  // PANELCUSUM_ERRORS_HPP_
