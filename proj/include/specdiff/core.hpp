#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace specdiff {

/// Shortest series accepted anywhere in the library. Below this the shared
/// Fourier grid has fewer than four points.
inline constexpr std::size_t kMinSeriesLength = 8;

/// Malformed user input: unreadable files, bad cells, invalid series.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what, std::optional<std::size_t> row = std::nullopt)
      : std::runtime_error(what), row_(row) {}

  /// 1-based line number in the source file, when the error is tied to one.
  [[nodiscard]] std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  std::optional<std::size_t> row_;
};

/// An estimate is undefined for the given data (zero spectra, zero variance).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A labeled, finite, non-constant sequence of at least kMinSeriesLength
/// observations. Immutable after construction.
class TimeSeries {
 public:
  /// Throws InputError if any invariant is violated.
  TimeSeries(std::vector<double> values, std::string label);

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] const std::string& label() const noexcept { return label_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  [[nodiscard]] double mean() const noexcept;

  /// Copy with the sample mean subtracted.
  [[nodiscard]] TimeSeries centered() const;
  [[nodiscard]] TimeSeries relabeled(std::string label) const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> values_;
  std::string label_;
};

/// Frequencies 2*pi*k/n1 for k = 1..floor(n1/2): the grid of the shorter
/// series, on which both periodograms are evaluated.
class FourierGrid {
 public:
  /// Requires n1 >= 2 so that the grid is non-empty.
  explicit FourierGrid(std::size_t n1);

  [[nodiscard]] std::size_t n1() const noexcept { return n1_; }
  [[nodiscard]] std::size_t size() const noexcept { return n1_ / 2; }

  /// k is 1-based, 1 <= k <= size().
  [[nodiscard]] double frequency(std::size_t k) const;
  [[nodiscard]] std::vector<double> frequencies() const;

  friend bool operator==(const FourierGrid&, const FourierGrid&) = default;

 private:
  std::size_t n1_;
};

/// Two series ordered so that shorter.size() <= longer.size().
struct ComparisonInput {
  TimeSeries shorter;
  TimeSeries longer;
  bool swapped = false;  ///< true when the caller's second argument became `shorter`

  [[nodiscard]] std::size_t n1() const noexcept { return shorter.size(); }
  [[nodiscard]] std::size_t n2() const noexcept { return longer.size(); }
  /// q = n2 / n1 >= 1.
  [[nodiscard]] double ratio() const noexcept {
    return static_cast<double>(n2()) / static_cast<double>(n1());
  }
};

/// Orders the pair by length (ties keep caller order) and optionally
/// subtracts each series' own sample mean.
[[nodiscard]] ComparisonInput prepare_comparison(const TimeSeries& a, const TimeSeries& b,
                                                 bool center = true);

/// Column selector for load_csv: zero-based index or header name.
using ColumnSelector = std::variant<std::size_t, std::string>;

/// Reads one numeric column from a comma-separated file. Blank lines and a
/// single header row are tolerated. The label is the header name of the
/// selected column when a header is present, otherwise the file stem.
[[nodiscard]] TimeSeries load_csv(const std::filesystem::path& path,
                                  const std::optional<ColumnSelector>& column = std::nullopt);

/// Parses CSV text; `source` names the input in error messages and supplies
/// the fallback label.
[[nodiscard]] TimeSeries parse_csv(std::istream& in, const std::string& source,
                                   const std::optional<ColumnSelector>& column = std::nullopt);

/// Writes one value per line, shortest round-trip formatting, optional header.
void write_csv(std::ostream& out, std::span<const double> values,
               const std::optional<std::string>& header = std::nullopt);

/// Shortest decimal representation that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

}  // namespace specdiff
