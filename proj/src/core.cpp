#include "specdiff/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string_view>

namespace specdiff {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> values, std::string label)
    : values_(std::move(values)), label_(std::move(label)) {
  if (values_.size() < kMinSeriesLength) {
    throw InputError("series '" + label_ + "' has " + std::to_string(values_.size()) +
                     " observations; at least " + std::to_string(kMinSeriesLength) + " required");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InputError("series '" + label_ + "' has a non-finite value at position " +
                       std::to_string(i + 1));
    }
  }
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  if (*lo == *hi) throw InputError("series '" + label_ + "' is constant");
}

double TimeSeries::mean() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

TimeSeries TimeSeries::centered() const {
  const double m = mean();
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [m](double v) { return v - m; });
  return TimeSeries(std::move(out), label_);
}

TimeSeries TimeSeries::relabeled(std::string label) const {
  return TimeSeries(values_, std::move(label));
}

FourierGrid::FourierGrid(std::size_t n1) : n1_(n1) {
  if (n1 < 2) throw std::invalid_argument("FourierGrid needs n1 >= 2");
}

double FourierGrid::frequency(std::size_t k) const {
  if (k < 1 || k > size()) throw std::out_of_range("FourierGrid index out of range");
  return 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n1_);
}

std::vector<double> FourierGrid::frequencies() const {
  std::vector<double> out(size());
  for (std::size_t k = 1; k <= size(); ++k) out[k - 1] = frequency(k);
  return out;
}

ComparisonInput prepare_comparison(const TimeSeries& a, const TimeSeries& b, bool center) {
  const bool swap = b.size() < a.size();
  const TimeSeries& s = swap ? b : a;
  const TimeSeries& l = swap ? a : b;
  if (center) return ComparisonInput{s.centered(), l.centered(), swap};
  return ComparisonInput{s, l, swap};
}

TimeSeries parse_csv(std::istream& in, const std::string& source,
                     const std::optional<ColumnSelector>& column) {
  std::vector<double> values;
  std::optional<std::string> header_label;
  std::optional<std::size_t> index;
  if (column && std::holds_alternative<std::size_t>(*column)) index = std::get<std::size_t>(*column);

  std::string line;
  std::size_t row = 0;
  bool seen_first = false;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view content = trim(line);
    if (content.empty()) continue;
    const auto cells = split_cells(content);

    if (!seen_first) {
      seen_first = true;
      if (column && std::holds_alternative<std::string>(*column)) {
        const auto& name = std::get<std::string>(*column);
        const auto it = std::find(cells.begin(), cells.end(), name);
        if (it == cells.end()) {
          throw InputError(source + ": column '" + name + "' not found in header", row);
        }
        index = static_cast<std::size_t>(it - cells.begin());
        header_label = name;
        continue;
      }
      const std::size_t col = index.value_or(0);
      if (col >= cells.size()) {
        throw InputError(source + ": row " + std::to_string(row) + " has no column " +
                             std::to_string(col),
                         row);
      }
      if (!parse_number(cells[col])) {
        header_label = std::string(cells[col]);
        index = col;
        continue;
      }
    }

    const std::size_t col = index.value_or(0);
    if (col >= cells.size()) {
      throw InputError(source + ": row " + std::to_string(row) + " has no column " + std::to_string(col),
                       row);
    }
    const auto value = parse_number(cells[col]);
    if (!value) {
      throw InputError(source + ": non-numeric cell '" + std::string(cells[col]) + "' at row " +
                           std::to_string(row),
                       row);
    }
    if (!std::isfinite(*value)) {
      throw InputError(source + ": non-finite value at row " + std::to_string(row), row);
    }
    values.push_back(*value);
  }

  std::string label = header_label && !header_label->empty()
                          ? *header_label
                          : std::filesystem::path(source).stem().string();
  if (values.size() < kMinSeriesLength) {
    throw InputError(source + ": " + std::to_string(values.size()) + " numeric rows; at least " +
                     std::to_string(kMinSeriesLength) + " required");
  }
  try {
    return TimeSeries(std::move(values), std::move(label));
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
}

TimeSeries load_csv(const std::filesystem::path& path, const std::optional<ColumnSelector>& column) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open file");
  return parse_csv(in, path.string(), column);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, std::span<const double> values,
               const std::optional<std::string>& header) {
  if (header) out << *header << '\n';
  for (double v : values) out << format_double(v) << '\n';
}

}  // namespace specdiff
