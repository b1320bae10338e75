#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "specdiff/core.hpp"

namespace specdiff::spectral {

// All transforms use the 1-based time index t = 1..n:
//   d(lambda) = sum_t x_t exp(-i lambda t).
// The phase matters for cross-periodograms.

/// I(lambda) = |d(lambda)|^2 / (2 pi n), by direct summation.
[[nodiscard]] double periodogram(std::span<const double> x, double lambda);
[[nodiscard]] inline double periodogram(const TimeSeries& x, double lambda) {
  return periodogram(x.values(), lambda);
}

/// I12(lambda) = d1(lambda) conj(d2(lambda)) / (2 pi sqrt(n1 n2)).
[[nodiscard]] std::complex<double> cross_periodogram(std::span<const double> x1,
                                                     std::span<const double> x2, double lambda);

/// How grid transforms are evaluated.
///   reference: direct summation against an exact twiddle table, O(K n).
///   fast:      fold the series modulo n1, then one length-n1 real FFT.
/// Both give d(2 pi k / n1) for any series length; they agree to rounding.
enum class Evaluation { reference, fast };

/// d(lambda_k) for k = 1..grid.size(). x may be longer or shorter than grid.n1().
[[nodiscard]] std::vector<std::complex<double>> transform_on_grid(std::span<const double> x,
                                                                  const FourierGrid& grid,
                                                                  Evaluation eval = Evaluation::fast);

struct PeriodogramValue {
  double lambda = 0.0;
  double value = 0.0;
};

[[nodiscard]] std::vector<PeriodogramValue> periodogram_on_grid(std::span<const double> x,
                                                                const FourierGrid& grid,
                                                                Evaluation eval = Evaluation::fast);
[[nodiscard]] inline std::vector<PeriodogramValue> periodogram_on_grid(
    const TimeSeries& x, const FourierGrid& grid, Evaluation eval = Evaluation::fast) {
  return periodogram_on_grid(x.values(), grid, eval);
}

/// sum_{k=0}^{n-1} I(2 pi k / n) over the series' own full grid. Equals
/// sum_t x_t^2 / (2 pi) (Parseval); kept as a check helper.
[[nodiscard]] double full_grid_periodogram_sum(std::span<const double> x);

/// Periodogram and cross-periodogram values of a comparison pair on the
/// shorter series' grid. Computed once and shared by all estimators.
struct GridSpectra {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::vector<double> i1;                 ///< I1(lambda_k), k = 1..K
  std::vector<double> i2;                 ///< I2(lambda_k), long series on the short grid
  std::vector<std::complex<double>> i12;  ///< I12(lambda_k)

  [[nodiscard]] std::size_t size() const noexcept { return i1.size(); }

  /// Raw spans, no validation beyond 2 <= shorter.size() <= longer.size().
  [[nodiscard]] static GridSpectra compute(std::span<const double> shorter, std::span<const double> longer,
                                           Evaluation eval = Evaluation::fast);
  [[nodiscard]] static GridSpectra compute(const ComparisonInput& input,
                                           Evaluation eval = Evaluation::fast) {
    return compute(input.shorter.values(), input.longer.values(), eval);
  }
};

}  // namespace specdiff::spectral
