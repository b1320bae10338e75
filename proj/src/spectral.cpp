#include "specdiff/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace specdiff::spectral {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::complex<double> dft_direct(std::span<const double> x, double lambda) {
  std::complex<double> acc = 0.0;
  for (std::size_t t = 1; t <= x.size(); ++t) {
    acc += x[t - 1] * std::polar(1.0, -lambda * static_cast<double>(t));
  }
  return acc;
}

// FFTW planning is not thread-safe; executing a finished plan on new arrays is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan r2c(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> in(n);
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                          reinterpret_cast<fftw_complex*>(out.data()),
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("FFTW failed to create a plan");
    plans_.emplace(n, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::size_t, fftw_plan> plans_;
};

std::vector<std::complex<double>> transform_reference(std::span<const double> x, const FourierGrid& grid) {
  const std::size_t n1 = grid.n1();
  std::vector<std::complex<double>> twiddle(n1);
  for (std::size_t j = 0; j < n1; ++j) {
    // Exact argument reduction: exp(-i 2 pi k t / n1) depends on k t mod n1 only.
    twiddle[j] = std::polar(1.0, -kTwoPi * static_cast<double>(j) / static_cast<double>(n1));
  }
  std::vector<std::complex<double>> out(grid.size());
  for (std::size_t k = 1; k <= grid.size(); ++k) {
    std::complex<double> acc = 0.0;
    std::size_t phase = k % n1;  // k * t mod n1 at t = 1
    for (std::size_t t = 1; t <= x.size(); ++t) {
      acc += x[t - 1] * twiddle[phase];
      phase += k;
      if (phase >= n1) phase -= n1;
    }
    out[k - 1] = acc;
  }
  return out;
}

std::vector<std::complex<double>> transform_fast(std::span<const double> x, const FourierGrid& grid) {
  const std::size_t n1 = grid.n1();
  std::vector<double> folded(n1, 0.0);
  std::size_t slot = 1 % n1;
  for (std::size_t t = 1; t <= x.size(); ++t) {
    folded[slot] += x[t - 1];
    if (++slot == n1) slot = 0;
  }
  std::vector<std::complex<double>> spectrum(n1 / 2 + 1);
  fftw_execute_dft_r2c(PlanCache::instance().r2c(n1), folded.data(),
                       reinterpret_cast<fftw_complex*>(spectrum.data()));
  return {spectrum.begin() + 1, spectrum.begin() + 1 + static_cast<std::ptrdiff_t>(grid.size())};
}

}  // namespace

double periodogram(std::span<const double> x, double lambda) {
  if (x.empty()) return 0.0;
  return std::norm(dft_direct(x, lambda)) / (kTwoPi * static_cast<double>(x.size()));
}

std::complex<double> cross_periodogram(std::span<const double> x1, std::span<const double> x2,
                                       double lambda) {
  if (x1.empty() || x2.empty()) return 0.0;
  const double scale = kTwoPi * std::sqrt(static_cast<double>(x1.size()) * static_cast<double>(x2.size()));
  return dft_direct(x1, lambda) * std::conj(dft_direct(x2, lambda)) / scale;
}

std::vector<std::complex<double>> transform_on_grid(std::span<const double> x, const FourierGrid& grid,
                                                    Evaluation eval) {
  return eval == Evaluation::reference ? transform_reference(x, grid) : transform_fast(x, grid);
}

std::vector<PeriodogramValue> periodogram_on_grid(std::span<const double> x, const FourierGrid& grid,
                                                  Evaluation eval) {
  const auto d = transform_on_grid(x, grid, eval);
  const double scale = kTwoPi * static_cast<double>(x.size());
  std::vector<PeriodogramValue> out(d.size());
  for (std::size_t k = 1; k <= d.size(); ++k) {
    out[k - 1] = {grid.frequency(k), x.empty() ? 0.0 : std::norm(d[k - 1]) / scale};
  }
  return out;
}

double full_grid_periodogram_sum(std::span<const double> x) {
  const std::size_t n = x.size();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += periodogram(x, kTwoPi * static_cast<double>(k) / static_cast<double>(n));
  }
  return sum;
}

GridSpectra GridSpectra::compute(std::span<const double> shorter, std::span<const double> longer,
                                 Evaluation eval) {
  if (shorter.size() < 2 || longer.size() < shorter.size()) {
    throw std::invalid_argument("GridSpectra needs 2 <= n1 <= n2");
  }
  const FourierGrid grid(shorter.size());
  const auto d1 = transform_on_grid(shorter, grid, eval);
  const auto d2 = transform_on_grid(longer, grid, eval);

  GridSpectra out;
  out.n1 = shorter.size();
  out.n2 = longer.size();
  const double n1 = static_cast<double>(out.n1);
  const double n2 = static_cast<double>(out.n2);
  const double cross_scale = kTwoPi * std::sqrt(n1 * n2);
  out.i1.resize(grid.size());
  out.i2.resize(grid.size());
  out.i12.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.i1[k] = std::norm(d1[k]) / (kTwoPi * n1);
    out.i2[k] = std::norm(d2[k]) / (kTwoPi * n2);
    out.i12[k] = d1[k] * std::conj(d2[k]) / cross_scale;
  }
  return out;
}

}  // namespace specdiff::spectral
