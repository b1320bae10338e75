#include "specdiff/inference.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace specdiff::inference {

namespace {

using spectral::GridSpectra;

constexpr double kPi = std::numbers::pi;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

double quadratic_form(const Matrix3& m, const std::array<double, 3>& g) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) acc += g[i] * m[i][j] * g[j];
  }
  return acc;
}

}  // namespace

std::string to_string(Method method) { return method == Method::equality ? "equality" : "precise"; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile needs 0 < p < 1");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

DStatistics d_statistics(const GridSpectra& s) {
  const std::size_t K = s.size();
  const double n1 = static_cast<double>(s.n1);
  DStatistics out;
  out.n1 = s.n1;
  out.n2 = s.n2;
  for (std::size_t k = 0; k < K; ++k) {
    out.d1 += s.i1[k] * s.i1[k];
    out.d2 += s.i2[k] * s.i2[k];
  }
  // Staggered: I1 at lambda_k against I2 at lambda_{k+1}.
  for (std::size_t k = 0; k + 1 < K; ++k) out.d12 += s.i1[k] * s.i2[k + 1];
  out.d1 /= n1;
  out.d2 /= n1;
  out.d12 /= n1;
  out.d_squared = (out.d1 + out.d2) / 2.0 - 2.0 * out.d12;
  const double total = out.d1 + out.d2;
  if (!(total > 0.0)) throw DegenerateInput("both spectra vanish (D1 + D2 = 0); R^2 is undefined");
  out.r_squared = 2.0 * out.d_squared / total;
  return out;
}

DStatistics d_statistics(const ComparisonInput& input) { return d_statistics(GridSpectra::compute(input)); }

double sigma2_h0(const GridSpectra& s, double calibration) {
  const std::size_t K = s.size();
  const double n1 = static_cast<double>(s.n1);
  double fourth = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double a = s.i1[k] * s.i1[k];
    const double b = s.i2[k] * s.i2[k];
    fourth += a * a + b * b;
  }
  std::complex<double> cross = 0.0;
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const std::complex<double> next = std::conj(s.i12[k + 1]);  // I21 = conj(I12)
    cross += s.i12[k] * s.i12[k] * next * next;
  }
  const double raw = fourth / (4.0 * n1) + cross.real() / (2.0 * n1);
  return std::max(0.0, calibration * raw);
}

double sigma2_h0(const ComparisonInput& input, double calibration) {
  return sigma2_h0(GridSpectra::compute(input), calibration);
}

SpectralIntegrals spectral_integrals(const GridSpectra& s) {
  const std::size_t K = s.size();
  SpectralIntegrals out;
  if (K < 4) return out;
  const auto& a = s.i1;
  const auto& b = s.i2;
  const auto& c = s.i12;
  // Re(I12(l) I21(l')) for adjacent l, l' estimates |f12|^2.
  const auto cc = [&](std::size_t i, std::size_t j) { return (c[i] * std::conj(c[j])).real(); };
  for (std::size_t k = 0; k + 3 < K; ++k) {
    out.f11_4 += a[k] * a[k + 1] * a[k + 2] * a[k + 3];
    out.f11_3_f22 += a[k] * a[k + 1] * a[k + 2] * b[k + 3];
    out.f11_2_c2 += a[k] * a[k + 1] * cc(k + 2, k + 3);
    out.c4 += (c[k] * std::conj(c[k + 1]) * c[k + 2] * std::conj(c[k + 3])).real();
    out.f11_c2_f22 += a[k] * cc(k + 1, k + 2) * b[k + 3];
    out.f11_2_f22_2 += a[k] * a[k + 1] * b[k + 2] * b[k + 3];
    out.f11_f22_3 += a[k] * b[k + 1] * b[k + 2] * b[k + 3];
    out.f22_4 += b[k] * b[k + 1] * b[k + 2] * b[k + 3];
    out.f22_2_c2 += b[k] * b[k + 1] * cc(k + 2, k + 3);
  }
  // (1/n1) sum_k g(lambda_k) over k = 1..n1/2 approximates (1/4pi) int_{-pi}^{pi} g.
  const double scale = 4.0 * kPi / static_cast<double>(s.n1);
  for (double* v : {&out.f11_4, &out.f11_3_f22, &out.f11_2_c2, &out.c4, &out.f11_c2_f22, &out.f11_2_f22_2,
                    &out.f11_f22_3, &out.f22_4, &out.f22_2_c2}) {
    *v *= scale;
  }
  return out;
}

Matrix3 covariance_matrix(const SpectralIntegrals& in) {
  Matrix3 m{};
  m[0][0] = 5.0 * in.f11_4;
  m[0][1] = in.f11_3_f22 + in.f11_2_c2;
  m[0][2] = in.c4 + 4.0 * in.f11_c2_f22;
  m[1][1] = 0.75 * in.f11_2_f22_2 + 0.5 * in.f11_c2_f22;
  m[1][2] = in.f11_f22_3 + in.f22_2_c2;
  m[2][2] = 5.0 * in.f22_4;
  m[1][0] = m[0][1];
  m[2][0] = m[0][2];
  m[2][1] = m[1][2];
  return m;
}

double r2_value(double d1, double d12, double d2) { return 1.0 - 4.0 * d12 / (d1 + d2); }

std::array<double, 3> r2_gradient(double d1, double d12, double d2) {
  const double total = d1 + d2;
  const double side = 4.0 * d12 / (total * total);
  return {side, -4.0 / total, side};
}

VarianceEstimates sigma2_alternative(const GridSpectra& s) {
  const DStatistics stats = d_statistics(s);
  VarianceEstimates out;
  out.sigma2_h0 = sigma2_h0(s);
  out.sigma_hat = covariance_matrix(spectral_integrals(s));
  // sqrt(n1) (D1_hat, D12_hat, D2_hat) has limiting covariance Sigma / pi.
  out.sigma2_alt = std::max(0.0, quadratic_form(out.sigma_hat, {0.5, -2.0, 0.5}) / kPi);
  out.sigma2_r =
      std::max(0.0, quadratic_form(out.sigma_hat, r2_gradient(stats.d1, stats.d12, stats.d2)) / kPi);
  return out;
}

VarianceEstimates sigma2_alternative(const ComparisonInput& input) {
  return sigma2_alternative(GridSpectra::compute(input));
}

TestResult equality_test(const GridSpectra& s, double alpha, double calibration) {
  check_alpha(alpha);
  const double variance = sigma2_h0(s, calibration);
  if (!(variance > 0.0)) throw DegenerateInput("null variance estimate is zero; test undefined");
  const DStatistics stats = d_statistics(s);
  TestResult out;
  out.method = Method::equality;
  out.alpha = alpha;
  out.variance_used = variance;
  out.statistic = std::sqrt(static_cast<double>(s.n1)) * stats.d_squared / std::sqrt(variance);
  out.p_value = normal_sf(out.statistic);
  out.reject = out.statistic > normal_quantile(1.0 - alpha);
  return out;
}

TestResult equality_test(const ComparisonInput& input, double alpha) {
  return equality_test(GridSpectra::compute(input), alpha);
}

TestResult precise_test(const GridSpectra& s, double epsilon, double alpha) {
  check_alpha(alpha);
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const DStatistics stats = d_statistics(s);
  const VarianceEstimates var = sigma2_alternative(s);
  const double sigma = std::sqrt(var.sigma2_r);
  const double root_n = std::sqrt(static_cast<double>(s.n1));
  const double gap = stats.r_squared - epsilon;

  TestResult out;
  out.method = Method::precise;
  out.alpha = alpha;
  out.epsilon = epsilon;
  out.variance_used = var.sigma2_r;
  out.reject = gap < sigma / root_n * normal_quantile(alpha);
  if (sigma > 0.0) {
    out.statistic = root_n * gap / sigma;
  } else {
    constexpr double inf = std::numeric_limits<double>::infinity();
    out.statistic = gap < 0.0 ? -inf : (gap > 0.0 ? inf : 0.0);
  }
  out.p_value = normal_cdf(out.statistic);
  return out;
}

TestResult precise_test(const ComparisonInput& input, double epsilon, double alpha) {
  return precise_test(GridSpectra::compute(input), epsilon, alpha);
}

Interval confidence_interval_d2(const GridSpectra& s, double alpha) {
  check_alpha(alpha);
  const DStatistics stats = d_statistics(s);
  const VarianceEstimates var = sigma2_alternative(s);
  if (!(var.sigma2_alt > 0.0)) throw DegenerateInput("alternative variance estimate is zero");
  const double half = normal_quantile(1.0 - alpha / 2.0) * std::sqrt(var.sigma2_alt / static_cast<double>(s.n1));
  return {std::max(0.0, stats.d_squared - half), stats.d_squared + half};
}

Interval confidence_interval_d2(const ComparisonInput& input, double alpha) {
  return confidence_interval_d2(GridSpectra::compute(input), alpha);
}

Comparison compare(const ComparisonInput& input, double alpha, std::optional<double> epsilon) {
  const GridSpectra spectra = GridSpectra::compute(input);
  Comparison out;
  out.swapped = input.swapped;
  out.stats = d_statistics(spectra);
  out.variances = sigma2_alternative(spectra);
  out.equality = equality_test(spectra, alpha);
  if (epsilon) out.precise = precise_test(spectra, *epsilon, alpha);
  if (out.variances.sigma2_alt > 0.0) out.ci_d2 = confidence_interval_d2(spectra, alpha);
  return out;
}

}  // namespace specdiff::inference
