#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>

#include "specdiff/core.hpp"
#include "specdiff/spectral.hpp"

namespace specdiff::inference {

/// Scale applied to the raw null-variance sum. The raw sum converges to twice
/// the null variance (E I^4 = 24 f^4 gives (3/pi) int f^4, not (3/2pi) int f^4);
/// pinned by `specdiff calibrate` (see data/calibration_log.txt).
inline constexpr double kSigmaH0Calibration = 0.5;

/// Riemann-sum estimates of integrated squared and cross spectra.
///   d1  -> (1/2pi) int f11^2,  d2 -> (1/2pi) int f22^2,  d12 -> (1/4pi) int f11 f22.
struct DStatistics {
  double d1 = 0.0;
  double d2 = 0.0;
  double d12 = 0.0;
  double d_squared = 0.0;  ///< (d1 + d2)/2 - 2 d12; may be negative
  double r_squared = 0.0;  ///< 2 d_squared / (d1 + d2)
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// Symmetric 3x3 matrix in the order (D1, D12, D2).
using Matrix3 = std::array<std::array<double, 3>, 3>;

struct VarianceEstimates {
  double sigma2_h0 = 0.0;   ///< null variance of sqrt(n1) D^2 (calibrated)
  double sigma2_alt = 0.0;  ///< variance of sqrt(n1) D^2 under the alternative
  double sigma2_r = 0.0;    ///< variance of sqrt(n1) R^2 (delta method)
  Matrix3 sigma_hat{};      ///< plug-in Sigma_ij with the limit theorem's constants
};

enum class Method { equality, precise };

[[nodiscard]] std::string to_string(Method method);

struct TestResult {
  Method method = Method::equality;
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  std::optional<double> epsilon;  ///< precise test only
  double variance_used = 0.0;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// --- normal distribution --------------------------------------------------

[[nodiscard]] double normal_cdf(double x);
/// Upper tail 1 - Phi(x), without cancellation for large x.
[[nodiscard]] double normal_sf(double x);
/// Throws std::invalid_argument unless 0 < p < 1.
[[nodiscard]] double normal_quantile(double p);

// --- estimators -----------------------------------------------------------

/// Throws DegenerateInput when d1 + d2 == 0.
[[nodiscard]] DStatistics d_statistics(const spectral::GridSpectra& spectra);
[[nodiscard]] DStatistics d_statistics(const ComparisonInput& input);

/// calibration * [ (1/4n1) sum (I1^4 + I2^4) + Re (1/2n1) sum I12^2(k) I21^2(k+1) ],
/// clamped at zero. calibration = 1 gives the raw sum.
[[nodiscard]] double sigma2_h0(const spectral::GridSpectra& spectra,
                               double calibration = kSigmaH0Calibration);
[[nodiscard]] double sigma2_h0(const ComparisonInput& input, double calibration = kSigmaH0Calibration);

/// Integrals entering the covariance of (D1, D12, D2), each estimated over
/// [-pi, pi] from products of periodogram factors at distinct consecutive
/// grid frequencies.
struct SpectralIntegrals {
  double f11_4 = 0.0;        ///< int f11^4
  double f11_3_f22 = 0.0;    ///< int f11^3 f22
  double f11_2_c2 = 0.0;     ///< int f11^2 |f12|^2
  double c4 = 0.0;           ///< int f12^2 f21^2
  double f11_c2_f22 = 0.0;   ///< int f11 |f12|^2 f22
  double f11_2_f22_2 = 0.0;  ///< int f11^2 f22^2
  double f11_f22_3 = 0.0;    ///< int f11 f22^3
  double f22_4 = 0.0;        ///< int f22^4
  double f22_2_c2 = 0.0;     ///< int f22^2 |f12|^2
};

[[nodiscard]] SpectralIntegrals spectral_integrals(const spectral::GridSpectra& spectra);

/// Sigma_ij assembled from the integrals with the limit theorem's constants.
[[nodiscard]] Matrix3 covariance_matrix(const SpectralIntegrals& integrals);

/// Gradient of R^2 = 1 - 4 D12 / (D1 + D2) with respect to (D1, D12, D2).
[[nodiscard]] std::array<double, 3> r2_gradient(double d1, double d12, double d2);
[[nodiscard]] double r2_value(double d1, double d12, double d2);

/// Throws DegenerateInput when both series vanish.
[[nodiscard]] VarianceEstimates sigma2_alternative(const spectral::GridSpectra& spectra);
[[nodiscard]] VarianceEstimates sigma2_alternative(const ComparisonInput& input);

// --- tests ----------------------------------------------------------------

/// Reject equal spectra when sqrt(n1) D^2 / sigma_h0 > u_{1-alpha}.
/// Throws DegenerateInput when the null variance estimate is zero.
[[nodiscard]] TestResult equality_test(const spectral::GridSpectra& spectra, double alpha,
                                       double calibration = kSigmaH0Calibration);
[[nodiscard]] TestResult equality_test(const ComparisonInput& input, double alpha);

/// H0: R^2 > epsilon against R^2 <= epsilon. Rejection affirms approximate equality.
[[nodiscard]] TestResult precise_test(const spectral::GridSpectra& spectra, double epsilon, double alpha);
[[nodiscard]] TestResult precise_test(const ComparisonInput& input, double epsilon, double alpha);

/// D^2 +- u_{1-alpha/2} sigma_alt / sqrt(n1), lower end clamped at zero.
[[nodiscard]] Interval confidence_interval_d2(const spectral::GridSpectra& spectra, double alpha);
[[nodiscard]] Interval confidence_interval_d2(const ComparisonInput& input, double alpha);

/// Everything computed for one pair, from a single set of grid spectra.
struct Comparison {
  DStatistics stats;
  VarianceEstimates variances;
  TestResult equality;
  std::optional<TestResult> precise;
  std::optional<Interval> ci_d2;  ///< absent when the alternative variance is zero
  bool swapped = false;
};

[[nodiscard]] Comparison compare(const ComparisonInput& input, double alpha,
                                 std::optional<double> epsilon = std::nullopt);

}  // namespace specdiff::inference
