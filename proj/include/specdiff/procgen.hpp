#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "specdiff/core.hpp"

namespace specdiff::procgen {

// Model zoo. Defaults are the parameters of the simulation study.

/// X1: X_t = Z_t.
struct WhiteNoise {};

/// X2: X_t = phi X_{t-1} + Z_t, started from state 0 `burn_in` steps early.
struct Ar1 {
  double phi = -0.8;
  std::size_t burn_in = 1000;
};

/// X3: X_t = Z_t - theta Z_{t-1}.
struct Ma1 {
  double theta = 0.8;
};

/// X4: (1-B)^d X_t = (1 - theta B) Z_t, truncated MA(infinity) representation.
struct Farima {
  double d = 0.45;
  double theta = 0.8;
  std::size_t truncation = 10000;
};

/// X5: white noise, then an AR(1) stretch on (T/2, 3T/4], then white noise
/// again. Not stationary.
struct StructuralBreak {
  double phi = 0.8;
};

/// Causal linear process X_t = sum_l psi_l Z_{t-l}, l = 0..psi.size()-1.
struct LinearProcess {
  std::vector<double> psi;
};

using ModelSpec = std::variant<WhiteNoise, Ar1, Ma1, Farima, StructuralBreak, LinearProcess>;

/// "X1".."X5" (case-insensitive) with default parameters.
[[nodiscard]] ModelSpec model_from_name(std::string_view name);
[[nodiscard]] std::string model_name(const ModelSpec& model);

/// Throws std::invalid_argument if model parameters violate their invariants.
void validate(const ModelSpec& model);

/// Pre-sample innovations the model reads before t = 1.
[[nodiscard]] std::size_t lookback(const ModelSpec& model);

/// Sample sizes, correlation and the index map m(t) = floor(t q) - floor(q - 1)
/// pairing innovation t of the short series with innovation m(t) of the long one.
class CouplingSpec {
 public:
  /// Requires 1 <= n1 <= n2 and rho in [0, 1].
  CouplingSpec(std::size_t n1, std::size_t n2, double rho);

  [[nodiscard]] std::size_t n1() const noexcept { return n1_; }
  [[nodiscard]] std::size_t n2() const noexcept { return n2_; }
  [[nodiscard]] double rho() const noexcept { return rho_; }
  [[nodiscard]] double q() const noexcept {
    return static_cast<double>(n2_) / static_cast<double>(n1_);
  }

  /// m(t) for 1 <= t <= n1, evaluated in exact integer arithmetic.
  [[nodiscard]] std::size_t matched_index(std::size_t t) const;

 private:
  std::size_t n1_;
  std::size_t n2_;
  double rho_;
};

/// Innovation sequences with `pad` extra values on each side. The in-sample
/// value Z_t (t = 1..n) lives at index pad + t - 1.
struct InnovationPair {
  std::vector<double> first;   ///< length n1 + 2 pad
  std::vector<double> second;  ///< length n2 + 2 pad
  std::size_t pad = 0;
};

/// Draws Z2 i.i.d. N(0,1) first, then Z1_t = rho Z2_{m(t)} + sqrt(1 - rho^2) eps_t
/// in-sample. Pad values of Z1 are independent of Z2.
[[nodiscard]] InnovationPair coupled_innovations(const CouplingSpec& spec, std::size_t pad,
                                                 std::uint64_t seed);

/// MA(infinity) coefficients psi_0..psi_M of (1-B)^{-d} (1 - theta B).
[[nodiscard]] std::vector<double> farima_coeffs(double d, double theta, std::size_t truncation);

/// Simulates n observations. innovations[pad + t - 1] is Z_t; the model reads
/// up to lookback(model) values before t = 1, so pad must be at least that.
[[nodiscard]] std::vector<double> simulate(const ModelSpec& model, std::size_t n,
                                           std::span<const double> innovations, std::size_t pad);

[[nodiscard]] TimeSeries simulate_series(const ModelSpec& model, std::size_t n,
                                         std::span<const double> innovations, std::size_t pad,
                                         std::string label);

/// Closed-form spectral density f(lambda) of a stationary model. Throws
/// std::invalid_argument for StructuralBreak.
[[nodiscard]] double model_spectral_density(const ModelSpec& model, double lambda);

/// Lag-h autocovariance sum_l psi_l psi_{l+h} of a stationary model
/// (AR1 via its closed form).
[[nodiscard]] double model_autocovariance(const ModelSpec& model, std::size_t lag);

}  // namespace specdiff::procgen
