#include "specdiff/procgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "specdiff/rng.hpp"

namespace specdiff::procgen {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double convolve_at(std::span<const double> psi, std::span<const double> z, std::size_t pos) {
  // pos is the index of Z_t; psi_j multiplies Z_{t-j}.
  double acc = 0.0;
  const double* zt = z.data() + pos;
  for (std::size_t j = 0; j < psi.size(); ++j) acc += psi[j] * *(zt - j);
  return acc;
}

std::vector<double> convolve(std::span<const double> psi, std::size_t n, std::span<const double> z,
                             std::size_t pad) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = convolve_at(psi, z, pad + t);
  return x;
}

}  // namespace

ModelSpec model_from_name(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "X1") return WhiteNoise{};
  if (upper == "X2") return Ar1{};
  if (upper == "X3") return Ma1{};
  if (upper == "X4") return Farima{};
  if (upper == "X5") return StructuralBreak{};
  throw std::invalid_argument("unknown model '" + std::string(name) + "' (expected X1..X5)");
}

std::string model_name(const ModelSpec& model) {
  return std::visit(Overloaded{
                        [](const WhiteNoise&) { return std::string("X1"); },
                        [](const Ar1&) { return std::string("X2"); },
                        [](const Ma1&) { return std::string("X3"); },
                        [](const Farima&) { return std::string("X4"); },
                        [](const StructuralBreak&) { return std::string("X5"); },
                        [](const LinearProcess&) { return std::string("linear"); },
                    },
                    model);
}

void validate(const ModelSpec& model) {
  std::visit(Overloaded{
                 [](const WhiteNoise&) {},
                 [](const Ar1& m) {
                   if (!(std::abs(m.phi) < 1.0)) throw std::invalid_argument("AR1 needs |phi| < 1");
                 },
                 [](const Ma1& m) {
                   if (!std::isfinite(m.theta)) throw std::invalid_argument("MA1 theta must be finite");
                 },
                 [](const Farima& m) {
                   if (!(m.d > 0.0 && m.d < 0.5)) throw std::invalid_argument("FARIMA needs 0 < d < 0.5");
                   if (m.truncation < 1) throw std::invalid_argument("FARIMA truncation must be >= 1");
                 },
                 [](const StructuralBreak& m) {
                   if (!std::isfinite(m.phi)) throw std::invalid_argument("break phi must be finite");
                 },
                 [](const LinearProcess& m) {
                   if (m.psi.empty()) throw std::invalid_argument("linear process needs coefficients");
                   for (double c : m.psi) {
                     if (!std::isfinite(c)) throw std::invalid_argument("linear process coefficient not finite");
                   }
                 },
             },
             model);
}

std::size_t lookback(const ModelSpec& model) {
  return std::visit(Overloaded{
                        [](const WhiteNoise&) -> std::size_t { return 0; },
                        [](const Ar1& m) -> std::size_t { return m.burn_in; },
                        [](const Ma1&) -> std::size_t { return 1; },
                        [](const Farima& m) -> std::size_t { return m.truncation; },
                        [](const StructuralBreak&) -> std::size_t { return 0; },
                        [](const LinearProcess& m) -> std::size_t { return m.psi.size() - 1; },
                    },
                    model);
}

CouplingSpec::CouplingSpec(std::size_t n1, std::size_t n2, double rho) : n1_(n1), n2_(n2), rho_(rho) {
  if (n1 < 1 || n2 < n1) throw std::invalid_argument("coupling needs 1 <= n1 <= n2");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("coupling needs rho in [0, 1]");
  // The map must pair each long-series innovation at most once and stay in range.
  if (matched_index(1) < 1 || matched_index(n1) > n2) {
    throw std::invalid_argument("coupling index map leaves [1, n2]");
  }
  for (std::size_t t = 2; t <= n1; ++t) {
    if (matched_index(t) <= matched_index(t - 1)) {
      throw std::invalid_argument("coupling index map is not strictly increasing");
    }
  }
}

std::size_t CouplingSpec::matched_index(std::size_t t) const {
  if (t < 1 || t > n1_) throw std::out_of_range("coupling index outside 1..n1");
  // floor(t n2/n1) - floor((n2 - n1)/n1)
  return (t * n2_) / n1_ - (n2_ - n1_) / n1_;
}

InnovationPair coupled_innovations(const CouplingSpec& spec, std::size_t pad, std::uint64_t seed) {
  Engine engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  InnovationPair out;
  out.pad = pad;
  out.second.resize(spec.n2() + 2 * pad);
  for (double& z : out.second) z = normal(engine);

  out.first.resize(spec.n1() + 2 * pad);
  for (double& e : out.first) e = normal(engine);

  const double rho = spec.rho();
  if (rho > 0.0) {
    const double scale = std::sqrt(1.0 - rho * rho);
    for (std::size_t t = 1; t <= spec.n1(); ++t) {
      double& z1 = out.first[pad + t - 1];
      z1 = rho * out.second[pad + spec.matched_index(t) - 1] + scale * z1;
    }
  }
  return out;
}

std::vector<double> farima_coeffs(double d, double theta, std::size_t truncation) {
  if (!(d > 0.0 && d < 0.5)) throw std::invalid_argument("farima_coeffs needs 0 < d < 0.5");
  if (truncation < 1) throw std::invalid_argument("farima_coeffs needs truncation >= 1");
  std::vector<double> psi(truncation + 1);
  double b_prev = 0.0;
  double b = 1.0;
  for (std::size_t j = 0; j <= truncation; ++j) {
    if (j > 0) {
      b_prev = b;
      b = b_prev * (static_cast<double>(j) - 1.0 + d) / static_cast<double>(j);
    }
    psi[j] = b - theta * b_prev;
  }
  return psi;
}

std::vector<double> simulate(const ModelSpec& model, std::size_t n, std::span<const double> innovations,
                             std::size_t pad) {
  validate(model);
  if (pad < lookback(model)) {
    throw std::invalid_argument("insufficient innovations: model " + model_name(model) + " needs " +
                                std::to_string(lookback(model)) + " pre-sample values, got " +
                                std::to_string(pad));
  }
  if (innovations.size() < pad + n) {
    throw std::invalid_argument("insufficient innovations: need " + std::to_string(pad + n) + ", got " +
                                std::to_string(innovations.size()));
  }
  const auto z = [&](std::size_t t) { return innovations[pad + t - 1]; };  // 1-based, t >= 1

  return std::visit(
      Overloaded{
          [&](const WhiteNoise&) {
            return std::vector<double>(innovations.begin() + static_cast<std::ptrdiff_t>(pad),
                                       innovations.begin() + static_cast<std::ptrdiff_t>(pad + n));
          },
          [&](const Ar1& m) {
            std::vector<double> x(n);
            double state = 0.0;
            for (std::size_t i = pad - m.burn_in; i < pad; ++i) state = m.phi * state + innovations[i];
            for (std::size_t t = 1; t <= n; ++t) {
              state = m.phi * state + z(t);
              x[t - 1] = state;
            }
            return x;
          },
          [&](const Ma1& m) {
            std::vector<double> x(n);
            for (std::size_t t = 1; t <= n; ++t) x[t - 1] = z(t) - m.theta * innovations[pad + t - 2];
            return x;
          },
          [&](const Farima& m) { return convolve(farima_coeffs(m.d, m.theta, m.truncation), n, innovations, pad); },
          [&](const StructuralBreak& m) {
            // Regimes (0, T/2], (T/2, 3T/4], (3T/4, T]; the boundary t = T/2 belongs to the first.
            const std::size_t first_end = n / 2;
            const std::size_t second_end = (3 * n) / 4;
            std::vector<double> x(n);
            for (std::size_t t = 1; t <= n; ++t) {
              if (t <= first_end || t > second_end) {
                x[t - 1] = z(t);
              } else {
                const double prev = t >= 2 ? x[t - 2] : 0.0;
                x[t - 1] = m.phi * prev + z(t);
              }
            }
            return x;
          },
          [&](const LinearProcess& m) { return convolve(m.psi, n, innovations, pad); },
      },
      model);
}

TimeSeries simulate_series(const ModelSpec& model, std::size_t n, std::span<const double> innovations,
                           std::size_t pad, std::string label) {
  return TimeSeries(simulate(model, n, innovations, pad), std::move(label));
}

double model_spectral_density(const ModelSpec& model, double lambda) {
  validate(model);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::complex<double> e = std::polar(1.0, -lambda);
  return std::visit(
      Overloaded{
          [&](const WhiteNoise&) { return 1.0 / two_pi; },
          [&](const Ar1& m) { return 1.0 / (two_pi * std::norm(1.0 - m.phi * e)); },
          [&](const Ma1& m) { return std::norm(1.0 - m.theta * e) / two_pi; },
          [&](const Farima& m) {
            const double s = 2.0 * std::abs(std::sin(lambda / 2.0));  // |1 - e^{-i lambda}|
            return std::norm(1.0 - m.theta * e) * std::pow(s, -2.0 * m.d) / two_pi;
          },
          [&](const StructuralBreak&) -> double {
            throw std::invalid_argument("structural-break model has no spectral density");
          },
          [&](const LinearProcess& m) {
            std::complex<double> acc = 0.0;
            for (std::size_t l = 0; l < m.psi.size(); ++l) {
              acc += m.psi[l] * std::polar(1.0, -lambda * static_cast<double>(l));
            }
            return std::norm(acc) / two_pi;
          },
      },
      model);
}

double model_autocovariance(const ModelSpec& model, std::size_t lag) {
  validate(model);
  const auto from_psi = [lag](const std::vector<double>& psi) {
    double acc = 0.0;
    for (std::size_t l = 0; l + lag < psi.size(); ++l) acc += psi[l] * psi[l + lag];
    return acc;
  };
  return std::visit(
      Overloaded{
          [&](const WhiteNoise&) { return lag == 0 ? 1.0 : 0.0; },
          [&](const Ar1& m) { return std::pow(m.phi, static_cast<double>(lag)) / (1.0 - m.phi * m.phi); },
          [&](const Ma1& m) { return from_psi({1.0, -m.theta}); },
          [&](const Farima& m) { return from_psi(farima_coeffs(m.d, m.theta, m.truncation)); },
          [&](const StructuralBreak&) -> double {
            throw std::invalid_argument("structural-break model has no autocovariance function");
          },
          [&](const LinearProcess& m) { return from_psi(m.psi); },
      },
      model);
}

}  // namespace specdiff::procgen
