#include "specdiff/report.hpp"

#include <cmath>
#include <sstream>

namespace specdiff::report {

namespace {

// JSON has no infinities; a degenerate precise-test statistic is written as null.
nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

nlohmann::json test_result_json(const inference::TestResult& result, const inference::Comparison& c) {
  nlohmann::json j = {
      {"method", inference::to_string(result.method)},
      {"statistic", finite_or_null(result.statistic)},
      {"p_value", result.p_value},
      {"reject", result.reject},
      {"alpha", result.alpha},
      {"d1", c.stats.d1},
      {"d2", c.stats.d2},
      {"d12", c.stats.d12},
      {"d_squared", c.stats.d_squared},
      {"r_squared", c.stats.r_squared},
      {"sigma2_h0", c.variances.sigma2_h0},
      {"sigma2_alt", c.variances.sigma2_alt},
      {"n1", c.stats.n1},
      {"n2", c.stats.n2},
      {"swapped", c.swapped},
  };
  if (result.epsilon) j["epsilon"] = *result.epsilon;
  return j;
}

nlohmann::json comparison_json(const inference::Comparison& c) {
  nlohmann::json out = nlohmann::json::array();
  out.push_back(test_result_json(c.equality, c));
  if (c.precise) out.push_back(test_result_json(*c.precise, c));
  return out;
}

std::string comparison_text(const inference::Comparison& c, const std::string& label_a,
                            const std::string& label_b) {
  std::ostringstream out;
  out.precision(6);
  const std::string& shorter = c.swapped ? label_b : label_a;
  const std::string& longer = c.swapped ? label_a : label_b;
  out << "series      " << shorter << " (n1=" << c.stats.n1 << ") vs " << longer << " (n2=" << c.stats.n2 << ")\n"
      << "D1          " << c.stats.d1 << "\n"
      << "D2          " << c.stats.d2 << "\n"
      << "D12         " << c.stats.d12 << "\n"
      << "D^2         " << c.stats.d_squared << "\n"
      << "R^2         " << c.stats.r_squared << "\n"
      << "sigma2_h0   " << c.variances.sigma2_h0 << "\n"
      << "sigma2_alt  " << c.variances.sigma2_alt << "\n";
  out << "equality    statistic=" << c.equality.statistic << " p=" << c.equality.p_value
      << " alpha=" << c.equality.alpha << " -> " << (c.equality.reject ? "reject equal spectra" : "no rejection")
      << "\n";
  if (c.precise) {
    out << "precise     eps=" << *c.precise->epsilon << " statistic=" << c.precise->statistic
        << " p=" << c.precise->p_value << " -> "
        << (c.precise->reject ? "reject R^2 > eps (spectra approximately equal)" : "no rejection") << "\n";
  }
  if (c.ci_d2) {
    out << "CI(D^2)     [" << c.ci_d2->lower << ", " << c.ci_d2->upper << "] at level "
        << 1.0 - c.equality.alpha << "\n";
  }
  return out.str();
}

}  // namespace specdiff::report
