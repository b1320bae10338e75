#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "specdiff/inference.hpp"

namespace specdiff::report {

/// Stable result schema: method, statistic, p_value, reject, alpha, epsilon
/// (precise test only), d1, d2, d12, d_squared, r_squared, sigma2_h0,
/// sigma2_alt, n1, n2, swapped.
[[nodiscard]] nlohmann::json test_result_json(const inference::TestResult& result,
                                              const inference::Comparison& comparison);

/// One object per test run on the pair, equality first.
[[nodiscard]] nlohmann::json comparison_json(const inference::Comparison& comparison);

/// Human-readable multi-line summary.
[[nodiscard]] std::string comparison_text(const inference::Comparison& comparison,
                                          const std::string& label_a, const std::string& label_b);

}  // namespace specdiff::report
