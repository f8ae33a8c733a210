#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

namespace dpkit {

// Shared tolerant-equality parameters for numeric answers. Every answer
// comparison in the toolkit (majority voting, verification, scoring,
// reward computation) goes through answers_match with the same defaults.
struct Tolerance {
  double abs = 1e-6;
  double rel = 1e-4;
};

inline bool answers_match(double a, double b, const Tolerance& tol = {}) {
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= std::max(tol.abs, tol.rel * scale);
}

inline bool answers_match(const std::optional<double>& a, double b,
                          const Tolerance& tol = {}) {
  return a.has_value() && answers_match(*a, b, tol);
}

// Parses a string that consists of exactly one numeric token (after
// trimming whitespace). Returns nullopt otherwise.
std::optional<double> parse_numeric_token(const std::string& text);

}  // namespace dpkit
