#pragma once
// Random expression texts over x1..xn that are defined and smooth on all of
// R^n (log, sqrt and division only ever see arguments >= 1).

#include <string>

#include "instances.hpp"

namespace instances {

inline std::string random_literal(Rng& rng) {
  static const char* literals[] = {"0.5", "2", "3", "1.25", "0.1", "7", "1e-1", "2.5e0"};
  return literals[rng.integer(0, 7)];
}

inline std::string random_expression(Rng& rng, int n, int depth) {
  auto var = [&] { return "x" + std::to_string(rng.integer(1, n)); };
  if (depth <= 0) return rng.integer(0, 3) == 0 ? random_literal(rng) : var();
  auto sub = [&] { return random_expression(rng, n, depth - 1); };
  switch (rng.integer(0, 12)) {
    case 0: return "(" + sub() + " + " + sub() + ")";
    case 1: return "(" + sub() + " - " + sub() + ")";
    case 2: return sub() + " * " + sub();
    case 3: { const std::string u = sub(); return sub() + " / (1 + (" + u + ")^2)"; }
    case 4: return "(" + sub() + ")^" + std::to_string(rng.integer(2, 4));
    case 5: return "sin(" + sub() + ")";
    case 6: return "cos(" + sub() + ")";
    case 7: return "exp(0.3 * " + sub() + " / (1 + (" + sub() + ")^2))";
    case 8: return "log(1 + (" + sub() + ")^2)";
    case 9: return "sqrt(1 + (" + sub() + ")^2)";
    case 10: return "-" + sub();
    case 11: return random_literal(rng) + " * " + sub();
    default: return "(1 + (" + sub() + ")^2)^-1";
  }
}

}  // namespace instances
