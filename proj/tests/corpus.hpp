#pragma once
// Fixed expression corpus over x1, x2 covering every grammar construct. All
// entries are smooth on [-1.5, 1.5]^2 (log/sqrt arguments >= 1, denominators
// >= 1) with moderate higher derivatives, so a central difference with
// h = 1e-5 is accurate to well below 1e-6 relative.

#include <array>

namespace corpus {

inline constexpr std::array<const char*, 50> kExpressions = {
    "x1^4 - 2*x1^2",
    "x1^2 + x2^2",
    "x1^2 + sin(x2)",
    "x1*x2",
    "x1^3 - 3*x1*x2^2",
    "(x1 - 0.5)^2 + 3*(x2 + 0.25)^2",
    "x1^4 + x2^4 - x1*x2",
    "-x1^2*x2 + x2^3",
    "(x1 + x2)^5 / 10",
    "(1 + x1^2)^-1 - x2",
    "1 / (1 + x1^2 + x2^2)",
    "x1 / (2 + x2^2)",
    "(x1*x2 - 1) / (3 + x1^2)",
    "sin(x1) * cos(x2)",
    "sin(x1 + 2*x2)",
    "cos(x1*x2)",
    "sin(x1)^2 + cos(x1)^2",
    "sin(cos(x1)) + cos(sin(x2))",
    "exp(x1)",
    "exp(-x1^2 - x2^2)",
    "exp(0.5*x1*x2)",
    "x1*exp(-x2^2)",
    "exp(sin(x1)) - x2",
    "log(1 + x1^2)",
    "log(2 + sin(x1*x2))",
    "log(1 + x1^2 + x2^4) * x1",
    "sqrt(1 + x1^2)",
    "sqrt(2 + cos(x1) + x2^2)",
    "x1 * sqrt(1 + x2^2) - x2",
    "-(x1 - x2)^3",
    "--x1*x2 + -x2",
    "2.5e-1*x1^3 - 1.5*x2^2 + 7",
    "(x1^2 - 1)^2 + (x2^2 - 1)^2",
    "x1^2*x2^2 + x1 - x2",
    "(1 + x1)^6 / 100",
    "x1 - x2^2 / (1 + x1^2)",
    "sin(x1) / (2 + cos(x2))",
    "exp(x1) / (1 + exp(x1))",
    "log(1 + exp(x1))",
    "sqrt(1 + sin(x1)^2) * cos(x2)",
    "(x1 + 2*x2 - 1)^2 + 0.1*x1^4",
    "x1^3*x2 - x2^3*x1",
    "cos(x1)^3 - sin(x2)^2",
    "exp(-(x1 - 1)^2) + exp(-(x2 + 1)^2)",
    "100*(x2 - x1^2)^2 + (1 - x1)^2",
    "x1^2 / (1 + x2^2) + x2^2 / (1 + x1^2)",
    "log(3 + x1) * sqrt(2 + x2)",
    "sin(0.5*x1)*exp(0.3*x2) + x1*x2^3",
    "(x1^2 + x2^2 + 1)^-2",
    "(2 - cos(x1))^3 - (2 + sin(x2))^-1",
};

}  // namespace corpus
