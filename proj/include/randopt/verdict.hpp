#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace randopt {

using Point = std::vector<double>;

/// Why a mapping failed a measurability check: two scenarios of the same atom
/// whose data differ (and the probe point where they differ, if any).
struct Witness {
  std::size_t atom = 0;
  std::size_t first = 0;
  std::size_t second = 0;
  std::optional<Point> probe;
  std::string detail;
};

struct Verdict {
  bool measurable = true;
  std::optional<Witness> witness;

  static Verdict yes() { return {}; }
  static Verdict no(Witness w) { return {false, std::move(w)}; }
};

}  // namespace randopt
