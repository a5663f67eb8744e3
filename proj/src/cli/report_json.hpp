#pragma once

#include <nlohmann/json.hpp>

#include "randopt/optimize.hpp"
#include "randopt/probspace.hpp"
#include "randopt/selection.hpp"

namespace randopt::cli::detail {

using ojson = nlohmann::ordered_json;

ojson point_json(const Point& x);
ojson witness_json(const ProbSpace& space, const Witness& w);
/// {"verdict": "measurable" | "non_measurable", "witness": ...}
ojson verdict_json(const ProbSpace& space, const Verdict& v);
ojson certificate_json(const ProbSpace& space, const Certificate& c);
ojson local_certificate_json(const ProbSpace& space, const LocalMinCertificate& c);
ojson stationary_point_json(const StationaryPoint& p);
ojson diagnostics_json(const StationaryDiagnostics& d);
ojson ids_json(const ProbSpace& space, const std::vector<std::size_t>& scenarios);

}  // namespace randopt::cli::detail
