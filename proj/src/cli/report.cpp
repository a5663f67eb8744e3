#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>
#include <type_traits>

#include "cli/report_json.hpp"
#include "randopt/cli.hpp"

namespace randopt::cli {

namespace detail {

ojson point_json(const Point& x) {
  ojson a = ojson::array();
  for (double v : x) a.push_back(v);
  return a;
}

ojson witness_json(const ProbSpace& space, const Witness& w) {
  ojson j;
  j["atom"] = w.atom;
  j["scenarios"] = ojson::array({space.id(w.first), space.id(w.second)});
  if (w.probe) j["probe"] = point_json(*w.probe);
  j["detail"] = w.detail;
  return j;
}

ojson verdict_json(const ProbSpace& space, const Verdict& v) {
  ojson j;
  j["verdict"] = v.measurable ? "measurable" : "non_measurable";
  if (v.witness) j["witness"] = witness_json(space, *v.witness);
  return j;
}

ojson local_certificate_json(const ProbSpace& space, const LocalMinCertificate& c) {
  ojson j;
  j["type"] = "local_min";
  j["verified_at"] = space.id(c.omega);
  j["delta"] = c.delta;
  j["samples_checked"] = c.samples_checked;
  j["min_margin"] = c.min_margin;
  return j;
}

ojson certificate_json(const ProbSpace& space, const Certificate& c) {
  return std::visit(
      [&](const auto& cert) -> ojson {
        using T = std::decay_t<decltype(cert)>;
        if constexpr (std::is_same_v<T, GlobalCert>) {
          ojson j;
          j["type"] = "global";
          j["value"] = cert.value;
          if (cert.local) j["local"] = local_certificate_json(space, *cert.local);
          return j;
        } else if constexpr (std::is_same_v<T, LocalMinCertificate>) {
          return local_certificate_json(space, cert);
        } else {
          return ojson{{"type", "necessary_only"}};
        }
      },
      c);
}

ojson stationary_point_json(const StationaryPoint& p) {
  ojson j;
  j["x"] = point_json(p.x);
  j["grad_norm"] = p.grad_norm;
  j["minors"] = point_json(p.minors);
  j["classification"] = to_string(p.classification);
  j["newton_iters"] = p.newton_iters;
  return j;
}

ojson diagnostics_json(const StationaryDiagnostics& d) {
  ojson j;
  j["starts"] = d.starts;
  j["singular_starts"] = d.singular_starts;
  j["failed_starts"] = d.failed_starts;
  j["outside_region"] = d.outside_region;
  return j;
}

ojson ids_json(const ProbSpace& space, const std::vector<std::size_t>& scenarios) {
  ojson a = ojson::array();
  for (std::size_t s : scenarios) a.push_back(space.id(s));
  return a;
}

}  // namespace detail

namespace {

void format_double(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.append(buf, ptr);
}

void dump(std::string& out, const nlohmann::ordered_json& j, int indent) {
  using value_t = nlohmann::ordered_json::value_t;
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += nlohmann::ordered_json(key).dump();
        out += ": ";
        dump(out, value, indent + 2);
      }
      out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "}";
      return;
    }
    case value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::none_of(j.begin(), j.end(), [](const auto& v) { return v.is_structured(); });
      if (flat) {
        // scalar arrays (points, id lists) stay on one line
        out += "[";
        bool first = true;
        for (const auto& value : j) {
          if (!first) out += ", ";
          first = false;
          dump(out, value, indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump(out, value, indent + 2);
      }
      out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "]";
      return;
    }
    case value_t::number_float:
      format_double(out, j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_report(const nlohmann::ordered_json& report) {
  std::string out;
  dump(out, report, 0);
  out += "\n";
  return out;
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move report into place at " + path.string());
  }
}

}  // namespace randopt::cli
