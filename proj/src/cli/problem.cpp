#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "randopt/cli.hpp"

namespace randopt::cli {

namespace {

using nlohmann::json;

std::string child(const std::string& ptr, std::string_view key) { return ptr + "/" + std::string(key); }
std::string child(const std::string& ptr, std::size_t index) { return ptr + "/" + std::to_string(index); }

const char* type_name(const json& v) {
  switch (v.type()) {
    case json::value_t::null: return "null";
    case json::value_t::object: return "object";
    case json::value_t::array: return "array";
    case json::value_t::string: return "string";
    case json::value_t::boolean: return "boolean";
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
    case json::value_t::number_float: return "number";
    default: return "value";
  }
}

[[noreturn]] void schema_fail(const std::string& ptr, const std::string& msg) {
  throw SchemaError(ptr, (ptr.empty() ? std::string("document") : ptr) + ": " + msg);
}

const json& expect(const json& v, json::value_t type, const char* what, const std::string& ptr) {
  const bool ok = type == json::value_t::number_float ? v.is_number() : v.type() == type;
  if (!ok) schema_fail(ptr, std::string("expected ") + what + ", found " + type_name(v));
  return v;
}

const json& object_at(const json& v, const std::string& ptr) { return expect(v, json::value_t::object, "an object", ptr); }
const json& array_at(const json& v, const std::string& ptr) { return expect(v, json::value_t::array, "an array", ptr); }

const json& member(const json& obj, std::string_view key, const std::string& ptr) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_fail(ptr, "missing required member \"" + std::string(key) + "\"");
  return *it;
}

const json* optional_member(const json& obj, std::string_view key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double number_at(const json& v, const std::string& ptr) {
  expect(v, json::value_t::number_float, "a number", ptr);
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_fail(ptr, "number is not finite");
  return d;
}

std::int64_t integer_at(const json& v, const std::string& ptr) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) schema_fail(ptr, "integer out of range");
    return static_cast<std::int64_t>(u);
  }
  schema_fail(ptr, std::string("expected an integer, found ") + type_name(v));
}

std::string string_at(const json& v, const std::string& ptr) {
  return expect(v, json::value_t::string, "a string", ptr).get<std::string>();
}

bool bool_at(const json& v, const std::string& ptr) { return expect(v, json::value_t::boolean, "a boolean", ptr).get<bool>(); }

Point vector_at(const json& v, const std::string& ptr, std::optional<std::size_t> size = std::nullopt) {
  array_at(v, ptr);
  if (size && v.size() != *size) {
    schema_fail(ptr, "expected " + std::to_string(*size) + " components, found " + std::to_string(v.size()));
  }
  Point out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number_at(v[i], child(ptr, i)));
  return out;
}

std::vector<Point> points_at(const json& v, const std::string& ptr, std::size_t dim) {
  array_at(v, ptr);
  std::vector<Point> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(vector_at(v[i], child(ptr, i), dim));
  return out;
}

Expression expression_at(const json& v, const std::string& ptr, int n, int k) {
  const std::string text = string_at(v, ptr);
  try {
    return parse(text, n, k);
  } catch (const ParseError& e) {
    throw DocumentParseError(ptr, e);
  } catch (const DimensionError& e) {
    schema_fail(ptr, e.what());
  }
}

Box box_at(const json& v, const std::string& ptr, int n) {
  object_at(v, ptr);
  Box b{vector_at(member(v, "lower", ptr), child(ptr, "lower"), n),
        vector_at(member(v, "upper", ptr), child(ptr, "upper"), n)};
  for (int i = 0; i < n; ++i) {
    if (!(b.lower[i] <= b.upper[i])) {
      schema_fail(child(ptr, "lower"), "lower bound exceeds upper bound in component " + std::to_string(i + 1));
    }
  }
  return b;
}

SetDescription set_at(const json& v, const std::string& ptr, int n) {
  object_at(v, ptr);
  const std::string type = string_at(member(v, "type", ptr), child(ptr, "type"));
  if (type == "box") return box_at(v, ptr, n);
  if (type == "points") {
    PointCloud cloud{points_at(member(v, "points", ptr), child(ptr, "points"), n)};
    if (cloud.points.empty()) return EmptySetDesc{};
    return cloud;
  }
  if (type == "empty") return EmptySetDesc{};
  if (type == "level_set") {
    LevelSet ls;
    ls.bounds = box_at(member(v, "bounds", ptr), child(ptr, "bounds"), n);
    const std::string cptr = child(ptr, "constraints");
    const json& cs = array_at(member(v, "constraints", ptr), cptr);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string ip = child(cptr, i);
      object_at(cs[i], ip);
      Point params;
      if (const json* p = optional_member(cs[i], "params")) params = vector_at(*p, child(ip, "params"));
      ls.constraints.push_back({expression_at(member(cs[i], "expression", ip), child(ip, "expression"), n,
                                              static_cast<int>(params.size())),
                                params});
    }
    return ls;
  }
  schema_fail(child(ptr, "type"), "unknown set type \"" + type + "\" (expected box, points, level_set or empty)");
}

SpacePtr space_at(const json& v, const std::string& ptr) {
  object_at(v, ptr);
  const std::string sp = child(ptr, "scenarios");
  const json& sj = array_at(member(v, "scenarios", ptr), sp);
  std::vector<ScenarioId> ids;
  for (std::size_t i = 0; i < sj.size(); ++i) ids.push_back(integer_at(sj[i], child(sp, i)));
  if (ids.empty()) schema_fail(sp, "a probability space needs at least one scenario");

  const std::string wp = child(ptr, "weights");
  const Point weights = vector_at(member(v, "weights", ptr), wp, ids.size());

  const std::string ap = child(ptr, "atoms");
  std::vector<std::vector<ScenarioId>> atoms;
  if (const json* aj = optional_member(v, "atoms")) {
    array_at(*aj, ap);
    for (std::size_t i = 0; i < aj->size(); ++i) {
      const std::string ip = child(ap, i);
      const json& atom = array_at((*aj)[i], ip);
      std::vector<ScenarioId> members;
      for (std::size_t j = 0; j < atom.size(); ++j) members.push_back(integer_at(atom[j], child(ip, j)));
      atoms.push_back(std::move(members));
    }
  } else {
    // no atoms: the power set
    for (ScenarioId id : ids) atoms.push_back({id});
  }

  try {
    return ProbSpace::make(ids, weights, atoms);
  } catch (const WeightSumError& e) {
    schema_fail(wp, e.what());
  } catch (const PartitionError& e) {
    const bool duplicate_ids = std::string_view(e.what()).starts_with("duplicate scenario id");
    schema_fail(duplicate_ids ? sp : ap, e.what());
  }
}

}  // namespace

Problem parse_problem(const json& doc) {
  object_at(doc, "");
  Problem p;

  if (const json* v = optional_member(doc, "schema_version")) {
    if (integer_at(*v, "/schema_version") != kSchemaVersion) {
      schema_fail("/schema_version", "unsupported schema version (this build reads version " +
                                         std::to_string(kSchemaVersion) + ")");
    }
  }

  p.space = space_at(member(doc, "space", ""), "/space");
  const std::size_t m = p.space->size();

  const std::int64_t n = integer_at(member(doc, "dimension", ""), "/dimension");
  if (n < 1 || n > 16) schema_fail("/dimension", "dimension must be between 1 and 16");
  p.dimension = static_cast<int>(n);

  const json& obj = object_at(member(doc, "objective", ""), "/objective");
  std::vector<Point> params(m);
  if (const json* pj = optional_member(obj, "params")) {
    array_at(*pj, "/objective/params");
    if (pj->size() != m) {
      schema_fail("/objective/params", "expected one parameter vector per scenario (" + std::to_string(m) +
                                           "), found " + std::to_string(pj->size()));
    }
    for (std::size_t s = 0; s < m; ++s) {
      params[s] = vector_at((*pj)[s], child("/objective/params", s), s == 0 ? std::nullopt
                                                                            : std::optional(params[0].size()));
    }
  }
  const int k = static_cast<int>(params[0].size());
  p.expression = string_at(member(obj, "expression", "/objective"), "/objective/expression");
  p.objective.emplace(p.space, expression_at(obj["expression"], "/objective/expression", p.dimension, k),
                      std::move(params));

  if (const json* fs = optional_member(doc, "feasible_set")) {
    RandomSet c;
    c.space = p.space;
    c.dimension = p.dimension;
    if (fs->is_array()) {
      if (fs->size() != m) {
        schema_fail("/feasible_set", "expected one set per scenario (" + std::to_string(m) + "), found " +
                                         std::to_string(fs->size()));
      }
      for (std::size_t s = 0; s < m; ++s) c.sets.push_back(set_at((*fs)[s], child("/feasible_set", s), p.dimension));
    } else {
      c.sets.assign(m, set_at(*fs, "/feasible_set", p.dimension));
    }
    p.feasible_set = std::move(c);
  }

  if (const json* sb = optional_member(doc, "search_box")) p.search_box = box_at(*sb, "/search_box", p.dimension);

  if (const json* cj = optional_member(doc, "candidate")) {
    auto pts = points_at(*cj, "/candidate", p.dimension);
    if (pts.size() != m) {
      schema_fail("/candidate", "expected one point per scenario (" + std::to_string(m) + "), found " +
                                    std::to_string(pts.size()));
    }
    p.candidate = RandomVariableRn{p.space, std::move(pts)};
  }

  if (const json* pj = optional_member(doc, "probes")) p.probes = points_at(*pj, "/probes", p.dimension);

  if (const json* oj = optional_member(doc, "options")) {
    object_at(*oj, "/options");
    auto int_option = [&](const char* key, int lo, int hi, int& out) {
      if (const json* v = optional_member(*oj, key)) {
        const std::string ptr = child("/options", key);
        const std::int64_t x = integer_at(*v, ptr);
        if (x < lo || x > hi) {
          schema_fail(ptr, "must be between " + std::to_string(lo) + " and " + std::to_string(hi));
        }
        out = static_cast<int>(x);
      }
    };
    auto tol_option = [&](const char* key, double& out) {
      if (const json* v = optional_member(*oj, key)) {
        const std::string ptr = child("/options", key);
        out = number_at(*v, ptr);
        if (!(out > 0.0)) schema_fail(ptr, "tolerance must be positive");
      }
    };
    int_option("grid", 2, 1000000, p.options.grid);
    int_option("newton_grid", 1, 1000, p.options.newton_grid);
    if (const json* v = optional_member(*oj, "seed")) {
      const std::int64_t s = integer_at(*v, "/options/seed");
      if (s < 0) schema_fail("/options/seed", "seed must be nonnegative");
      p.options.seed = static_cast<std::uint64_t>(s);
    }
    if (const json* v = optional_member(*oj, "polish")) p.options.polish = bool_at(*v, "/options/polish");
    tol_option("definiteness_tol", p.options.definiteness_tol);
    tol_option("eq_tol", p.options.eq_tol);
  }
  return p;
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read input file " + path.string());

  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("input is not valid JSON: ") + e.what());
  }
  return parse_problem(doc);
}

}  // namespace randopt::cli
