#include <algorithm>
#include <exception>
#include <string>

#include "cli/report_json.hpp"
#include "randopt/cli.hpp"

namespace randopt::cli {

namespace {

using detail::ojson;

struct Context {
  const Problem& problem;
  const ProbSpace& space;
  const RandomFunction& f;
  SolveOptions solve;
  std::uint64_t seed = 0;
};

const char* hypothesis_text(HypothesisViolation::Kind kind) {
  switch (kind) {
    case HypothesisViolation::Kind::NonMeasurableF:
      return "f must be a measurable random function (jointly measurable in (omega, x)); only then is a "
             "measurable minimizer guaranteed to exist";
    case HypothesisViolation::Kind::NonMeasurableEta:
      return "the right-hand side / optimal value must be a random variable (constant on every atom)";
    case HypothesisViolation::Kind::NonMeasurableSet:
      return "the feasible set map must be measurable (the same set on every scenario of an atom)";
  }
  return "";
}

Box required_region(const Problem& p, std::string_view command) {
  if (p.search_box) return *p.search_box;
  if (p.feasible_set) {
    const auto* first = std::get_if<Box>(&p.feasible_set->sets.front());
    const bool constant_box = first && std::all_of(p.feasible_set->sets.begin(), p.feasible_set->sets.end(),
                                                   [&](const SetDescription& s) {
                                                     const auto* b = std::get_if<Box>(&s);
                                                     return b && *b == *first;
                                                   });
    if (constant_box) return *first;
  }
  throw SchemaError("/search_box", "/search_box: command " + std::string(command) +
                                       " needs a search box (or a feasible set that is the same box everywhere)");
}

const RandomSet& required_set(const Problem& p, std::string_view command) {
  if (!p.feasible_set) {
    throw SchemaError("/feasible_set", "/feasible_set: command " + std::string(command) + " needs a feasible set");
  }
  return *p.feasible_set;
}

/// Probes for measurability checks: the document's own, else the default
/// grid over the search box and over the hull of the feasible set, plus any
/// finite feasible points.
std::vector<Point> probes_for(const Problem& p) {
  if (p.probes) return *p.probes;
  std::vector<Point> probes;
  if (p.search_box) probes = default_probe_grid(*p.search_box);
  if (p.feasible_set) {
    std::optional<Box> hull;
    for (const auto& set : p.feasible_set->sets) {
      auto b = bounding_box(set);
      if (!b) continue;
      if (!hull) {
        hull = b;
        continue;
      }
      for (int i = 0; i < p.dimension; ++i) {
        hull->lower[i] = std::min(hull->lower[i], b->lower[i]);
        hull->upper[i] = std::max(hull->upper[i], b->upper[i]);
      }
    }
    if (hull) {
      auto more = default_probe_grid(*hull);
      probes.insert(probes.end(), more.begin(), more.end());
    }
    for (const auto& set : p.feasible_set->sets) {
      if (const auto* cloud = std::get_if<PointCloud>(&set)) {
        probes.insert(probes.end(), cloud->points.begin(), cloud->points.end());
      }
    }
  }
  if (p.candidate) probes.insert(probes.end(), p.candidate->values.begin(), p.candidate->values.end());
  if (probes.empty()) {
    throw SchemaError("/probes", "/probes: no probes, search box, feasible set or candidate to probe f with");
  }
  return probes;
}

ojson scenario_header(const ProbSpace& space, std::size_t s) {
  ojson j;
  j["id"] = space.id(s);
  j["atom"] = space.atom_of(s);
  return j;
}

ojson box_json(const Box& b) { return ojson{{"lower", detail::point_json(b.lower)}, {"upper", detail::point_json(b.upper)}}; }

// Commands ------------------------------------------------------------------

void cmd_solve_rop(const Context& ctx, ojson& report) {
  const RandomSet& c = required_set(ctx.problem, "solve-rop");
  const RopResult r = solve_rop(ctx.f, c, ctx.solve);
  int excluded = 0;
  ojson scenarios = ojson::array();
  for (std::size_t s = 0; s < ctx.space.size(); ++s) {
    const GlobalMin& g = r.optimal.per_scenario[s];
    excluded += g.excluded;
    ojson j = scenario_header(ctx.space, s);
    j["eta"] = r.optimal.eta.values[s][0];
    j["xi"] = detail::point_json(r.selection.points[s]);
    j["certificate"] = detail::certificate_json(ctx.space, r.selection.certificates[s]);
    j["grid_value"] = g.grid_value;
    j["grid_x"] = detail::point_json(g.grid_x);
    j["polished"] = g.polished;
    j["excluded_grid_points"] = g.excluded;
    scenarios.push_back(std::move(j));
  }
  report["verdicts"] = ojson{{"eta", detail::verdict_json(ctx.space, r.optimal.verdict)},
                             {"xi", detail::verdict_json(ctx.space, r.selection.measurable)}};
  report["scenarios"] = std::move(scenarios);
  report["diagnostics"] = ojson{{"excluded_grid_points", excluded}};
}

void cmd_solve_rlop(const Context& ctx, ojson& report) {
  const Box region = required_region(ctx.problem, "solve-rlop");
  const RlopResult r = solve_rlop(ctx.f, region, ctx.solve);
  ojson scenarios = ojson::array();
  for (std::size_t s = 0; s < ctx.space.size(); ++s) {
    ojson j = scenario_header(ctx.space, s);
    j["xi"] = detail::point_json(r.selection.points[s]);
    j["value"] = eval_f(ctx.f, s, r.selection.points[s]);
    j["certificate"] = detail::certificate_json(ctx.space, r.selection.certificates[s]);
    scenarios.push_back(std::move(j));
  }
  StationaryDiagnostics total;
  ojson atoms = ojson::array();
  for (const auto& a : r.atoms) {
    ojson j;
    j["atom"] = a.atom;
    j["representative"] = ctx.space.id(a.representative);
    ojson pts = ojson::array();
    for (const auto& p : a.stationary) pts.push_back(detail::stationary_point_json(p));
    j["stationary"] = std::move(pts);
    j["diagnostics"] = detail::diagnostics_json(a.diagnostics);
    total.starts += a.diagnostics.starts;
    total.singular_starts += a.diagnostics.singular_starts;
    total.failed_starts += a.diagnostics.failed_starts;
    total.outside_region += a.diagnostics.outside_region;
    atoms.push_back(std::move(j));
  }
  report["region"] = box_json(region);
  report["convex"] = r.convex;
  report["verdicts"] = ojson{{"xi", detail::verdict_json(ctx.space, r.selection.measurable)}};
  report["scenarios"] = std::move(scenarios);
  report["atoms"] = std::move(atoms);
  report["diagnostics"] = detail::diagnostics_json(total);
}

void cmd_check_measurable(const Context& ctx, ojson& report) {
  const auto probes = probes_for(ctx.problem);
  ojson verdicts;
  ojson fj = detail::verdict_json(ctx.space, check_joint_measurability(ctx.f, probes));
  fj["probes"] = probes.size();
  verdicts["f"] = std::move(fj);
  if (ctx.f.body().num_params() > 0) {
    verdicts["params"] = detail::verdict_json(ctx.space, is_measurable_rv(ctx.space, {ctx.f.space(), ctx.f.params()}));
  }
  if (ctx.problem.feasible_set) {
    verdicts["feasible_set"] = detail::verdict_json(ctx.space, is_measurable_setmap(ctx.space, *ctx.problem.feasible_set));
  }
  if (ctx.problem.candidate) {
    verdicts["candidate"] = detail::verdict_json(ctx.space, is_measurable_rv(ctx.space, *ctx.problem.candidate));
  }
  report["verdicts"] = std::move(verdicts);
}

void cmd_stationary(const Context& ctx, ojson& report) {
  const Box region = required_region(ctx.problem, "stationary");
  StationaryDiagnostics total;
  ojson scenarios = ojson::array();
  for (std::size_t s = 0; s < ctx.space.size(); ++s) {
    const auto r = find_stationary_points(ctx.f, s, region, ctx.solve.newton);
    ojson j = scenario_header(ctx.space, s);
    ojson pts = ojson::array();
    for (const auto& p : r.points) pts.push_back(detail::stationary_point_json(p));
    j["points"] = std::move(pts);
    j["diagnostics"] = detail::diagnostics_json(r.diagnostics);
    total.starts += r.diagnostics.starts;
    total.singular_starts += r.diagnostics.singular_starts;
    total.failed_starts += r.diagnostics.failed_starts;
    total.outside_region += r.diagnostics.outside_region;
    scenarios.push_back(std::move(j));
  }
  report["region"] = box_json(region);
  report["scenarios"] = std::move(scenarios);
  report["diagnostics"] = detail::diagnostics_json(total);
}

void cmd_necessary(const Context& ctx, ojson& report) {
  if (!ctx.problem.candidate) throw SchemaError("/candidate", "/candidate: command necessary needs a candidate");
  const NecessaryReport r = check_necessary_conditions(ctx.f, *ctx.problem.candidate);
  ojson scenarios = ojson::array();
  for (std::size_t s = 0; s < r.scenarios.size(); ++s) {
    const auto& c = r.scenarios[s];
    ojson j = scenario_header(ctx.space, s);
    j["x"] = detail::point_json(ctx.problem.candidate->values[s]);
    j["grad_norm"] = c.grad_norm;
    j["grad_ok"] = c.grad_ok;
    j["psd_ok"] = c.psd_ok;
    j["classification"] = to_string(c.classification);
    scenarios.push_back(std::move(j));
  }
  report["all_ok"] = r.all_ok();
  report["random_solution_candidate"] = r.all_ok() && r.measurable.measurable;
  report["verdicts"] = ojson{{"candidate", detail::verdict_json(ctx.space, r.measurable)}};
  report["scenarios"] = std::move(scenarios);
}

void cmd_oracle(const Context& ctx, ojson& report) {
  RandomSet c;
  if (ctx.problem.feasible_set) {
    c = *ctx.problem.feasible_set;
  } else {
    c = RandomSet::constant(ctx.problem.space, ctx.problem.dimension, required_region(ctx.problem, "oracle"));
  }
  const OptimalValue r = optimal_value(ctx.f, c, ctx.solve.grid, false);
  int excluded = 0;
  ojson scenarios = ojson::array();
  for (std::size_t s = 0; s < ctx.space.size(); ++s) {
    const GlobalMin& g = r.per_scenario[s];
    excluded += g.excluded;
    ojson j = scenario_header(ctx.space, s);
    j["value"] = g.grid_value;
    j["x"] = detail::point_json(g.grid_x);
    j["excluded_grid_points"] = g.excluded;
    scenarios.push_back(std::move(j));
  }
  report["verdicts"] = ojson{{"eta", detail::verdict_json(ctx.space, r.verdict)}};
  report["scenarios"] = std::move(scenarios);
  report["diagnostics"] = ojson{{"excluded_grid_points", excluded}};
}

// Error mapping -----------------------------------------------------------------

int record_error(ojson& report, const ProbSpace* space) {
  ojson err;
  int code = kInputError;
  auto ids = [&](const std::vector<std::size_t>& scenarios) {
    if (space) return detail::ids_json(*space, scenarios);
    ojson a = ojson::array();
    for (auto s : scenarios) a.push_back(s);
    return a;
  };
  try {
    throw;
  } catch (const DocumentParseError& e) {
    err["type"] = "ParseError";
    err["pointer"] = e.pointer();
    err["offset"] = e.offset();
    err["expected"] = e.expected();
    err["message"] = e.what();
  } catch (const SchemaError& e) {
    err["type"] = "SchemaError";
    err["pointer"] = e.pointer();
    err["message"] = e.what();
  } catch (const IoError& e) {
    err["type"] = "IoError";
    err["message"] = e.what();
  } catch (const HypothesisViolation& e) {
    code = kRefused;
    err["type"] = "HypothesisViolation";
    err["kind"] = to_string(e.kind());
    err["message"] = e.what();
    err["hypothesis"] = hypothesis_text(e.kind());
    if (e.witness() && space) err["witness"] = detail::witness_json(*space, *e.witness());
  } catch (const NoSolution& e) {
    code = kNoSolution;
    err["type"] = "NoSolution";
    err["kind"] = to_string(e.kind());
    err["message"] = e.what();
    err["scenarios"] = ids(e.scenarios());
  } catch (const EmptyFeasible& e) {
    code = kNoSolution;
    err["type"] = "EmptyFeasible";
    err["message"] = e.what();
    err["scenarios"] = ids({e.scenario()});
  } catch (const EmptySet& e) {
    code = kNoSolution;
    err["type"] = "EmptySet";
    err["message"] = e.what();
    err["scenarios"] = ids({e.scenario()});
  } catch (const EvalError& e) {
    err["type"] = "EvalError";
    err["kind"] = to_string(e.kind());
    err["message"] = e.what();
  } catch (const Error& e) {
    err["type"] = "InputError";
    err["message"] = e.what();
  } catch (const std::exception& e) {
    err["type"] = "InternalError";
    err["message"] = e.what();
  }
  report["status"] = code == kRefused ? "refused" : code == kNoSolution ? "no_solution" : "input_error";
  report["exit_code"] = code;
  report["error"] = std::move(err);
  return code;
}

ojson report_skeleton(std::string_view command) {
  ojson report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = std::string(command);
  report["status"] = "ok";
  report["exit_code"] = static_cast<int>(kOk);
  return report;
}

}  // namespace

RunResult run_problem(std::string_view command, const Problem& problem, const RunOptions& opts) {
  RunResult out;
  out.report = report_skeleton(command);
  const ProbSpace& space = *problem.space;

  Context ctx{problem, space, *problem.objective, {}, opts.seed.value_or(problem.options.seed)};
  ctx.solve.grid = opts.grid.value_or(problem.options.grid);
  ctx.solve.eq_tol = problem.options.eq_tol;
  ctx.solve.polish = opts.polish || problem.options.polish;
  ctx.solve.newton.grid = problem.options.newton_grid;
  ctx.solve.newton.definiteness_tol = problem.options.definiteness_tol;
  ctx.solve.verify.definiteness_tol = problem.options.definiteness_tol;
  ctx.solve.verify.seed = ctx.seed;
  ctx.solve.probes = problem.probes;

  out.report["options"] = ojson{{"grid", ctx.solve.grid},
                                {"newton_grid", ctx.solve.newton.grid},
                                {"seed", ctx.seed},
                                {"polish", ctx.solve.polish}};
  ojson atoms = ojson::array();
  for (const auto& atom : space.atoms()) atoms.push_back(detail::ids_json(space, atom));
  out.report["space"] = ojson{{"scenarios", space.scenarios()}, {"atoms", std::move(atoms)}};

  try {
    if (command == "solve-rop") {
      cmd_solve_rop(ctx, out.report);
    } else if (command == "solve-rlop") {
      cmd_solve_rlop(ctx, out.report);
    } else if (command == "check-measurable") {
      cmd_check_measurable(ctx, out.report);
    } else if (command == "stationary") {
      cmd_stationary(ctx, out.report);
    } else if (command == "necessary") {
      cmd_necessary(ctx, out.report);
    } else if (command == "oracle") {
      cmd_oracle(ctx, out.report);
    } else {
      throw SchemaError("", "unknown command \"" + std::string(command) + "\"");
    }
  } catch (...) {
    out.exit_code = record_error(out.report, &space);
  }
  return out;
}

RunResult run_file(std::string_view command, const std::filesystem::path& input, const RunOptions& opts) {
  std::optional<Problem> problem;
  try {
    problem = load_problem(input);
  } catch (...) {
    RunResult out;
    out.report = report_skeleton(command);
    out.exit_code = record_error(out.report, nullptr);
    return out;
  }
  return run_problem(command, *problem, opts);
}

int run(std::string_view command, const std::filesystem::path& input, const std::filesystem::path& output,
        const RunOptions& opts) {
  RunResult r = run_file(command, input, opts);
  write_atomically(output, dump_report(r.report));
  return r.exit_code;
}

}  // namespace randopt::cli
