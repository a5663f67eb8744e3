#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "randopt/errors.hpp"
#include "randopt/optimize.hpp"
#include "randopt/probspace.hpp"
#include "randopt/random_function.hpp"
#include "randopt/selection.hpp"

namespace randopt::cli {

inline constexpr int kSchemaVersion = 1;

/// Exit codes of `randopt`.
enum ExitCode : int { kOk = 0, kRefused = 1, kNoSolution = 2, kInputError = 3 };

/// The input file could not be read or the output could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// The document is valid JSON but violates the problem schema. `pointer` is a
/// JSON pointer to the offending value ("" for the whole document).
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& what) : Error(what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

/// An expression inside the document failed to parse.
class DocumentParseError : public ParseError {
 public:
  DocumentParseError(std::string pointer, const ParseError& e)
      : ParseError(e.offset(), e.expected(), pointer + ": " + e.what()), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

struct ProblemOptions {
  int grid = 101;         // grid points per dimension for global searches
  int newton_grid = 9;    // Newton starts per dimension
  std::uint64_t seed = 0;
  bool polish = false;
  double definiteness_tol = kDefaultDefinitenessTol;
  double eq_tol = 1e-9;
};

struct Problem {
  SpacePtr space;
  int dimension = 0;
  std::string expression;
  std::optional<RandomFunction> objective;
  std::optional<RandomSet> feasible_set;
  std::optional<Box> search_box;
  std::optional<RandomVariableRn> candidate;
  std::optional<std::vector<Point>> probes;
  ProblemOptions options;
};

/// Validates a problem document. Throws SchemaError or DocumentParseError.
Problem parse_problem(const nlohmann::json& doc);

/// Reads and validates a problem file. Throws IoError, SchemaError or
/// DocumentParseError.
Problem load_problem(const std::filesystem::path& path);

struct RunOptions {
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
  bool polish = false;
};

inline constexpr std::string_view kCommands[] = {"solve-rop",  "solve-rlop", "check-measurable",
                                                  "stationary", "necessary",  "oracle"};

struct RunResult {
  int exit_code = kOk;
  nlohmann::ordered_json report;
};

/// Runs a command on an already parsed document. Never throws for library
/// errors; they are mapped to exit codes and recorded in the report.
RunResult run_problem(std::string_view command, const Problem& problem, const RunOptions& opts = {});

/// Loads `input`, runs the command and returns the report; input errors
/// become exit code 3 with an error entry.
RunResult run_file(std::string_view command, const std::filesystem::path& input, const RunOptions& opts = {});

/// run_file + atomic write of the report to `output`. Returns the exit code.
int run(std::string_view command, const std::filesystem::path& input, const std::filesystem::path& output,
        const RunOptions& opts = {});

/// Deterministic serialization: two-space indentation, keys in insertion
/// order, floating-point numbers with 17 significant digits, non-finite
/// numbers as null.
std::string dump_report(const nlohmann::ordered_json& report);

/// Writes `text` to a temporary file next to `path` and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& text);

}  // namespace randopt::cli
