#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "infdoob/filtration.hpp"
#include "infdoob/report.hpp"
#include "infdoob/serialization.hpp"

namespace infdoob::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInputError = 2;

// Command-line overrides applied on top of the config.
struct Options {
  std::string command;  // "run" takes the command from the config
  std::optional<std::string> config_path;
  std::optional<std::string> out_path;
  std::string format = "json";  // json | json+csv
  std::optional<std::uint64_t> seed;
  std::optional<std::string> family;  // all | sample:COUNT
  std::optional<double> tol;
};

struct Outcome {
  int exit_code = kExitPass;
  Json document;
  std::vector<VerificationReport> reports;
};

const std::vector<std::string>& subcommands();

// "all", "sample:COUNT", or {"count":..,"seed":..}.
StoppingFamily parse_family(const Json& family, std::uint64_t default_seed);

// Executes one command against an in-memory config. Never throws: input
// errors come back as exit code 2 with an "error" entry in the document.
Outcome execute(const Json& config, const Options& options);

// Reads the config, runs it and writes the artifacts (JSON to --out or
// stdout, CSV next to --out), each file written once and atomically.
int run(const Options& options, std::ostream& out, std::ostream& err);

}  // namespace infdoob::cli
