#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "infdoob/cli.hpp"
#include "infdoob/serialization.hpp"

using namespace infdoob;
using cli::execute;
using cli::Options;

namespace {

Options command(const std::string& name) {
  Options o;
  o.command = name;
  return o;
}

Json unit_system(int depth) {
  return {{"space", {{"depth", depth}, {"branching", 2}}},
          {"seq", {{"head", {2.0, 4.0}}, {"tail_mass", 0.25}}}};
}

Json depth_one_system() {
  return {{"system",
           {{"space", {{"depth", 1}, {"branching", 2}}},
            {"seq", {{"head", {2.0}}, {"tail_mass", 0.5}}},
            {"weights", {{1.0, 4.0}}}}}};
}

void expect_report_schema(const Json& doc) {
  for (const char* key : {"command", "status", "exit_code", "metadata", "reports",
                          "result"}) {
    ASSERT_TRUE(doc.contains(key)) << key;
  }
  for (const char* key : {"seed", "family", "tolerance", "elapsed_ms"}) {
    EXPECT_TRUE(doc["metadata"].contains(key)) << key;
  }
  for (const Json& r : doc["reports"]) {
    for (const char* key : {"id", "lhs", "rhs", "constant", "slack", "tolerance",
                            "pass", "metrics", "steps"}) {
      EXPECT_TRUE(r.contains(key)) << key;
    }
    if (r["slack"].is_number()) {
      EXPECT_EQ(r["pass"].get<bool>(),
                r["slack"].get<double>() >= -r["tolerance"].get<double>());
    }
  }
}

TEST(Cli, WeightsConstantsOnUnitSystem) {
  Json config = {{"system", unit_system(2)}};
  const auto out = execute(config, command("weights-constants"));
  EXPECT_EQ(out.exit_code, cli::kExitPass);
  const Json& r = out.document["result"];
  EXPECT_EQ(r["A"].get<double>(), 1.0);
  EXPECT_EQ(r["RH"]["value"].get<double>(), 1.0);
  EXPECT_EQ(r["S"]["value"].get<double>(), 1.0);
  expect_report_schema(out.document);
}

TEST(Cli, EnumerateCountAndCapSuggestion) {
  Json config = {{"space", {{"depth", 2}, {"branching", 2}}}};
  const auto out = execute(config, command("enumerate-stopping-times"));
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_EQ(out.document["result"]["count"].get<std::uint64_t>(), 26u);

  Json big = {{"space", {{"depth", 3}, {"branching", 2}}}, {"cap", 100}};
  const auto capped = execute(big, command("enumerate-stopping-times"));
  EXPECT_EQ(capped.exit_code, cli::kExitInputError);
  EXPECT_NE(capped.document["error"].get<std::string>().find("sample:COUNT"),
            std::string::npos);
}

TEST(Cli, ConjugateProductPowersOfTwo) {
  std::vector<double> head;
  for (int i = 1; i <= 40; ++i) head.push_back(std::ldexp(1.0, i));
  // The reciprocals after 2^40 are again halving, so the tail mass is 2^-40.
  Json config = {{"seq",
                  {{"head", head},
                   {"tail_mass", std::ldexp(1.0, -40)},
                   {"tail_ratio", 0.5}}},
                 {"rel_tol", 1e-12}};
  const auto out = execute(config, command("conjugate-product"));
  EXPECT_EQ(out.exit_code, 0);
  const Json& iv = out.document["result"]["interval"];
  EXPECT_NEAR(iv["lo"].get<double>(), 3.462746619, 5e-10);
  EXPECT_NEAR(iv["hi"].get<double>(), 3.462746619, 5e-10);
  EXPECT_LE(iv["width"].get<double>(), 1e-9);
}

TEST(Cli, VerifySuitesPass) {
  Json config = depth_one_system();
  config["functions"] = {{1.0, 0.0}};
  const auto ap = execute(config, command("verify-ap"));
  EXPECT_EQ(ap.exit_code, 0) << ap.document.dump(2);
  expect_report_schema(ap.document);
  const auto sp = execute(config, command("verify-sp"));
  EXPECT_EQ(sp.exit_code, 0) << sp.document.dump(2);
  expect_report_schema(sp.document);
  const auto trace = execute(config, command("sawyer-trace"));
  EXPECT_EQ(trace.exit_code, 0);
  EXPECT_TRUE(trace.document["result"]["trace"].contains("cells"));
}

TEST(Cli, HolderChecksAndEstimate) {
  Json config = {{"space", {{"depth", 2}, {"branching", 2}}},
                 {"seq", {{"head", {3.0, 3.0}}, {"tail_mass", 1.0 / 3.0}}},
                 {"function_generator", {{"seed", 5}, {"count", 6}}}};
  const auto h = execute(config, command("check-holder"));
  EXPECT_EQ(h.exit_code, 0);
  EXPECT_EQ(h.reports.size(), 6u);
  const auto c = execute(config, command("check-conditional-holder"));
  EXPECT_EQ(c.exit_code, 0);
  expect_report_schema(c.document);

  Json est = depth_one_system();
  est["inequality"] = "strong";
  est["trials"] = 10;
  const auto e = execute(est, command("estimate-constant"));
  EXPECT_EQ(e.exit_code, 0);
  EXPECT_EQ(e.document["result"]["inequality"], "strong");
}

TEST(Cli, ViolationExitCode) {
  // An empty sampled family gives C_S = 0, which no nonzero g can satisfy.
  Json config = depth_one_system();
  config["functions"] = {{1.0, 0.0}};
  config["family"] = {{"count", 0}, {"seed", 1}};
  const auto out = execute(config, command("verify-sp"));
  EXPECT_EQ(out.exit_code, cli::kExitViolation);
  EXPECT_EQ(out.document["status"], "fail");
  EXPECT_EQ(out.document["metadata"]["family"], "sample");

  Options negative = command("verify-sp");
  negative.tol = -0.5;
  EXPECT_EQ(execute(depth_one_system(), negative).exit_code,
            cli::kExitInputError);
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(execute(Json::object(), command("weights-constants")).exit_code,
            cli::kExitInputError);
  EXPECT_EQ(execute(Json::object(), command("no-such-command")).exit_code,
            cli::kExitInputError);
  Json bad = {{"system",
               {{"space", {{"depth", 1}, {"branching", 2}}},
                {"seq", {{"head", {2.0}}, {"tail_mass", 0.5}}},
                {"weights", {{1.0, -4.0}}}}}};
  EXPECT_EQ(execute(bad, command("weights-constants")).exit_code,
            cli::kExitInputError);
  Json wrong_size = depth_one_system();
  wrong_size["functions"] = {{1.0, 0.0, 3.0}};
  const auto out = execute(wrong_size, command("verify-ap"));
  EXPECT_EQ(out.exit_code, cli::kExitInputError);
  EXPECT_NE(out.document["error"].get<std::string>().find("functions"),
            std::string::npos);

  EXPECT_THROW(cli::parse_family("sample:x", 0), std::exception);
  EXPECT_TRUE(cli::parse_family("all", 0).exhaustive());
  EXPECT_EQ(cli::parse_family("sample:12", 0).count, 12u);
}

TEST(Cli, RunFromConfigFileWritesJsonAndCsv) {
  const auto dir = std::filesystem::temp_directory_path() / "infdoob_cli_test";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "config.json";
  {
    Json config = {{"command", "weights-constants"}, {"system", unit_system(1)}};
    std::ofstream(cfg) << config.dump();
  }
  Options o = command("run");
  o.config_path = cfg.string();
  o.out_path = (dir / "out.json").string();
  o.format = "json+csv";
  std::ostringstream out, err;
  EXPECT_EQ(cli::run(o, out, err), 0) << err.str();
  EXPECT_TRUE(std::filesystem::exists(dir / "out.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "out.csv"));
  std::ifstream in(dir / "out.json");
  const Json doc = Json::parse(in);
  EXPECT_EQ(doc["command"], "weights-constants");

  const auto bad = dir / "bad.json";
  std::ofstream(bad) << "{not json";
  Options b = command("run");
  b.config_path = bad.string();
  std::ostringstream out2, err2;
  EXPECT_EQ(cli::run(b, out2, err2), cli::kExitInputError);
  EXPECT_NE(err2.str().find("malformed"), std::string::npos);

  Options no_out = o;
  no_out.out_path.reset();
  EXPECT_EQ(cli::run(no_out, out2, err2), cli::kExitInputError);
  std::filesystem::remove_all(dir);
}

Json generate_config(const std::string& kind, std::uint64_t seed, double spread) {
  return {{"space", {{"depth", 2}, {"branching", 2}}},
          {"seq", {{"head", {2.0, 4.0}}, {"tail_mass", 0.25}}},
          {"kind", kind},
          {"seed", seed},
          {"spread", spread},
          {"count", 5}};
}

TEST(Cli, GenerateIsDeterministicAndRoundTrips) {
  for (const char* kind : {"weights", "functions"}) {
    const auto a = execute(generate_config(kind, 11, 10.0), command("generate"));
    const auto b = execute(generate_config(kind, 11, 10.0), command("generate"));
    const auto c = execute(generate_config(kind, 12, 10.0), command("generate"));
    ASSERT_EQ(a.exit_code, 0);
    EXPECT_EQ(a.document.dump(), b.document.dump());
    EXPECT_NE(a.document.dump(), c.document.dump());
    for (const Json& inst : a.document["instances"]) {
      if (std::string(kind) == "weights") {
        const WeightSystem ws = weight_system_from_json(inst);
        for (const Rv& w : ws.omegas()) {
          for (double x : w.values) {
            EXPECT_GE(x, 0.1 * (1 - 1e-12));
            EXPECT_LE(x, 10.0 * (1 + 1e-12));
          }
        }
      } else {
        const TreeSpace space = space_from_json(inst["space"]);
        const ExponentSequence seq = sequence_from_json(inst["seq"]);
        EXPECT_NO_THROW(function_vector_from_json(space, seq, inst));
      }
    }
  }
}

TEST(Cli, GenerateSpreadOneGivesOnes) {
  const auto out =
      execute(generate_config("weights", 3, 1.0), command("generate"));
  ASSERT_EQ(out.exit_code, 0);
  for (const Json& inst : out.document["instances"]) {
    const WeightSystem ws = weight_system_from_json(inst);
    for (const Rv& w : ws.omegas()) {
      for (double x : w.values) EXPECT_EQ(x, 1.0);
    }
    for (double x : ws.v().values) EXPECT_EQ(x, 1.0);
  }
}

TEST(Cli, SubcommandsAreListed) {
  const auto& names = cli::subcommands();
  for (const char* n : {"check-holder", "check-conditional-holder",
                        "weights-constants", "verify-ap", "verify-sp",
                        "sawyer-trace", "enumerate-stopping-times",
                        "conjugate-product", "estimate-constant", "generate"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  }
}

}  // namespace
