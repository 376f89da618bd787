#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "infdoob/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = infdoob::cli;
  CLI::App app{"Generalized Doob maximal operator verification toolkit",
               "infdoob"};
  app.require_subcommand(1);

  cli::Options opts;
  std::string family;
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  double tol = 0.0;

  const std::map<std::string, std::string> about = {
      {"check-holder", "Holder inequality for infinite families"},
      {"check-conditional-holder", "Holder inequality on the atoms of one level"},
      {"weights-constants", "A, RH and S constants of a weight system"},
      {"verify-ap", "weak-type equivalence chain for a weight system"},
      {"verify-sp", "strong-type bound through the Sawyer decomposition"},
      {"sawyer-trace", "dump the Sawyer decomposition of one function"},
      {"enumerate-stopping-times", "count or list the stopping times of a tree"},
      {"conjugate-product", "certified enclosure of prod p'_i"},
      {"estimate-constant", "seeded lower bound for a best constant"},
      {"generate", "seeded weight or function instances"},
      {"run", "run the command named in the config"}};

  auto names = cli::subcommands();
  names.push_back("run");
  for (const std::string& name : names) {
    const auto it = about.find(name);
    CLI::App* sub =
        app.add_subcommand(name, it == about.end() ? "" : it->second);
    sub->add_option("--config", config, "JSON config file");
    sub->add_option("--out", out, "output path (stdout when omitted)");
    sub->add_option("--format", opts.format, "json or json+csv")
        ->check(CLI::IsMember({"json", "json+csv"}));
    sub->add_option("--seed", seed, "seed override");
    sub->add_option("--family", family, "all or sample:COUNT");
    sub->add_option("--tol", tol, "relative tolerance");
    sub->callback([&opts, name] { opts.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInputError;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--config")) opts.config_path = config;
    if (sub->count("--out")) opts.out_path = out;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--family")) opts.family = family;
    if (sub->count("--tol")) opts.tol = tol;
  }
  if (!opts.config_path && opts.command == "run") {
    std::cerr << "error: run needs --config\n";
    return cli::kExitInputError;
  }
  return cli::run(opts, std::cout, std::cerr);
}
