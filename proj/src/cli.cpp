#include "infdoob/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "infdoob/errors.hpp"
#include "infdoob/exponents.hpp"
#include "infdoob/generate.hpp"
#include "infdoob/holder.hpp"
#include "infdoob/theorems.hpp"
#include "infdoob/weights.hpp"

namespace infdoob::cli {
namespace {

constexpr std::size_t kDefaultGeneratedFunctions = 8;
constexpr double kDefaultSpread = 10.0;
constexpr std::uint64_t kDefaultTrials = 100;
constexpr std::uint64_t kEmitTimesLimit = 10'000;

// Everything a command needs, resolved from config and flags.
struct Context {
  const Json& config;
  std::uint64_t seed = 0;
  StoppingFamily family;
  double tol = kDefaultRelTol;
};

std::uint64_t get_u64(const Json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw PreconditionError(std::string(key) + " must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

double get_double(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    throw PreconditionError(std::string(key) + " must be a number");
  }
  return j[key].get<double>();
}

const Json& require(const Json& j, const char* key) {
  if (!j.contains(key)) {
    throw PreconditionError(std::string("config is missing \"") + key + "\"");
  }
  return j[key];
}

GenerateParams generator_params(const Json& g, std::uint64_t seed,
                                std::size_t components) {
  GenerateParams params;
  params.seed = get_u64(g, "seed", seed);
  params.spread = get_double(g, "spread", kDefaultSpread);
  params.components = get_u64(g, "components", components);
  return params;
}

WeightSystem load_system(const Context& ctx) {
  const Json& c = ctx.config;
  if (c.contains("system")) return weight_system_from_json(c["system"]);
  if (c.contains("weights_generator")) {
    const Json& g = c["weights_generator"];
    TreeSpace space = space_from_json(require(c, "space"));
    ExponentSequence seq = sequence_from_json(require(c, "seq"));
    const auto params = generator_params(g, ctx.seed, seq.head_size());
    return generate_weights(space, seq, params, get_u64(g, "instance", 2));
  }
  return weight_system_from_json(c);
}

bool is_single_vector(const Json& j) {
  if (j.is_object()) return true;
  if (!j.is_array() || j.empty()) return true;
  const Json& first = j[0];
  return first.is_array() && (first.empty() || first[0].is_number() ||
                              first[0].is_string());
}

std::vector<FunctionVector> load_functions(const Context& ctx,
                                           const TreeSpace& space,
                                           const ExponentSequence& seq) {
  const Json& c = ctx.config;
  std::vector<FunctionVector> out;
  if (c.contains("functions")) {
    const Json& f = c["functions"];
    if (is_single_vector(f)) {
      out.push_back(function_vector_from_json(space, seq, f));
    } else {
      for (const Json& one : f) {
        out.push_back(function_vector_from_json(space, seq, one));
      }
    }
    return out;
  }
  const Json g = c.contains("function_generator") ? c["function_generator"]
                                                   : Json::object();
  const auto params = generator_params(g, ctx.seed, seq.head_size());
  const std::uint64_t count =
      get_u64(g, "count", get_u64(g, "trials", kDefaultGeneratedFunctions));
  for (std::uint64_t i = 0; i < count; ++i) {
    out.push_back(generate_functions(space, seq, params, i));
  }
  return out;
}

void label(VerificationReport& r, std::size_t instance) {
  r.labels["instance"] = std::to_string(instance);
}

using Reports = std::vector<VerificationReport>;
using Handler = std::function<Json(const Context&, Reports&)>;

Json cmd_check_holder(const Context& ctx, Reports& reports) {
  const TreeSpace space = space_from_json(require(ctx.config, "space"));
  const ExponentSequence seq = sequence_from_json(require(ctx.config, "seq"));
  const auto fs = load_functions(ctx, space, seq);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    reports.push_back(holder_integral_check(space, fs[i], seq));
    label(reports.back(), i);
  }
  return {{"instances", fs.size()}};
}

Json cmd_check_conditional_holder(const Context& ctx, Reports& reports) {
  const TreeSpace space = space_from_json(require(ctx.config, "space"));
  const ExponentSequence seq = sequence_from_json(require(ctx.config, "seq"));
  const auto fs = load_functions(ctx, space, seq);
  int lo = 0;
  int hi = space.depth();
  if (ctx.config.contains("level")) {
    lo = hi = static_cast<int>(get_u64(ctx.config, "level", 0));
    space.check_level(lo);
  }
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (int n = lo; n <= hi; ++n) {
      reports.push_back(holder_conditional_check(space, fs[i], seq, n));
      label(reports.back(), i);
    }
  }
  return {{"instances", fs.size()}, {"levels", {lo, hi}}};
}

Json cmd_weights_constants(const Context& ctx, Reports&) {
  const WeightSystem ws = load_system(ctx);
  const ConstantEstimate rh = rh_constant(ws, ctx.family);
  const ConstantEstimate sp = sp_constant(ws, ctx.family);
  return {{"A", number(ap_constant(ws))},
          {"RH", to_json(rh)},
          {"S", to_json(sp)},
          {"family_size", rh.family_size}};
}

Json cmd_verify_ap(const Context& ctx, Reports& reports) {
  const WeightSystem ws = load_system(ctx);
  const auto fs = load_functions(ctx, ws.space(), ws.seq());
  const double c_a = ap_constant(ws);
  Json per = Json::array();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const FunctionVector& f = fs[i];
    reports.push_back(verify_ap_to_testing(ws, f, ctx.family));
    label(reports.back(), i);
    const double c_test = testing_constant(ws, f, ctx.family);
    reports.push_back(verify_testing_to_weak(ws, f, c_test));
    label(reports.back(), i);
    const double c_weak = localized_weak_constant(ws, f, ctx.family);
    reports.push_back(verify_weak_to_testing(ws, f, c_weak, ctx.family).report);
    label(reports.back(), i);
    per.push_back({{"c_test", number(c_test)}, {"c_weak", number(c_weak)}});
  }
  reports.push_back(verify_testing_to_ap(ws, ctx.family));
  return {{"C_A", number(c_a)},
          {"C_RH", number(reports.back().metrics["c_rh"])},
          {"instances", per}};
}

Json cmd_verify_sp(const Context& ctx, Reports& reports) {
  const WeightSystem ws = load_system(ctx);
  const auto gs = load_functions(ctx, ws.space(), ws.seq());
  const double c_s = sp_constant(ws, ctx.family).value;
  const double c_rh = rh_constant(ws, ctx.family).value;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    reports.push_back(
        sawyer_invariants(ws, sawyer_decomposition(ws, gs[i])));
    label(reports.back(), i);
    reports.push_back(verify_sp_to_strong(ws, gs[i], c_s, c_rh));
    label(reports.back(), i);
  }
  return {{"C_S", number(c_s)},
          {"C_RH", number(c_rh)},
          {"C_final", number(reports.empty()
                                 ? 0.0
                                 : reports.back().metrics["c_final"])}};
}

Json cmd_sawyer_trace(const Context& ctx, Reports& reports) {
  const WeightSystem ws = load_system(ctx);
  const auto gs = load_functions(ctx, ws.space(), ws.seq());
  if (gs.empty()) throw PreconditionError("sawyer-trace needs a function");
  const SawyerTrace trace = sawyer_decomposition(ws, gs.front());
  reports.push_back(sawyer_invariants(ws, trace));
  return {{"trace", to_json(trace)}};
}

Json cmd_enumerate(const Context& ctx, Reports&) {
  const TreeSpace space = space_from_json(require(ctx.config, "space"));
  StoppingFamily family = ctx.family;
  family.cap = get_u64(ctx.config, "cap", family.cap);
  const std::uint64_t recurrence = count_stopping_times(space);
  const bool emit_default = !family.exhaustive() || recurrence <= kEmitTimesLimit;
  const bool emit = ctx.config.value("emit_times", emit_default);
  Json times = Json::array();
  const std::uint64_t visited =
      for_each_in_family(space, family, [&](const StoppingTime& tau) {
        if (emit) times.push_back(to_json(tau)["values"]);
      });
  Json out = {{"count", visited},
              {"recurrence_count", recurrence},
              {"exhaustive", family.exhaustive()}};
  if (emit) out["times"] = std::move(times);
  return out;
}

Json cmd_conjugate_product(const Context& ctx, Reports&) {
  const ExponentSequence seq = sequence_from_json(require(ctx.config, "seq"));
  const double rel_tol = get_double(ctx.config, "rel_tol", kDefaultProductTol);
  const CertifiedInterval iv = conjugate_product(seq, rel_tol);
  Json out = {{"interval", to_json(iv)},
              {"finite", std::isfinite(iv.hi)},
              {"p", number(seq.p())}};
  if (ctx.config.contains("xi_n")) {
    const int n = static_cast<int>(get_u64(ctx.config, "xi_n", 1));
    out["xi"] = number(xi_constant(n));
    out["hl_bound"] = to_json(hl_bound_constant(seq, n, rel_tol));
  }
  return out;
}

Json cmd_estimate_constant(const Context& ctx, Reports&) {
  const WeightSystem ws = load_system(ctx);
  const InequalityId id = parse_inequality_id(
      require(ctx.config, "inequality").get<std::string>());
  const std::uint64_t trials = get_u64(ctx.config, "trials", kDefaultTrials);
  const ConstantEstimate est =
      estimate_best_constant(id, ws, trials, ctx.seed, ctx.family);
  Json out = to_json(est);
  out["inequality"] = to_string(id);
  out["trials"] = trials;
  out["seed"] = ctx.seed;
  return out;
}

Json cmd_generate(const Context& ctx, Reports&) {
  const TreeSpace space = space_from_json(require(ctx.config, "space"));
  const ExponentSequence seq = sequence_from_json(require(ctx.config, "seq"));
  const GenerateKind kind =
      parse_generate_kind(require(ctx.config, "kind").get<std::string>());
  const auto params = generator_params(ctx.config, ctx.seed, seq.head_size());
  const std::uint64_t count = get_u64(ctx.config, "count", 4);
  Json instances = Json::array();
  for (std::uint64_t i = 0; i < count; ++i) {
    if (kind == GenerateKind::weights) {
      instances.push_back(to_json(generate_weights(space, seq, params, i)));
    } else {
      Json f = to_json(generate_functions(space, seq, params, i));
      f["space"] = to_json(space);
      f["seq"] = to_json(seq);
      instances.push_back(std::move(f));
    }
  }
  return {{"kind", to_string(kind)},
          {"seed", params.seed},
          {"spread", params.spread},
          {"components", params.components},
          {"instances", instances}};
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"check-holder", cmd_check_holder},
      {"check-conditional-holder", cmd_check_conditional_holder},
      {"weights-constants", cmd_weights_constants},
      {"verify-ap", cmd_verify_ap},
      {"verify-sp", cmd_verify_sp},
      {"sawyer-trace", cmd_sawyer_trace},
      {"enumerate-stopping-times", cmd_enumerate},
      {"conjugate-product", cmd_conjugate_product},
      {"estimate-constant", cmd_estimate_constant},
      {"generate", cmd_generate},
  };
  return table;
}

void write_atomically(const std::filesystem::path& path,
                      const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw PreconditionError("cannot write " + tmp.string());
    f << text;
    if (!f.flush()) throw PreconditionError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, handler] : handlers()) v.push_back(name);
    return v;
  }();
  return names;
}

StoppingFamily parse_family(const Json& family, std::uint64_t default_seed) {
  if (family.is_string()) {
    const auto& s = family.get_ref<const std::string&>();
    if (s == "all") return StoppingFamily::all();
    const std::string prefix = "sample:";
    if (s.rfind(prefix, 0) == 0) {
      const std::string digits = s.substr(prefix.size());
      if (digits.empty() ||
          digits.find_first_not_of("0123456789") != std::string::npos) {
        throw PreconditionError("family sample count must be an integer");
      }
      return StoppingFamily::sample(std::stoull(digits), default_seed);
    }
    throw PreconditionError("family must be \"all\" or \"sample:COUNT\"");
  }
  if (family.is_object()) {
    return StoppingFamily::sample(get_u64(family, "count", 0),
                                  get_u64(family, "seed", default_seed));
  }
  throw PreconditionError("family must be \"all\", \"sample:COUNT\" or an object");
}

Outcome execute(const Json& config, const Options& options) {
  Outcome outcome;
  std::string command = options.command;
  try {
    if (!config.is_object()) throw PreconditionError("config must be an object");
    if (command.empty() || command == "run") {
      command = require(config, "command").get<std::string>();
    }
    auto it = handlers().find(command);
    if (it == handlers().end()) {
      throw PreconditionError("unknown command: " + command);
    }
    Context ctx{config, 0, StoppingFamily::all(), kDefaultRelTol};
    ctx.seed = options.seed ? *options.seed : get_u64(config, "seed", 0);
    if (options.family) {
      ctx.family = parse_family(Json(*options.family), ctx.seed);
    } else if (config.contains("family")) {
      ctx.family = parse_family(config["family"], ctx.seed);
    }
    ctx.tol = options.tol ? *options.tol : get_double(config, "tol", kDefaultRelTol);
    if (!(ctx.tol >= 0.0)) throw PreconditionError("tol must be nonnegative");

    const auto start = std::chrono::steady_clock::now();
    Reports reports;
    Json result = it->second(ctx, reports);
    const double elapsed = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    bool all_pass = true;
    Json report_json = Json::array();
    for (VerificationReport& r : reports) {
      apply_tolerance(r, ctx.tol);
      all_pass = all_pass && r.pass;
      report_json.push_back(to_json(r));
    }
    outcome.exit_code = all_pass ? kExitPass : kExitViolation;
    if (command == "generate") {
      // Generated instances are reproducible byte for byte, so no timings.
      outcome.document = std::move(result);
      outcome.document["command"] = command;
    } else {
      Json metadata = {{"seed", ctx.seed},
                       {"family", ctx.family.exhaustive() ? "all" : "sample"},
                       {"tolerance", ctx.tol},
                       {"elapsed_ms", elapsed}};
      if (config.contains("space")) {
        metadata["space_digest"] =
            space_digest(space_from_json(config["space"]));
      } else if (config.contains("system")) {
        metadata["space_digest"] =
            space_digest(space_from_json(config["system"]["space"]));
      }
      outcome.document = {{"command", command},
                          {"status", all_pass ? "pass" : "fail"},
                          {"exit_code", outcome.exit_code},
                          {"metadata", metadata},
                          {"reports", report_json},
                          {"result", result}};
    }
    outcome.reports = std::move(reports);
  } catch (const EnumerationCapError& e) {
    outcome = Outcome{};
    outcome.exit_code = kExitInputError;
    outcome.document = {
        {"command", command},
        {"status", "error"},
        {"exit_code", kExitInputError},
        {"error", std::string(e.what()) +
                      "; use --family sample:COUNT to sample stopping times"}};
  } catch (const std::exception& e) {
    outcome = Outcome{};
    outcome.exit_code = kExitInputError;
    outcome.document = {{"command", command},
                        {"status", "error"},
                        {"exit_code", kExitInputError},
                        {"error", e.what()}};
  }
  return outcome;
}

int run(const Options& options, std::ostream& out, std::ostream& err) {
  Json config = Json::object();
  if (options.format != "json" && options.format != "json+csv") {
    err << "error: --format must be json or json+csv\n";
    return kExitInputError;
  }
  if (options.format == "json+csv" && !options.out_path) {
    err << "error: --format json+csv needs --out\n";
    return kExitInputError;
  }
  if (options.config_path) {
    std::ifstream in(*options.config_path);
    if (!in) {
      err << "error: cannot read config " << *options.config_path << "\n";
      return kExitInputError;
    }
    try {
      config = Json::parse(in);
    } catch (const Json::parse_error& e) {
      err << "error: malformed JSON in " << *options.config_path << ": "
          << e.what() << "\n";
      return kExitInputError;
    }
  }
  const Outcome outcome = execute(config, options);
  if (outcome.document.contains("error")) {
    err << "error: " << outcome.document["error"].get<std::string>() << "\n";
  }
  const std::string text = outcome.document.dump(2) + "\n";
  try {
    if (options.out_path) {
      const std::filesystem::path path(*options.out_path);
      write_atomically(path, text);
      if (options.format == "json+csv") {
        std::filesystem::path csv = path;
        csv.replace_extension(".csv");
        write_atomically(csv, reports_csv(outcome.reports));
      }
    } else {
      out << text;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return outcome.exit_code;
}

}  // namespace infdoob::cli
