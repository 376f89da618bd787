#include "infdoob/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "infdoob/errors.hpp"

namespace infdoob {
namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw PreconditionError(where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

double as_number(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  fail(where, "expected a number");
}

std::vector<double> as_numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Rv as_rv(const Json& j, std::size_t leaves, const std::string& where) {
  Rv r(as_numbers(j, where));
  if (r.size() != leaves) {
    fail(where, "expected " + std::to_string(leaves) + " leaf values, got " +
                    std::to_string(r.size()));
  }
  return r;
}

int as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

Json rv_json(const Rv& r) {
  Json a = Json::array();
  for (double x : r.values) a.push_back(number(x));
  return a;
}

Json metrics_json(const std::map<std::string, double>& m) {
  Json o = Json::object();
  for (const auto& [k, v] : m) o[k] = number(v);
  return o;
}

}  // namespace

Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

ExponentSequence sequence_from_json(const Json& j) {
  const std::string where = "seq";
  const auto head = as_numbers(field(j, "head", where), where + ".head");
  const double mass =
      j.contains("tail_mass") ? as_number(j["tail_mass"], where + ".tail_mass")
                              : 0.0;
  const double ratio = j.contains("tail_ratio")
                           ? as_number(j["tail_ratio"], where + ".tail_ratio")
                           : 0.5;
  return ExponentSequence(head, mass, ratio);
}

Json to_json(const ExponentSequence& seq) {
  Json head = Json::array();
  for (double p : seq.head()) head.push_back(p);
  return {{"head", head},
          {"tail_mass", seq.tail_mass()},
          {"tail_ratio", seq.tail_ratio()}};
}

TreeSpace space_from_json(const Json& j) {
  const std::string where = "space";
  const int depth = as_int(field(j, "depth", where), where + ".depth");
  const int branching =
      as_int(field(j, "branching", where), where + ".branching");
  if (!j.contains("leaf_probs") || j["leaf_probs"] == "uniform") {
    return TreeSpace::uniform(depth, branching);
  }
  return TreeSpace(depth, branching,
                   as_numbers(j["leaf_probs"], where + ".leaf_probs"));
}

Json to_json(const TreeSpace& space) {
  Json probs = Json::array();
  for (double q : space.probs()) probs.push_back(q);
  return {{"depth", space.depth()},
          {"branching", space.branching()},
          {"leaf_probs", probs}};
}

StoppingTime stopping_time_from_json(const Json& j) {
  const std::string where = "stopping_time";
  const Json& values = field(j, "values", where);
  if (!values.is_array()) fail(where + ".values", "expected an array");
  StoppingTime tau;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Json& v = values[i];
    if (v.is_string() && v.get_ref<const std::string&>() == "inf") {
      tau.values.push_back(kNever);
    } else if (v.is_number_integer() && v.get<long long>() >= 0 &&
               v.get<long long>() < kNever) {
      tau.values.push_back(static_cast<Level>(v.get<long long>()));
    } else {
      fail(where + ".values[" + std::to_string(i) + "]",
           "expected a level or \"inf\"");
    }
  }
  return tau;
}

Json to_json(const StoppingTime& tau) {
  Json values = Json::array();
  for (Level n : tau.values) {
    if (n == kNever) {
      values.push_back("inf");
    } else {
      values.push_back(n);
    }
  }
  return {{"values", values}};
}

WeightSystem weight_system_from_json(const Json& j) {
  const std::string where = "system";
  TreeSpace space = space_from_json(field(j, "space", where));
  ExponentSequence seq = sequence_from_json(field(j, "seq", where));
  const std::size_t leaves = space.leaf_count();
  std::vector<Rv> omegas;
  if (j.contains("weights")) {
    const Json& w = j["weights"];
    if (!w.is_array()) fail(where + ".weights", "expected an array of arrays");
    for (std::size_t i = 0; i < w.size(); ++i) {
      omegas.push_back(
          as_rv(w[i], leaves, where + ".weights[" + std::to_string(i) + "]"));
    }
  }
  Rv v = j.contains("v") ? as_rv(j["v"], leaves, where + ".v")
                         : Rv::constant(leaves, 1.0);
  return WeightSystem(std::move(space), std::move(seq), std::move(omegas),
                      std::move(v));
}

Json to_json(const WeightSystem& ws) {
  Json weights = Json::array();
  for (const Rv& w : ws.omegas()) weights.push_back(rv_json(w));
  return {{"space", to_json(ws.space())},
          {"seq", to_json(ws.seq())},
          {"weights", weights},
          {"v", rv_json(ws.v())}};
}

FunctionVector function_vector_from_json(const TreeSpace& space,
                                         const ExponentSequence& seq,
                                         const Json& j) {
  const std::string where = "functions";
  const Json& arr = j.is_array() ? j : field(j, "functions", where);
  if (!arr.is_array()) fail(where, "expected an array of arrays");
  std::vector<Rv> active;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    active.push_back(as_rv(arr[i], space.leaf_count(),
                           where + "[" + std::to_string(i) + "]"));
  }
  FunctionVector f = FunctionVector::aligned(space, seq, std::move(active));
  if (j.is_object() && j.contains("mask")) {
    const Json& m = j["mask"];
    if (!m.is_array()) fail(where + ".mask", "expected leaf indices");
    LeafSet q(space.leaf_count());
    for (const Json& x : m) {
      if (!x.is_number_integer() || x.get<long long>() < 0 ||
          static_cast<std::size_t>(x.get<long long>()) >= space.leaf_count()) {
        fail(where + ".mask", "leaf index out of range");
      }
      q.insert(static_cast<std::size_t>(x.get<long long>()));
    }
    f = f.masked(q);
  }
  return f;
}

Json to_json(const FunctionVector& f) {
  Json arr = Json::array();
  for (const Rv& r : f.active) arr.push_back(rv_json(r));
  Json out = {{"functions", arr}};
  if (f.tail_mask) out["mask"] = to_json(*f.tail_mask);
  return out;
}

Json to_json(const LeafSet& s) { return Json(s.indices()); }

Json to_json(const CertifiedInterval& iv) {
  return {{"lo", number(iv.lo)},
          {"hi", number(iv.hi)},
          {"width", number(iv.width())}};
}

Json to_json(const ConstantEstimate& est) {
  return {{"value", number(est.value)},
          {"family_size", est.family_size},
          {"skipped_empty", est.skipped_empty},
          {"lower_bound", est.lower_bound}};
}

Json to_json(const VerificationReport& report) {
  Json steps = Json::array();
  for (const ChainStep& s : report.steps) {
    steps.push_back({{"label", s.label},
                     {"lhs", number(s.lhs)},
                     {"rhs", number(s.rhs)},
                     {"pass", s.pass}});
  }
  Json labels = Json::object();
  for (const auto& [k, v] : report.labels) labels[k] = v;
  return {{"id", report.id},
          {"lhs", number(report.lhs)},
          {"rhs", number(report.rhs)},
          {"constant", number(report.constant)},
          {"slack", number(report.slack)},
          {"tolerance", number(report.tolerance)},
          {"pass", report.pass},
          {"metrics", metrics_json(report.metrics)},
          {"labels", labels},
          {"steps", steps}};
}

Json to_json(const SawyerTrace& trace) {
  Json cells = Json::array();
  for (const SawyerCell& c : trace.cells) {
    cells.push_back({{"k", c.k},
                     {"j", c.j},
                     {"A", to_json(c.a)},
                     {"B", to_json(c.b)},
                     {"theta", number(c.theta)},
                     {"T", number(c.t)}});
  }
  Json taus = Json::array();
  for (std::size_t i = 0; i < trace.taus.size(); ++i) {
    taus.push_back({{"k", trace.k_min + static_cast<int>(i)},
                    {"tau", to_json(trace.taus[i])}});
  }
  Json slices = Json::array();
  for (const LambdaSlice& s : trace.lambda_slices) {
    slices.push_back(
        {{"lambda", number(s.lambda)}, {"cells", s.cells}, {"G", to_json(s.g)}});
  }
  Json out = {{"cells", cells},
              {"taus", taus},
              {"lambda_sets", slices},
              {"maximal", rv_json(trace.maximal)}};
  if (trace.empty()) {
    out["k_range"] = Json::array();
  } else {
    out["k_range"] = {trace.k_min, trace.k_max};
  }
  return out;
}

std::string space_digest(const TreeSpace& space) {
  const std::string text = to_json(space).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string reports_csv(const std::vector<VerificationReport>& reports) {
  std::ostringstream out;
  out.precision(17);
  out << "id,lhs,rhs,constant,slack,tolerance,pass\n";
  for (const VerificationReport& r : reports) {
    out << r.id << ',' << r.lhs << ',' << r.rhs << ',' << r.constant << ','
        << r.slack << ',' << r.tolerance << ',' << (r.pass ? "true" : "false")
        << '\n';
  }
  return out.str();
}

}  // namespace infdoob
