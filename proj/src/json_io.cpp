#include "wishart/json_io.hpp"

#include <cmath>
#include <fstream>

namespace wishart {

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError("expected a number at " + path);
  return j.get<double>();
}

long require_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError("expected an integer at " + path);
  return j.get<long>();
}

MeasureInput parse_measure(const json& j) {
  const json& atoms = j.at("atoms");
  if (!atoms.is_array() || atoms.empty())
    throw SchemaError("expected a nonempty array at atoms");
  std::vector<Atom> parsed;
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const json& a = atoms[i];
    const std::string path = "atoms[" + std::to_string(i) + "]";
    if (!a.is_object() || !a.contains("lambda") || !a.contains("weight"))
      throw SchemaError("expected {lambda, weight} at " + path);
    Atom atom{require_number(a["lambda"], path + ".lambda"),
              require_number(a["weight"], path + ".weight")};
    total += atom.weight;
    parsed.push_back(atom);
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ValidationError("measure weights sum to " + std::to_string(total) +
                          ", more than 1e-9 away from 1");
  for (Atom& a : parsed) a.weight /= total;
  if (!j.contains("gamma")) throw SchemaError("measure file is missing gamma");
  return MeasureInput{AtomicMeasure(std::move(parsed)),
                      ShapeRatio(require_number(j["gamma"], "gamma"))};
}

WishartModel parse_wishart(const json& j) {
  long n = require_integer(j.at("n"), "n");
  long N = require_integer(j.at("N"), "N");
  const json& lambdas = j.at("lambdas");
  if (!lambdas.is_array() || lambdas.empty())
    throw SchemaError("expected a nonempty array at lambdas");
  std::vector<double> values;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const json& l = lambdas[i];
    const std::string path = "lambdas[" + std::to_string(i) + "]";
    if (l.is_number()) {
      values.push_back(l.get<double>());
    } else if (l.is_object() && l.contains("value") && l.contains("multiplicity")) {
      double v = require_number(l["value"], path + ".value");
      long m = require_integer(l["multiplicity"], path + ".multiplicity");
      if (m <= 0) throw ValidationError("multiplicity must be positive at " + path);
      values.insert(values.end(), m, v);
    } else {
      throw SchemaError("expected a number or {value, multiplicity} at " + path);
    }
  }
  return WishartModel(static_cast<int>(n), static_cast<int>(N), std::move(values));
}

json finite_or_null(double v) {
  if (std::isnan(v) || std::isinf(v)) return nullptr;
  return v;
}

} // namespace

ParsedModel parse_model_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("model document must be a JSON object");
  if (j.contains("atoms")) return parse_measure(j);
  if (j.contains("lambdas")) return parse_wishart(j);
  throw SchemaError("model document needs either atoms (measure) or lambdas (model)");
}

ParsedModel parse_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  return parse_model_json(j);
}

MeasureInput as_measure(const ParsedModel& parsed) {
  if (std::holds_alternative<MeasureInput>(parsed)) return std::get<MeasureInput>(parsed);
  const WishartModel& model = std::get<WishartModel>(parsed);
  return MeasureInput{model.spectral_measure(), model.gamma()};
}

nlohmann::json to_json(const AtomicMeasure& nu) {
  json atoms = json::array();
  for (const Atom& a : nu.atoms()) atoms.push_back({{"lambda", a.lambda}, {"weight", a.weight}});
  return {{"atoms", atoms}};
}

nlohmann::json to_json(const WishartModel& model) {
  return {{"n", model.n()}, {"N", model.N()}, {"lambdas", model.lambdas()}};
}

nlohmann::json to_json(const SupportProfile& profile) {
  json components = json::array();
  for (const auto& c : profile.components) components.push_back({{"a", c.a}, {"b", c.b}});
  return {{"components", components}, {"zero_mass", profile.zero_mass}};
}

nlohmann::json to_json(const EdgeReport& edge) {
  json j{{"position", edge.position},
         {"side", edge.side == Side::Left ? "Left" : "Right"},
         {"hard", edge.hard},
         {"regular", edge.regular},
         {"preimage", finite_or_null(edge.preimage)},
         {"second_deriv", finite_or_null(edge.second_deriv)},
         {"scaling", edge.scaling}};
  if (std::isfinite(edge.regularity_margin)) j["regularity_margin"] = edge.regularity_margin;
  if (edge.extremal_index)
    j["extremal_index"] = *edge.extremal_index;
  else
    j["extremal_index"] = nullptr;
  if (edge.finite_n)
    j["finite_n"] = {{"preimage", edge.finite_n->preimage},
                     {"position", edge.finite_n->position},
                     {"scaling", edge.finite_n->scaling}};
  return j;
}

nlohmann::json to_json(const SpikeVerdict& verdict) {
  const char* kind = verdict.kind == SpikeKind::Outlier    ? "Outlier"
                     : verdict.kind == SpikeKind::NoOutlier ? "NoOutlier"
                                                            : "Critical";
  return {{"kind", kind}, {"g_prime_at_inverse", verdict.g_prime_at_inverse}};
}

nlohmann::json to_json(const FredholmResult& result) {
  return {{"value", result.value},
          {"order", result.order},
          {"error_estimate", result.error_estimate},
          {"imag_residual", result.imag_residual}};
}

nlohmann::json to_json(const SimulationSummary& summary) {
  json j{{"trials", summary.trials},
         {"seed", summary.seed},
         {"ks_distance", summary.ks_distance},
         {"mean", summary.mean},
         {"variance", summary.variance}};
  if (summary.correlation) j["correlation"] = *summary.correlation;
  if (!summary.paired_samples.empty()) {
    json pairs = json::array();
    for (const auto& [u, v] : summary.paired_samples) pairs.push_back({u, v});
    j["paired_samples"] = pairs;
  } else {
    j["samples"] = summary.samples;
  }
  return j;
}

} // namespace wishart
