#ifndef WISHART_JSON_IO_HPP
#define WISHART_JSON_IO_HPP

#include <string>
#include <variant>

#include <json.hpp>

#include "wishart/fredholm.hpp"
#include "wishart/measure.hpp"
#include "wishart/montecarlo.hpp"
#include "wishart/support.hpp"

namespace wishart {

struct MeasureInput {
  AtomicMeasure measure;
  ShapeRatio gamma;
};

/// Either a limiting (measure, gamma) pair or a finite-N model, depending on
/// the file contents.
using ParsedModel = std::variant<MeasureInput, WishartModel>;

/// Parse a model JSON document: {"atoms":[...], "gamma":g} or
/// {"n":..,"N":..,"lambdas":[...]} with optional run-length entries
/// {"value":v,"multiplicity":m}. Weights are renormalized when their sum is
/// within 1e-9 of 1. Throws SchemaError (shape) or ValidationError (invariant).
ParsedModel parse_model_json(const nlohmann::json& j);
ParsedModel parse_model_file(const std::string& path);

/// The measure/gamma view of a parsed model (models induce nu_N, gamma_N).
MeasureInput as_measure(const ParsedModel& parsed);

nlohmann::json to_json(const AtomicMeasure& nu);
nlohmann::json to_json(const WishartModel& model);
nlohmann::json to_json(const SupportProfile& profile);
nlohmann::json to_json(const EdgeReport& edge);
nlohmann::json to_json(const SpikeVerdict& verdict);
nlohmann::json to_json(const FredholmResult& result);
nlohmann::json to_json(const SimulationSummary& summary);

} // namespace wishart

#endif // WISHART_JSON_IO_HPP
