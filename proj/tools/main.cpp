// wishart-edges: support geometry, edge laws and Monte Carlo experiments for
// large complex correlated Wishart matrices.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wishart/fredholm.hpp"
#include "wishart/json_io.hpp"
#include "wishart/montecarlo.hpp"
#include "wishart/specfun.hpp"

namespace {

constexpr const char* kVersion = "wishart-edges 0.1.0";

struct GridSpec {
  double lo = 0.0, step = 0.0, hi = 0.0;
};

/// lo:step:hi, endpoints included within half a step
std::vector<double> expand_grid(const std::string& text) {
  GridSpec g;
  std::istringstream in(text);
  std::string part;
  std::vector<double> parts;
  while (std::getline(in, part, ':')) {
    try {
      std::size_t used = 0;
      double v = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      parts.push_back(v);
    } catch (const std::exception&) {
      throw wishart::ValidationError("grid: cannot parse \"" + part + "\" as a number");
    }
  }
  if (parts.size() != 3)
    throw wishart::ValidationError("grid: expected lo:step:hi, got \"" + text + "\"");
  g.lo = parts[0];
  g.step = parts[1];
  g.hi = parts[2];
  if (!(g.step > 0.0)) throw wishart::ValidationError("grid: step must be positive");
  if (g.hi < g.lo - 0.5 * g.step) throw wishart::ValidationError("grid: hi is below lo");
  std::vector<double> values;
  for (double v = g.lo; v <= g.hi + 0.5 * g.step; v += g.step) values.push_back(v);
  return values;
}

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw wishart::ValidationError("cannot open output file: " + out_path);
  out << content;
}

wishart::WishartModel require_model(const wishart::ParsedModel& parsed) {
  if (!std::holds_alternative<wishart::WishartModel>(parsed))
    throw wishart::ValidationError("this command needs a finite-N model file (n, N, lambdas)");
  return std::get<wishart::WishartModel>(parsed);
}

int resolve_threads(int threads_flag) {
  if (threads_flag > 0) return threads_flag;
  if (const char* env = std::getenv("WISHART_EDGES_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0; // all cores
}

struct CsvTable {
  std::string header;
  std::vector<std::vector<double>> rows;

  std::string csv() const {
    std::string out = header + "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ",";
        out += format17(row[i]);
      }
      out += "\n";
    }
    return out;
  }

  nlohmann::json as_json() const {
    std::vector<std::string> cols;
    std::istringstream in(header);
    std::string c;
    while (std::getline(in, c, ',')) cols.push_back(c);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json obj;
      for (std::size_t i = 0; i < row.size(); ++i) obj[cols[i]] = row[i];
      arr.push_back(obj);
    }
    return arr;
  }
};

void emit_table(const CsvTable& table, const std::string& format, const std::string& out) {
  if (format == "json")
    write_output(out, table.as_json().dump(2));
  else
    write_output(out, table.csv());
}

int run(int argc, char** argv) {
  CLI::App app{"Support geometry, edge fluctuation laws and Monte Carlo validation for "
               "complex correlated Wishart matrices"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string model_path, base_path, out_path, format = "csv", grid_text, at_text;
  std::string kernel_type, experiment, mode_text = "auto";
  double zeta = 0.0, lo = 0.0, hi = 0.0, window = 16.0;
  double regularity_threshold = wishart::kDefaultRegularityThreshold;
  double q_override = 0.0;
  int order = 0, kk = 0, alpha = 0, edge_index = 0, edge_index_b = -1;
  int nodes = 256, threads_flag = 0;
  long trials = 1000;
  std::uint64_t seed = 0;
  bool finite_n = false;

  auto* support_cmd = app.add_subcommand("support", "Support of the limiting spectral measure");
  support_cmd->add_option("--model", model_path)->required();
  support_cmd->add_option("--out", out_path);

  auto* edges_cmd = app.add_subcommand("edges", "Edge reports with scaling constants");
  edges_cmd->add_option("--model", model_path)->required();
  edges_cmd->add_flag("--finite-n", finite_n, "refine edges against the finite-N model");
  edges_cmd->add_option("--regularity-threshold", regularity_threshold);
  edges_cmd->add_option("--out", out_path);

  auto* spike_cmd = app.add_subcommand("spike", "Classify a spike against a base measure");
  spike_cmd->add_option("--base", base_path)->required();
  spike_cmd->add_option("--zeta", zeta)->required();
  spike_cmd->add_option("--out", out_path);

  auto* density_cmd = app.add_subcommand("density", "Limiting spectral density on a grid");
  density_cmd->add_option("--model", model_path)->required();
  density_cmd->add_option("--x-grid", grid_text)->required();
  density_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  density_cmd->add_option("--out", out_path);

  auto* tw_cmd = app.add_subcommand("tw-cdf", "Tracy-Widom CDF on a grid");
  tw_cmd->add_option("--s-grid", grid_text)->required();
  tw_cmd->add_option("--order", order);
  tw_cmd->add_option("--window", window);
  tw_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  tw_cmd->add_option("--out", out_path);

  auto* dtw_cmd = app.add_subcommand("deformed-tw", "Deformed Tracy-Widom CDF on a grid");
  dtw_cmd->add_option("--k", kk)->required();
  dtw_cmd->add_option("--s-grid", grid_text)->required();
  dtw_cmd->add_option("--order", order);
  dtw_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  dtw_cmd->add_option("--out", out_path);

  auto* bessel_cmd = app.add_subcommand("bessel-gap", "Bessel hard-edge gap probability");
  bessel_cmd->add_option("--alpha", alpha)->required();
  bessel_cmd->add_option("--s-grid", grid_text)->required();
  bessel_cmd->add_option("--order", order);
  bessel_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  bessel_cmd->add_option("--out", out_path);

  auto* kernel_cmd = app.add_subcommand("kernel", "Evaluate a limiting kernel at one point");
  kernel_cmd->add_option("--type", kernel_type)
      ->required()
      ->check(CLI::IsMember({"airy", "bessel", "deformed"}));
  kernel_cmd->add_option("--at", at_text, "x,y")->required();
  kernel_cmd->add_option("--alpha", alpha);
  kernel_cmd->add_option("--k", kk);

  auto* fgap_cmd = app.add_subcommand("finite-gap", "Finite-N gap probability on (lo, hi)");
  fgap_cmd->add_option("--model", model_path)->required();
  fgap_cmd->add_option("--lo", lo)->required();
  fgap_cmd->add_option("--hi", hi)->required();
  fgap_cmd->add_option("--order", order);
  auto* q_opt = fgap_cmd->add_option("--q", q_override, "override the free contour parameter q");
  fgap_cmd->add_option("--nodes", nodes);
  fgap_cmd->add_option("--out", out_path);

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo fluctuation experiments");
  sim_cmd->add_option("--model", model_path)->required();
  sim_cmd->add_option("--experiment", experiment)
      ->required()
      ->check(CLI::IsMember({"edge", "independence", "hard-edge", "condition"}));
  sim_cmd->add_option("--edge-index", edge_index);
  sim_cmd->add_option("--edge-index-b", edge_index_b);
  sim_cmd->add_option("--trials", trials);
  sim_cmd->add_option("--seed", seed)->required();
  sim_cmd->add_option("--threads", threads_flag);
  sim_cmd->add_option("--mode", mode_text)->check(CLI::IsMember({"auto", "soft", "hard"}));
  sim_cmd->add_option("--out", out_path);

  app.parse(argc, argv);

  if (support_cmd->parsed()) {
    auto input = wishart::as_measure(wishart::parse_model_file(model_path));
    auto profile = wishart::compute_support(input.measure, input.gamma);
    write_output(out_path, wishart::to_json(profile).dump(2));
    return 0;
  }

  if (edges_cmd->parsed()) {
    auto parsed = wishart::parse_model_file(model_path);
    auto input = wishart::as_measure(parsed);
    auto edges = wishart::find_edges(input.measure, input.gamma);
    if (finite_n) {
      const auto model = require_model(parsed);
      for (auto& e : edges) {
        if (e.hard) continue;
        auto [regular, margin] = wishart::check_regularity(e, model, regularity_threshold);
        e.regular = regular;
        e.regularity_margin = margin;
        if (regular) {
          e.finite_n = wishart::finite_n_edge(e, model);
          e.extremal_index = wishart::extremal_index(e, model);
        }
      }
    }
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : edges) arr.push_back(wishart::to_json(e));
    nlohmann::json doc{{"edges", arr}};
    if (std::abs(input.gamma.gamma - 1.0) < 1e-6 && std::abs(input.gamma.gamma - 1.0) > 1e-12)
      doc["warnings"] = {"gamma is within 1e-6 of 1: soft-edge constants are nearly degenerate"};
    write_output(out_path, doc.dump(2));
    return 0;
  }

  if (spike_cmd->parsed()) {
    auto input = wishart::as_measure(wishart::parse_model_file(base_path));
    auto verdict = wishart::classify_spike(input.measure, input.gamma, zeta);
    write_output(out_path, wishart::to_json(verdict).dump(2));
    return 0;
  }

  if (density_cmd->parsed()) {
    auto input = wishart::as_measure(wishart::parse_model_file(model_path));
    auto profile = wishart::compute_support(input.measure, input.gamma);
    CsvTable table;
    table.header = "x,density,edge_adjacent";
    for (double x : expand_grid(grid_text)) {
      double rho = wishart::density(input.measure, input.gamma, x);
      double near_edge = 0.0;
      for (const auto& c : profile.components)
        if (std::abs(x - c.a) < 1e-3 || std::abs(x - c.b) < 1e-3) near_edge = 1.0;
      table.rows.push_back({x, rho, near_edge});
    }
    emit_table(table, format, out_path);
    return 0;
  }

  if (tw_cmd->parsed()) {
    CsvTable table;
    table.header = "s,value,error_estimate";
    for (double s : expand_grid(grid_text)) {
      auto r = wishart::tw_cdf_full(s, order > 0 ? order : 96, window);
      table.rows.push_back({s, r.value, r.error_estimate});
    }
    emit_table(table, format, out_path);
    return 0;
  }

  if (dtw_cmd->parsed()) {
    CsvTable table;
    table.header = "s,value,error_estimate";
    for (double s : expand_grid(grid_text)) {
      auto r = wishart::deformed_tw_cdf_full(kk, s, order > 0 ? order : 96, window);
      table.rows.push_back({s, r.value, r.error_estimate});
    }
    emit_table(table, format, out_path);
    return 0;
  }

  if (bessel_cmd->parsed()) {
    CsvTable table;
    table.header = "s,value,error_estimate";
    for (double s : expand_grid(grid_text)) {
      auto r = wishart::bessel_gap_full(alpha, s, order > 0 ? order : 64);
      table.rows.push_back({s, r.value, r.error_estimate});
    }
    emit_table(table, format, out_path);
    return 0;
  }

  if (kernel_cmd->parsed()) {
    auto comma = at_text.find(',');
    if (comma == std::string::npos)
      throw wishart::ValidationError("kernel: --at expects x,y");
    double x = 0.0, y = 0.0;
    try {
      x = std::stod(at_text.substr(0, comma));
      y = std::stod(at_text.substr(comma + 1));
    } catch (const std::exception&) {
      throw wishart::ValidationError("kernel: cannot parse --at \"" + at_text + "\"");
    }
    double v = 0.0;
    if (kernel_type == "airy")
      v = wishart::airy_kernel(x, y);
    else if (kernel_type == "bessel")
      v = wishart::bessel_kernel(alpha, x, y);
    else
      v = wishart::deformed_airy_kernel(kk, x, y);
    write_output(out_path, format17(v));
    return 0;
  }

  if (fgap_cmd->parsed()) {
    const auto model = require_model(wishart::parse_model_file(model_path));
    wishart::ContourSpec contour = wishart::default_contour(model);
    contour.nodes_per_contour = nodes;
    if (!q_opt->empty()) {
      contour.theta_radius *= q_override / contour.q; // keep Theta inside {Re < q}
      contour.q = q_override;
    }
    auto r = wishart::finite_gap_probability(model, contour, lo, hi,
                                             order > 0 ? order : 64);
    write_output(out_path, wishart::to_json(r).dump(2));
    return 0;
  }

  if (sim_cmd->parsed()) {
    const auto model = require_model(wishart::parse_model_file(model_path));
    const int threads = resolve_threads(threads_flag);
    auto input = wishart::as_measure(wishart::parse_model_file(model_path));

    auto prepared_edge = [&](int index) {
      auto edges = wishart::find_edges(input.measure, input.gamma);
      if (index < 0 || index >= static_cast<int>(edges.size()))
        throw wishart::ValidationError("simulate: --edge-index out of range (" +
                                       std::to_string(edges.size()) + " edges)");
      wishart::EdgeReport e = edges[index];
      auto [regular, margin] = wishart::check_regularity(e, model);
      e.regular = regular;
      e.regularity_margin = margin;
      if (!regular)
        throw wishart::ValidationError("simulate: selected edge is not regular");
      e.finite_n = wishart::finite_n_edge(e, model);
      e.extremal_index = wishart::extremal_index(e, model);
      return e;
    };

    wishart::SimulationSummary summary;
    if (experiment == "edge") {
      summary = wishart::run_edge_fluctuations(model, prepared_edge(edge_index), trials,
                                               seed, threads);
    } else if (experiment == "independence") {
      if (edge_index_b < 0)
        throw wishart::ValidationError("simulate: independence needs --edge-index-b");
      summary = wishart::run_independence(model, prepared_edge(edge_index),
                                          prepared_edge(edge_index_b), trials, seed, threads);
    } else if (experiment == "hard-edge") {
      summary = wishart::run_hard_edge(model, trials, seed, threads);
    } else {
      wishart::ConditionMode mode = mode_text == "soft" ? wishart::ConditionMode::SoftEdges
                                    : mode_text == "hard" ? wishart::ConditionMode::HardEdge
                                                          : wishart::ConditionMode::Auto;
      summary = wishart::run_condition_number(model, trials, seed, mode, threads);
    }
    nlohmann::json doc{{"tool", "wishart-edges"},
                       {"version", kVersion},
                       {"experiment", experiment},
                       {"model", wishart::to_json(model)},
                       {"summary", wishart::to_json(summary)}};
    write_output(out_path, doc.dump(2));
    return 0;
  }

  return 0;
}

} // namespace

int main(int argc, char** argv) {
  static const std::set<std::string> known = {
      "support", "edges",  "spike",      "density",  "tw-cdf", "deformed-tw",
      "bessel-gap", "kernel", "finite-gap", "simulate", "--help", "-h", "--version"};
  if (argc > 1 && known.count(argv[1]) == 0) {
    std::cerr << "unknown command: " << argv[1] << "\n";
    return 64;
  }
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = CLI::App{}.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const wishart::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const wishart::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
