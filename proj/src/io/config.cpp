#include "subsim/io/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace subsim::io {

using nlohmann::json;

ArrayGeometry ExperimentConfig::geometry() const {
  if (model == "cube") {
    const int side = static_cast<int>(std::round(std::cbrt(double(n_atoms))));
    return ArrayGeometry::cube(side, k0d);
  }
  Model m = Model::FreeSpaceParallel;
  if (model == "free_space_perpendicular") m = Model::FreeSpacePerpendicular;
  if (model == "waveguide") m = Model::Waveguide;
  return ArrayGeometry::chain(m, n_atoms, k0d);
}

CouplingMatrices ExperimentConfig::couplings() const {
  if (independent) return make_independent(n_atoms);
  return build_coupling_matrices(geometry());
}

std::vector<double> ExperimentConfig::grid() const {
  if (grid_kind == "log") return log_grid(t_first, t_max, grid_points);
  return uniform_grid(t_max, grid_points);
}

namespace {

const std::set<std::string> kScenarios = {
    "spectrum", "decay",      "clock",      "rate-model",
    "liouvillian", "mean-field", "mps",     "3d-spectrum"};
const std::set<std::string> kModels = {"free_space_parallel",
                                       "free_space_perpendicular", "waveguide",
                                       "cube"};
const std::set<std::string> kGeometryKeys = {"model", "n", "k0d", "independent"};
const std::set<std::string> kNumericKeys = {
    "seed",        "trajectories", "initial",     "kl_d",       "detuning",
    "coherent_only", "grid",       "t_max",       "t_first",    "grid_points",
    "manifolds",   "max_manifold", "delta_min",   "delta_max",  "delta_count",
    "ramsey_mode", "bond_dim",     "dt_early",    "dt_late",    "t_switch",
    "alpha_count", "correlation_times"};
const std::set<std::string> kOutputKeys = {"directory"};

}  // namespace

ParseResult load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();

  ParseResult out;
  out.raw = buf.str();
  auto& e = out.errors;
  json j;
  try {
    j = json::parse(out.raw);
  } catch (const json::exception& ex) {
    e.push_back(std::string("JSON parse error: ") + ex.what());
    return out;
  }

  for (auto& [key, val] : j.items())
    if (key != "scenario" && key != "geometry" && key != "numerics" &&
        key != "output")
      e.push_back("unknown top-level key: " + key);

  auto& cfg = out.config;
  if (!j.contains("scenario") || !j["scenario"].is_string())
    e.push_back("missing key: scenario");
  else {
    cfg.scenario = j["scenario"];
    if (!kScenarios.count(cfg.scenario))
      e.push_back("unknown scenario: " + cfg.scenario);
  }

  if (!j.contains("geometry") || !j["geometry"].is_object()) {
    e.push_back("missing block: geometry");
  } else {
    const auto& g = j["geometry"];
    for (auto& [key, val] : g.items())
      if (!kGeometryKeys.count(key)) e.push_back("unknown geometry key: " + key);
    if (!g.contains("model"))
      e.push_back("missing key: geometry.model");
    else {
      cfg.model = g["model"];
      if (!kModels.count(cfg.model))
        e.push_back("unknown geometry.model: " + cfg.model);
    }
    if (!g.contains("n"))
      e.push_back("missing key: geometry.n");
    else {
      cfg.n_atoms = g["n"];
      if (cfg.n_atoms < 1) e.push_back("geometry.n must be >= 1");
      if (cfg.model == "cube") {
        const int side = static_cast<int>(std::round(std::cbrt(double(cfg.n_atoms))));
        if (side * side * side != cfg.n_atoms)
          e.push_back("geometry.n must be a perfect cube for the cube model");
      }
    }
    if (!g.contains("k0d"))
      e.push_back("missing key: geometry.k0d");
    else {
      cfg.k0d = g["k0d"];
      if (!(cfg.k0d > 0.0)) e.push_back("geometry.k0d must be > 0");
    }
    cfg.independent = g.value("independent", false);
  }

  if (!j.contains("numerics") || !j["numerics"].is_object()) {
    e.push_back("missing block: numerics");
  } else {
    const auto& n = j["numerics"];
    for (auto& [key, val] : n.items())
      if (!kNumericKeys.count(key)) e.push_back("unknown numerics key: " + key);
    if (!n.contains("seed"))
      e.push_back("missing key: numerics.seed (explicit seeds only)");
    else
      cfg.seed = n["seed"].get<std::uint64_t>();
    cfg.trajectories = n.value("trajectories", 1);
    if (cfg.trajectories < 1) e.push_back("numerics.trajectories must be >= 1");
    cfg.initial = n.value("initial", std::string("inverted"));
    if (cfg.initial != "inverted" && cfg.initial != "clock")
      e.push_back("numerics.initial must be inverted|clock");
    cfg.kl_d = n.value("kl_d", kPi);
    cfg.detuning = n.value("detuning", 0.0);
    cfg.coherent_only = n.value("coherent_only", false);
    cfg.grid_kind = n.value("grid", std::string("uniform"));
    if (cfg.grid_kind != "uniform" && cfg.grid_kind != "log")
      e.push_back("numerics.grid must be uniform|log");
    cfg.t_max = n.value("t_max", 10.0);
    if (!(cfg.t_max > 0.0)) e.push_back("numerics.t_max must be > 0");
    cfg.t_first = n.value("t_first", 0.05);
    if (!(cfg.t_first > 0.0) || cfg.t_first >= cfg.t_max)
      e.push_back("numerics.t_first must be in (0, t_max)");
    cfg.grid_points = n.value("grid_points", 50);
    if (cfg.grid_points < 2) e.push_back("numerics.grid_points must be >= 2");
    if (n.contains("manifolds")) {
      cfg.manifolds.clear();
      for (const auto& m : n["manifolds"]) {
        cfg.manifolds.push_back(m.get<int>());
        if (cfg.manifolds.back() < 0 || cfg.manifolds.back() > cfg.n_atoms)
          e.push_back("numerics.manifolds entries must lie in [0, n]");
      }
    }
    cfg.max_manifold = n.value("max_manifold", -1);
    cfg.delta_min = n.value("delta_min", -3.0);
    cfg.delta_max = n.value("delta_max", 3.0);
    cfg.delta_count = n.value("delta_count", 61);
    if (cfg.delta_count < 3) e.push_back("numerics.delta_count must be >= 3");
    if (!(cfg.delta_min < cfg.delta_max))
      e.push_back("numerics.delta_min must be < delta_max");
    cfg.ramsey_mode = n.value("ramsey_mode", std::string("analytic"));
    if (cfg.ramsey_mode != "analytic" && cfg.ramsey_mode != "per_delta")
      e.push_back("numerics.ramsey_mode must be analytic|per_delta");
    cfg.bond_dim = n.value("bond_dim", 64);
    if (cfg.bond_dim < 1) e.push_back("numerics.bond_dim must be >= 1");
    cfg.dt_early = n.value("dt_early", 1e-3);
    cfg.dt_late = n.value("dt_late", 1e-2);
    cfg.t_switch = n.value("t_switch", 5.0);
    if (!(cfg.dt_early > 0.0) || !(cfg.dt_late > 0.0))
      e.push_back("numerics.dt_early/dt_late must be > 0");
    cfg.alpha_count = n.value("alpha_count", 5);
    if (n.contains("correlation_times"))
      for (const auto& t : n["correlation_times"])
        cfg.correlation_times.push_back(t.get<double>());
  }

  if (j.contains("output")) {
    const auto& o = j["output"];
    for (auto& [key, val] : o.items())
      if (!kOutputKeys.count(key)) e.push_back("unknown output key: " + key);
    cfg.output_dir = o.value("directory", std::string("out"));
  }

  // scenario-specific constraints
  if (cfg.scenario == "liouvillian" && cfg.n_atoms > 13)
    e.push_back("liouvillian scenario limited to n <= 13");
  if (cfg.scenario == "mps" && cfg.model != "waveguide")
    e.push_back("mps scenario supports the waveguide model only");
  if (cfg.scenario == "3d-spectrum" && cfg.model != "cube")
    e.push_back("3d-spectrum scenario requires the cube model");
  if (cfg.scenario == "decay" && cfg.n_atoms > 16)
    e.push_back("decay scenario limited to n <= 16 (full Hilbert space)");
  return out;
}

}  // namespace subsim::io
