#include "manneal/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "manneal/errors.hpp"

namespace manneal {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field, what);
}

// Typed accessors over one config section; records the keys it touched so
// unknown fields can be reported by their dotted path.
struct Section {
  const Json* obj;
  std::string path;
  std::set<std::string> seen;

  Section(const Json* o, std::string p) : obj(o), path(std::move(p)) {
    if (obj && !obj->is_object()) fail(path, "expected an object");
  }

  bool has(const char* key) const { return obj && obj->contains(key); }

  const Json& raw(const char* key) {
    seen.insert(key);
    return obj->at(key);
  }

  std::string field(const char* key) const { return path + "." + key; }

  double number(const char* key, double def) {
    if (!has(key)) return def;
    const Json& j = raw(key);
    if (!j.is_number()) fail(field(key), "expected a number");
    return j.get<double>();
  }

  double require_number(const char* key) {
    if (!has(key)) fail(field(key), "missing required field");
    return number(key, 0.0);
  }

  int integer(const char* key, int def) {
    if (!has(key)) return def;
    const Json& j = raw(key);
    if (!j.is_number_integer()) fail(field(key), "expected an integer");
    return j.get<int>();
  }

  unsigned long long unsigned_integer(const char* key, unsigned long long def) {
    if (!has(key)) return def;
    const Json& j = raw(key);
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() &&
                                   j.get<long long>() < 0))
      fail(field(key), "expected a nonnegative integer");
    return j.get<unsigned long long>();
  }

  std::string text(const char* key, const std::string& def) {
    if (!has(key)) return def;
    const Json& j = raw(key);
    if (!j.is_string()) fail(field(key), "expected a string");
    return j.get<std::string>();
  }

  std::string require_text(const char* key) {
    if (!has(key)) fail(field(key), "missing required field");
    return text(key, "");
  }

  std::vector<double> number_list(const char* key, std::vector<double> def) {
    if (!has(key)) return def;
    const Json& j = raw(key);
    if (!j.is_array()) fail(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (const Json& e : j) {
      if (!e.is_number()) fail(field(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    if (!obj) return;
    for (const auto& item : obj->items())
      if (!seen.count(item.key())) fail(path + "." + item.key(), "unknown field");
  }
};

Manifold manifold_from(const std::string& name, const std::string& field) {
  if (name == "circle") return Manifold::Circle;
  if (name == "torus") return Manifold::Torus2;
  if (name == "sphere") return Manifold::Sphere2;
  fail(field, "expected one of \"circle\", \"torus\", \"sphere\"");
}

const char* manifold_name(Manifold m) {
  switch (m) {
    case Manifold::Circle: return "circle";
    case Manifold::Torus2: return "torus";
    case Manifold::Sphere2: return "sphere";
  }
  return "circle";
}

int manifold_coords(Manifold m) { return m == Manifold::Sphere2 ? 3 : dimension(m); }

ManifoldPoint point_from_coords(Manifold m, const Json& arr, const std::string& field) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != manifold_coords(m))
    fail(field, "expected " + std::to_string(manifold_coords(m)) +
                    " coordinates for manifold \"" + manifold_name(m) + "\"");
  std::array<double, 3> c{0.0, 0.0, 0.0};
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) fail(field, "coordinates must be numbers");
    c[i] = arr[i].get<double>();
  }
  switch (m) {
    case Manifold::Circle: return circle_point(c[0]);
    case Manifold::Torus2: return torus_point(c[0], c[1]);
    case Manifold::Sphere2:
      if (c[0] * c[0] + c[1] * c[1] + c[2] * c[2] <= 0.0)
        fail(field, "sphere coordinates must be a nonzero vector");
      return sphere_point(c[0], c[1], c[2]);
  }
  fail(field, "unknown manifold");
}

Json coords_json(const ManifoldPoint& p) {
  Json arr = Json::array();
  for (int i = 0; i < manifold_coords(p.manifold_id); ++i)
    arr.push_back(p.coords[static_cast<size_t>(i)]);
  return arr;
}

// --- section parsers -------------------------------------------------------

CostSpec parse_cost(const Json* obj, Manifold m, Json& canon) {
  Section s(obj, "cost");
  if (!obj) fail("cost", "missing required section");
  const std::string kind = s.require_text("kind");
  const std::string reg_name = s.text("regularization", "heat");
  Regularization reg;
  if (reg_name == "heat")
    reg = Regularization::HeatKernel;
  else if (reg_name == "mollifier")
    reg = Regularization::GeodesicMollifier;
  else
    fail(s.field("regularization"), "expected \"heat\" or \"mollifier\"");
  const int quad = s.integer("quadrature_resolution", 0);
  if (quad < 0) fail(s.field("quadrature_resolution"), "must be nonnegative");
  const int trunc = s.integer("heat_truncation", 0);
  if (trunc < 0) fail(s.field("heat_truncation"), "must be nonnegative");

  CostSpec spec;
  if (kind == "power") {
    const double p = s.number("p", 2.0);
    if (!(p > 0.0)) fail(s.field("p"), "exponent must be positive");
    spec = power_cost(m, p, reg);
    canon["kind"] = "power";
    canon["p"] = p;
  } else if (kind == "table") {
    if (m != Manifold::Circle)
      fail(s.field("kind"), "table costs are supported on the circle only");
    const std::string path = s.require_text("path");
    CostTable table;
    try {
      table = load_cost_table(path);
    } catch (const std::exception& e) {
      fail(s.field("path"), e.what());
    }
    spec = table_cost(std::move(table), reg);
    canon["kind"] = "table";
    canon["path"] = path;
  } else {
    fail(s.field("kind"), "expected \"power\" or \"table\"");
  }
  spec.quadrature_resolution = quad;
  spec.heat.truncation = trunc;
  canon["regularization"] = reg_name;
  canon["quadrature_resolution"] = quad;
  canon["heat_truncation"] = trunc;
  s.finish();
  return spec;
}

MeasureSpec parse_measure(const Json* obj, Manifold m, Json& canon) {
  Section s(obj, "measure");
  if (!obj) fail("measure", "missing required section");
  const std::string kind = s.require_text("kind");
  MeasureSpec spec;
  if (kind == "atomic") {
    if (!s.has("atoms")) fail("measure.atoms", "missing required field");
    const Json& atoms_j = s.raw("atoms");
    if (!atoms_j.is_array() || atoms_j.empty())
      fail("measure.atoms", "expected a nonempty array of coordinate arrays");
    std::vector<ManifoldPoint> atoms;
    for (size_t i = 0; i < atoms_j.size(); ++i)
      atoms.push_back(point_from_coords(
          m, atoms_j[i], "measure.atoms[" + std::to_string(i) + "]"));
    std::vector<double> weights =
        s.number_list("weights", std::vector<double>(atoms.size(), 1.0));
    if (weights.size() != atoms.size())
      fail("measure.weights", "expected one weight per atom");
    double sum = 0.0;
    for (double w : weights) {
      if (!(w > 0.0)) fail("measure.weights", "weights must be positive");
      sum += w;
    }
    for (double& w : weights) w /= sum;
    try {
      spec = atomic_measure(m, std::move(atoms), std::move(weights));
    } catch (const std::exception& e) {
      fail("measure", e.what());
    }
    canon["kind"] = "atomic";
    Json arr = Json::array();
    for (const ManifoldPoint& a : spec.atoms) arr.push_back(coords_json(a));
    canon["atoms"] = std::move(arr);
    canon["weights"] = spec.weights;
  } else if (kind == "von_mises") {
    if (m != Manifold::Circle)
      fail(s.field("kind"), "von_mises is defined on the circle");
    const double location = wrap_angle(s.number("location", 0.0));
    const double concentration = s.require_number("concentration");
    if (concentration < 0.0) fail(s.field("concentration"), "must be nonnegative");
    spec = von_mises_measure(location, concentration);
    canon["kind"] = "von_mises";
    canon["location"] = location;
    canon["concentration"] = concentration;
  } else if (kind == "mixture") {
    if (m != Manifold::Circle)
      fail(s.field("kind"), "mixture is defined on the circle");
    if (!s.has("components")) fail("measure.components", "missing required field");
    const Json& comp_j = s.raw("components");
    if (!comp_j.is_array() || comp_j.empty())
      fail("measure.components", "expected a nonempty array");
    std::vector<MixtureComponent> comps;
    double sum = 0.0;
    for (size_t i = 0; i < comp_j.size(); ++i) {
      const std::string p = "measure.components[" + std::to_string(i) + "]";
      Section cs(&comp_j[i], p);
      MixtureComponent c;
      c.mean = wrap_angle(cs.require_number("mean"));
      c.sigma = cs.require_number("sigma");
      c.weight = cs.number("weight", 1.0);
      if (!(c.sigma > 0.0)) fail(p + ".sigma", "must be positive");
      if (!(c.weight > 0.0)) fail(p + ".weight", "must be positive");
      cs.finish();
      sum += c.weight;
      comps.push_back(c);
    }
    for (MixtureComponent& c : comps) c.weight /= sum;
    try {
      spec = wrapped_gaussian_mixture(std::move(comps));
    } catch (const std::exception& e) {
      fail("measure", e.what());
    }
    canon["kind"] = "mixture";
    Json arr = Json::array();
    for (const MixtureComponent& c : spec.components)
      arr.push_back(Json{{"mean", c.mean}, {"sigma", c.sigma}, {"weight", c.weight}});
    canon["components"] = std::move(arr);
  } else if (kind == "uniform_cap") {
    if (m != Manifold::Sphere2)
      fail(s.field("kind"), "uniform_cap is defined on the sphere");
    if (!s.has("center")) fail("measure.center", "missing required field");
    ManifoldPoint center = point_from_coords(m, s.raw("center"), "measure.center");
    const double radius = s.require_number("cap_radius");
    try {
      spec = uniform_cap_measure(center, radius);
    } catch (const std::exception& e) {
      fail("measure.cap_radius", e.what());
    }
    canon["kind"] = "uniform_cap";
    canon["center"] = coords_json(center);
    canon["cap_radius"] = radius;
  } else if (kind == "file") {
    const std::string path = s.require_text("path");
    try {
      spec = load_empirical(path, m);
    } catch (const std::exception& e) {
      fail("measure.path", e.what());
    }
    canon["kind"] = "file";
    canon["path"] = path;
  } else {
    fail(s.field("kind"),
         "expected one of \"atomic\", \"von_mises\", \"mixture\", \"uniform_cap\", \"file\"");
  }
  s.finish();
  return spec;
}

ScheduleTriple parse_schedule(const Json* obj, Json& canon) {
  Section s(obj, "schedule");
  if (!obj) fail("schedule", "missing required section");
  const std::string kind = s.require_text("kind");
  ScheduleTriple sched;
  if (kind == "canonical") {
    const double c = s.require_number("c");
    if (!(c > 0.0)) fail(s.field("c"), "cooling constant must be positive");
    sched = canonical_schedule(c);
    canon["kind"] = "canonical";
    canon["c"] = c;
  } else if (kind == "table") {
    const std::string path = s.require_text("path");
    try {
      sched = table_schedule(load_schedule_table(path));
    } catch (const std::exception& e) {
      fail(s.field("path"), e.what());
    }
    canon["kind"] = "table";
    canon["path"] = path;
  } else {
    fail(s.field("kind"), "expected \"canonical\" or \"table\"");
  }
  s.finish();
  return sched;
}

SimulationSection parse_simulation(const Json* obj, Json& canon) {
  Section s(obj, "simulation");
  SimulationSection out;
  out.horizon = s.number("horizon", out.horizon);
  if (!(out.horizon >= 0.0)) fail(s.field("horizon"), "must be nonnegative");
  out.step = s.number("step", out.step);
  if (!(out.step > 0.0)) fail(s.field("step"), "must be positive");
  out.replicas = s.integer("replicas", out.replicas);
  if (out.replicas < 1) fail(s.field("replicas"), "must be at least 1");
  out.seed = s.unsigned_integer("seed", out.seed);
  out.snapshot_times = s.number_list("snapshot_times", {out.horizon});
  double prev = -1.0;
  for (double t : out.snapshot_times) {
    if (!(t >= 0.0 && t <= out.horizon))
      fail(s.field("snapshot_times"), "times must lie in [0, horizon]");
    if (!(t > prev)) fail(s.field("snapshot_times"), "times must be strictly increasing");
    prev = t;
  }
  out.quantile_levels = s.number_list("quantile_levels", out.quantile_levels);
  for (double q : out.quantile_levels)
    if (!(q >= 0.0 && q <= 1.0)) fail(s.field("quantile_levels"), "levels must lie in [0, 1]");
  out.histogram_resolution = s.integer("histogram_resolution", out.histogram_resolution);
  if (out.histogram_resolution < 0)
    fail(s.field("histogram_resolution"), "must be nonnegative");
  s.finish();
  canon["horizon"] = out.horizon;
  canon["step"] = out.step;
  canon["replicas"] = out.replicas;
  canon["seed"] = out.seed;
  canon["snapshot_times"] = out.snapshot_times;
  canon["quantile_levels"] = out.quantile_levels;
  canon["histogram_resolution"] = out.histogram_resolution;
  return out;
}

OracleSection parse_oracle(const Json* obj, Json& canon) {
  Section s(obj, "oracle");
  OracleSection out;
  out.resolution = s.integer("resolution", out.resolution);
  if (out.resolution < 2) fail(s.field("resolution"), "must be at least 2");
  out.radii = s.number_list("radii", out.radii);
  if (out.radii.empty()) fail(s.field("radii"), "expected at least one radius");
  for (double r : out.radii)
    if (!(r > 0.0)) fail(s.field("radii"), "radii must be positive");
  out.tol = s.number("tol", out.tol);
  if (!(out.tol > 0.0)) fail(s.field("tol"), "must be positive");
  if (s.has("gibbs")) {
    const Json& arr = s.raw("gibbs");
    if (!arr.is_array()) fail(s.field("gibbs"), "expected an array of {beta, delta}");
    out.gibbs.clear();
    for (size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "oracle.gibbs[" + std::to_string(i) + "]";
      Section gs(&arr[i], p);
      GibbsRequest g;
      g.beta = gs.require_number("beta");
      g.delta = gs.require_number("delta");
      if (g.beta < 0.0) fail(p + ".beta", "must be nonnegative");
      if (!(g.delta > 0.0)) fail(p + ".delta", "must be positive");
      gs.finish();
      out.gibbs.push_back(g);
    }
  }
  out.validation_horizon = s.number("validation_horizon", out.validation_horizon);
  if (!(out.validation_horizon > 1.0))
    fail(s.field("validation_horizon"), "must exceed 1");
  s.finish();
  canon["resolution"] = out.resolution;
  canon["radii"] = out.radii;
  canon["tol"] = out.tol;
  Json gibbs = Json::array();
  for (const GibbsRequest& g : out.gibbs)
    gibbs.push_back(Json{{"beta", g.beta}, {"delta", g.delta}});
  canon["gibbs"] = std::move(gibbs);
  canon["validation_horizon"] = out.validation_horizon;
  return out;
}

OutputSection parse_output(const Json* obj, Json& canon) {
  Section s(obj, "output");
  OutputSection out;
  out.directory = s.text("directory", out.directory);
  if (out.directory.empty()) fail(s.field("directory"), "must be nonempty");
  if (s.has("formats")) {
    const Json& arr = s.raw("formats");
    if (!arr.is_array() || arr.empty())
      fail(s.field("formats"), "expected a nonempty array");
    out.formats.clear();
    for (const Json& e : arr) {
      if (!e.is_string()) fail(s.field("formats"), "formats must be strings");
      const std::string f = e.get<std::string>();
      if (f != "csv" && f != "json")
        fail(s.field("formats"), "expected \"csv\" or \"json\"");
      for (const std::string& prev : out.formats)
        if (prev == f) fail(s.field("formats"), "duplicate format");
      out.formats.push_back(f);
    }
  }
  s.finish();
  canon["directory"] = out.directory;
  canon["formats"] = out.formats;
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& json_text,
                                   const ConfigOverrides& overrides) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const std::exception& e) {
    fail("config", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("config", "top level must be an object");
  if (overrides.seed) doc["simulation"]["seed"] = *overrides.seed;
  if (overrides.replicas) doc["simulation"]["replicas"] = *overrides.replicas;
  if (overrides.out_dir) doc["output"]["directory"] = *overrides.out_dir;

  static const std::set<std::string> known{"manifold", "cost",       "measure",
                                          "schedule", "simulation", "oracle",
                                          "output"};
  for (const auto& item : doc.items())
    if (!known.count(item.key())) fail(item.key(), "unknown section");

  ExperimentConfig cfg;
  if (!doc.contains("manifold")) fail("manifold", "missing required field");
  if (!doc["manifold"].is_string()) fail("manifold", "expected a string");
  cfg.manifold = manifold_from(doc["manifold"].get<std::string>(), "manifold");

  auto section = [&doc](const char* name) -> const Json* {
    return doc.contains(name) ? &doc[name] : nullptr;
  };

  Json canon;
  canon["manifold"] = manifold_name(cfg.manifold);
  Json cost_canon, measure_canon, schedule_canon, sim_canon, oracle_canon, out_canon;
  cfg.cost = parse_cost(section("cost"), cfg.manifold, cost_canon);
  cfg.measure = parse_measure(section("measure"), cfg.manifold, measure_canon);
  cfg.schedule = parse_schedule(section("schedule"), schedule_canon);
  cfg.simulation = parse_simulation(section("simulation"), sim_canon);
  cfg.oracle = parse_oracle(section("oracle"), oracle_canon);
  cfg.output = parse_output(section("output"), out_canon);
  canon["cost"] = std::move(cost_canon);
  canon["measure"] = std::move(measure_canon);
  canon["schedule"] = std::move(schedule_canon);
  canon["simulation"] = std::move(sim_canon);
  canon["oracle"] = std::move(oracle_canon);
  canon["output"] = std::move(out_canon);

  if (cfg.schedule.kind == ScheduleKind::UserTable &&
      (cfg.schedule.table.t.empty() ||
       cfg.schedule.table.t.back() < cfg.simulation.horizon))
    fail("simulation.horizon", "schedule table does not cover [0, horizon]");

  cfg.canonical = canon.dump(2) + "\n";
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

std::string config_hash(const ExperimentConfig& cfg) {
  unsigned long long h = 1469598103934665603ull;  // FNV-1a 64 offset basis
  for (unsigned char ch : cfg.canonical) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return std::string(buf);
}

std::string run_directory(const ExperimentConfig& cfg) {
  return cfg.output.directory + "/" + config_hash(cfg) + "-s" +
         std::to_string(cfg.simulation.seed);
}

SimConfig to_sim_config(const ExperimentConfig& cfg) {
  SimConfig sc;
  sc.manifold = cfg.manifold;
  sc.cost = cfg.cost;
  sc.measure = cfg.measure;
  sc.schedule = cfg.schedule;
  sc.horizon = cfg.simulation.horizon;
  sc.step = cfg.simulation.step;
  sc.replicas = cfg.simulation.replicas;
  sc.snapshot_times = cfg.simulation.snapshot_times;
  sc.seed = cfg.simulation.seed;
  sc.aggregation.radii = cfg.oracle.radii;
  sc.aggregation.quantile_levels = cfg.simulation.quantile_levels;
  sc.aggregation.landscape_resolution = cfg.oracle.resolution;
  sc.aggregation.min_tol = cfg.oracle.tol;
  sc.aggregation.histogram_resolution = cfg.simulation.histogram_resolution;
  return sc;
}

}  // namespace manneal
