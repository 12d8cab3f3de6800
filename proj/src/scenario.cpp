#include "roadrel/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "roadrel/error.hpp"

namespace roadrel {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (at.IsDefined() && at.Mark().line >= 0) os << ':' << at.Mark().line + 1 << ':' << at.Mark().column + 1;
    os << ": " << msg;
    throw ValidationError(os.str());
  }

  void require_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  void check_keys(const YAML::Node& node, const std::string& what, std::initializer_list<const char*> allowed) const {
    require_map(node, what);
    for (const auto& kv : node) {
      auto key = kv.first.as<std::string>();
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        fail(kv.first, "unknown key '" + key + "' in " + what);
      }
    }
  }

  YAML::Node required(const YAML::Node& parent, const char* key, const std::string& what) const {
    YAML::Node n = parent[key];
    if (!n) fail(parent, what + " is missing required key '" + key + "'");
    return n;
  }

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, what + " has an invalid value '" + node.Scalar() + "'");
    }
  }

  /// Number, or a fraction written as "a/b".
  double probability(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a number");
    const std::string& text = node.Scalar();
    auto slash = text.find('/');
    double num = 0.0, den = 1.0;
    try {
      if (slash == std::string::npos) {
        num = node.as<double>();
      } else {
        num = std::stod(text.substr(0, slash));
        den = std::stod(text.substr(slash + 1));
      }
    } catch (const std::exception&) {
      fail(node, what + " has an invalid value '" + text + "'");
    }
    if (den == 0.0) fail(node, what + " divides by zero");
    double value = num / den;
    if (!(value >= 0.0 && value <= 1.0)) fail(node, what + " must lie in [0, 1]");
    return value;
  }

  template <typename T>
  void optional(const YAML::Node& parent, const char* key, T& out, const std::string& what) const {
    if (YAML::Node n = parent[key]) out = scalar<T>(n, what + "." + key);
  }

 private:
  std::string source_;
};

Turn parse_turn(const Reader& r, const YAML::Node& node) {
  auto text = r.scalar<std::string>(node, "turn");
  if (text == "straight") return Turn::straight;
  if (text == "left") return Turn::left;
  if (text == "right") return Turn::right;
  r.fail(node, "turn must be straight, left or right, got '" + text + "'");
}

SimParams parse_sim(const Reader& r, const YAML::Node& node) {
  SimParams p;
  if (!node) return p;
  r.check_keys(node, "simulation",
               {"v_max", "delta_v", "emergency_deceleration", "R0", "Rd", "v_s", "R_s", "vehicle_length_cells",
                "cell_m", "step_s"});
  r.optional(node, "v_max", p.v_max, "simulation");
  r.optional(node, "delta_v", p.delta_v, "simulation");
  r.optional(node, "emergency_deceleration", p.M, "simulation");
  r.optional(node, "R0", p.R0, "simulation");
  r.optional(node, "Rd", p.Rd, "simulation");
  r.optional(node, "v_s", p.v_s, "simulation");
  r.optional(node, "R_s", p.R_s, "simulation");
  r.optional(node, "vehicle_length_cells", p.l_s, "simulation");
  r.optional(node, "cell_m", p.cell_m, "simulation");
  r.optional(node, "step_s", p.step_s, "simulation");
  try {
    p.validate();
  } catch (const ValidationError& e) {
    r.fail(node, e.what());
  }
  return p;
}

SweepSettings parse_sweep(const Reader& r, const YAML::Node& node) {
  SweepSettings s;
  s.intensities = intensity_grid(0.05, 0.6, 0.025);
  if (!node) return s;
  r.check_keys(node, "sweep",
               {"intensities", "replications", "seed", "warmup_steps", "measure_steps", "drain_steps",
                "evaluation_mode", "reliability_from"});
  if (YAML::Node g = node["intensities"]) {
    if (g.IsMap()) {
      r.check_keys(g, "sweep.intensities", {"start", "stop", "step"});
      double start = r.scalar<double>(r.required(g, "start", "sweep.intensities"), "start");
      double stop = r.scalar<double>(r.required(g, "stop", "sweep.intensities"), "stop");
      double step = r.scalar<double>(r.required(g, "step", "sweep.intensities"), "step");
      try {
        s.intensities = intensity_grid(start, stop, step);
      } catch (const ValidationError& e) {
        r.fail(g, e.what());
      }
    } else if (g.IsSequence()) {
      s.intensities.clear();
      for (const auto& x : g) s.intensities.push_back(r.probability(x, "intensity"));
      if (s.intensities.empty()) r.fail(g, "intensity list is empty");
    } else {
      r.fail(g, "sweep.intensities must be a list or {start, stop, step}");
    }
  }
  r.optional(node, "replications", s.replications, "sweep");
  r.optional(node, "seed", s.seed, "sweep");
  r.optional(node, "warmup_steps", s.warmup_steps, "sweep");
  r.optional(node, "measure_steps", s.measure_steps, "sweep");
  r.optional(node, "drain_steps", s.drain_steps, "sweep");
  if (s.replications < 1) r.fail(node["replications"], "replications must be at least 1");
  if (s.warmup_steps < 0 || s.measure_steps < 1 || s.drain_steps < 0) r.fail(node, "step budgets must be positive");
  if (YAML::Node m = node["evaluation_mode"]) {
    try {
      s.mode = parse_evaluation_mode(r.scalar<std::string>(m, "evaluation_mode"));
    } catch (const ValidationError& e) {
      r.fail(m, e.what());
    }
  }
  if (YAML::Node m = node["reliability_from"]) {
    auto text = r.scalar<std::string>(m, "reliability_from");
    if (text == "q_of_mean_delay") {
      s.reliability = ReliabilityRule::q_of_mean_delay;
    } else if (text == "mean_of_q") {
      s.reliability = ReliabilityRule::mean_of_q;
    } else {
      r.fail(m, "reliability_from must be q_of_mean_delay or mean_of_q");
    }
  }
  return s;
}

ManeuverSpec parse_maneuver(const Reader& r, const YAML::Node& node) {
  ManeuverSpec m;
  if (!node) return m;
  r.check_keys(node, "maneuver", {"kind", "branches"});
  YAML::Node kind = r.required(node, "kind", "maneuver");
  try {
    m.kind = parse_maneuver_kind(r.scalar<std::string>(kind, "maneuver.kind"));
  } catch (const ValidationError& e) {
    r.fail(kind, e.what());
  }
  if (YAML::Node bs = node["branches"]) {
    if (!bs.IsSequence() || bs.size() == 0) r.fail(bs, "maneuver.branches must be a non-empty list");
    m.branches.clear();
    for (const auto& b : bs) {
      r.check_keys(b, "branch", {"turn", "probability", "slow_to"});
      Branch br;
      br.turn = parse_turn(r, r.required(b, "turn", "branch"));
      br.probability = r.probability(r.required(b, "probability", "branch"), "branch probability");
      if (YAML::Node st = b["slow_to"]) br.slow_to = r.scalar<int>(st, "slow_to");
      m.branches.push_back(br);
    }
  }
  try {
    m.validate();
  } catch (const ValidationError& e) {
    r.fail(node, e.what());
  }
  return m;
}

TrafficLight parse_light(const Reader& r, const YAML::Node& node) {
  r.check_keys(node, "light", {"red", "red_yellow", "green", "yellow", "offset"});
  TrafficLight l;
  r.optional(node, "red", l.red, "light");
  r.optional(node, "red_yellow", l.red_yellow, "light");
  r.optional(node, "green", l.green, "light");
  r.optional(node, "yellow", l.yellow, "light");
  r.optional(node, "offset", l.offset, "light");
  try {
    l.validate();
  } catch (const ValidationError& e) {
    r.fail(node, e.what());
  }
  return l;
}

std::vector<int> parse_id_list(const Reader& r, const YAML::Node& node, const std::set<int>& known,
                               const std::string& what) {
  if (!node.IsSequence() || node.size() == 0) r.fail(node, what + " must be a non-empty list of segment ids");
  std::vector<int> ids;
  for (const auto& x : node) {
    int id = r.scalar<int>(x, what + " entry");
    if (!known.count(id)) r.fail(x, what + " references undeclared segment " + std::to_string(id));
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) {
      r.fail(x, what + " lists segment " + std::to_string(id) + " twice");
    }
    ids.push_back(id);
  }
  return ids;
}

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::vector<double> intensity_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(start >= 0.0) || !(stop <= 1.0) || !(start <= stop)) {
    throw ValidationError("intensity grid needs 0 <= start <= stop <= 1 and step > 0");
  }
  std::vector<double> out;
  for (long k = 0;; ++k) {
    double x = start + static_cast<double>(k) * step;
    if (x > stop + 0.5 * step) break;
    // Round to 12 decimals so grid points print and compare cleanly.
    out.push_back(std::round(x * 1e12) / 1e12);
  }
  return out;
}

std::size_t Scenario::index_of(int segment_id) const {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].id == segment_id) return i;
  }
  throw ValidationError("unknown segment id " + std::to_string(segment_id));
}

StructureFunction Scenario::structure() const {
  std::vector<std::vector<std::size_t>> idx;
  for (const auto& path : paths) {
    std::vector<std::size_t> p;
    for (int id : path) p.push_back(index_of(id));
    idx.push_back(std::move(p));
  }
  return StructureFunction(segments.size(), idx);
}

std::vector<ComponentMask> Scenario::route_masks() const {
  std::vector<ComponentMask> out;
  for (const auto& route : routes) {
    ComponentMask m = 0;
    for (int id : route.segment_ids) m |= bit(index_of(id));
    out.push_back(m);
  }
  return out;
}

std::vector<int> Scenario::segment_ids() const {
  std::vector<int> ids;
  for (const auto& s : segments) ids.push_back(s.id);
  return ids;
}

Scenario parse_scenario(const std::string& text, const std::string& source_name) {
  Reader r(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source_name << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw ValidationError(os.str());
  }
  if (!root.IsMap()) throw ValidationError(source_name + ": scenario must be a YAML mapping");
  r.check_keys(root, "scenario",
               {"schema_version", "name", "description", "simulation", "satisfaction", "sweep", "segments",
                "structure", "routes"});

  YAML::Node version = r.required(root, "schema_version", "scenario");
  if (r.scalar<int>(version, "schema_version") != kScenarioSchemaVersion) {
    r.fail(version, "unsupported schema_version (expected " + std::to_string(kScenarioSchemaVersion) + ")");
  }

  Scenario sc;
  sc.name = r.scalar<std::string>(r.required(root, "name", "scenario"), "name");
  r.optional(root, "description", sc.description, "scenario");
  sc.sim = parse_sim(r, root["simulation"]);
  if (YAML::Node sat = root["satisfaction"]) {
    r.check_keys(sat, "satisfaction", {"lambda", "k"});
    r.optional(sat, "lambda", sc.patience.lambda, "satisfaction");
    r.optional(sat, "k", sc.patience.k, "satisfaction");
    try {
      sc.patience.validate();
    } catch (const ValidationError& e) {
      r.fail(sat, e.what());
    }
  }
  sc.sweep = parse_sweep(r, root["sweep"]);

  YAML::Node segs = r.required(root, "segments", "scenario");
  if (!segs.IsSequence() || segs.size() == 0) r.fail(segs, "segments must be a non-empty list");
  if (segs.size() > kMaxComponents) r.fail(segs, "at most 64 segments are supported");
  std::set<int> known;
  for (const auto& s : segs) {
    r.check_keys(s, "segment", {"id", "name", "length_m", "length_cells", "maneuver", "light"});
    Segment seg;
    YAML::Node id = r.required(s, "id", "segment");
    seg.id = r.scalar<int>(id, "segment id");
    if (!known.insert(seg.id).second) r.fail(id, "duplicate segment id " + std::to_string(seg.id));
    seg.name = r.scalar<std::string>(r.required(s, "name", "segment"), "segment name");

    YAML::Node lm = s["length_m"], lc = s["length_cells"];
    if (!lm && !lc) r.fail(s, "segment needs length_m or length_cells");
    if (lm) {
      seg.length_m = r.scalar<double>(lm, "length_m");
      double cells = seg.length_m / sc.sim.cell_m;
      if (!(seg.length_m > 0.0) || std::abs(cells - std::round(cells)) > 1e-9) {
        std::ostringstream os;
        os << "length_m " << seg.length_m << " is not a whole number of " << sc.sim.cell_m << " m cells";
        r.fail(lm, os.str());
      }
      seg.length_cells = static_cast<int>(std::lround(cells));
    }
    if (lc) {
      int cells = r.scalar<int>(lc, "length_cells");
      if (lm && cells != seg.length_cells) r.fail(lc, "length_cells disagrees with length_m");
      seg.length_cells = cells;
      if (!lm) seg.length_m = cells * sc.sim.cell_m;
    }
    if (seg.length_cells <= sc.sim.l_s) r.fail(s, "segment is shorter than one vehicle");
    seg.maneuver = parse_maneuver(r, s["maneuver"]);
    if (YAML::Node l = s["light"]) seg.light = parse_light(r, l);
    if (seg.maneuver.signalized() && !seg.light) r.fail(s, "signalized maneuver needs a light");
    sc.segments.push_back(std::move(seg));
  }

  YAML::Node structure = r.required(root, "structure", "scenario");
  r.check_keys(structure, "structure", {"paths"});
  YAML::Node paths = r.required(structure, "paths", "structure");
  if (!paths.IsSequence() || paths.size() == 0) r.fail(paths, "structure.paths must be a non-empty list");
  for (const auto& p : paths) sc.paths.push_back(parse_id_list(r, p, known, "path"));

  StructureFunction phi = sc.structure();
  for (const auto& note : phi.canonicalization_notes()) sc.warnings.push_back("structure: " + note);
  std::vector<std::vector<int>> canonical;
  for (ComponentMask m : phi.min_paths()) {
    std::vector<int> ids;
    for (std::size_t i = 0; i < sc.segments.size(); ++i) {
      if (m & bit(i)) ids.push_back(sc.segments[i].id);
    }
    canonical.push_back(ids);
  }

  if (YAML::Node routes = root["routes"]) {
    if (!routes.IsSequence()) r.fail(routes, "routes must be a list");
    std::set<std::vector<int>> seen;
    for (const auto& rt : routes) {
      r.check_keys(rt, "route", {"name", "segments"});
      Route route;
      route.name = r.scalar<std::string>(r.required(rt, "name", "route"), "route name");
      YAML::Node ids = r.required(rt, "segments", "route");
      route.segment_ids = parse_id_list(r, ids, known, "route");
      auto key = sorted(route.segment_ids);
      bool is_path = std::any_of(canonical.begin(), canonical.end(), [&](const auto& c) { return c == key; });
      if (!is_path) r.fail(ids, "route '" + route.name + "' is not one of the minimal paths");
      if (!seen.insert(key).second) r.fail(ids, "route '" + route.name + "' repeats another route");
      sc.routes.push_back(std::move(route));
    }
    if (seen.size() != canonical.size()) r.fail(routes, "routes must list every minimal path exactly once");
  } else {
    for (std::size_t k = 0; k < canonical.size(); ++k) sc.routes.push_back({"Route " + std::to_string(k + 1), canonical[k]});
  }

  ComponentMask used = phi.relevant_components();
  for (std::size_t i = 0; i < sc.segments.size(); ++i) {
    if (!(used & bit(i))) sc.warnings.push_back("segment " + std::to_string(sc.segments[i].id) + " is on no path");
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

Scenario load_scenario(const std::string& spec) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    std::string name = spec.substr(prefix.size());
    auto text = bundled_scenario_text(name);
    if (!text) {
      std::string known;
      for (const auto& n : bundled_scenario_names()) known += (known.empty() ? "" : ", ") + n;
      throw ValidationError("no bundled scenario '" + name + "' (available: " + known + ")");
    }
    return parse_scenario(*text, spec);
  }
  return load_scenario_file(spec);
}

}  // namespace roadrel
