#pragma once

// JSON configuration for the nlwave tool. Parsing is strict: unknown keys,
// wrong types and out-of-range values raise ConfigError naming the field.

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "nlwave/analysis.hpp"
#include "nlwave/assembly.hpp"
#include "nlwave/basis.hpp"
#include "nlwave/errors.hpp"
#include "nlwave/evolve.hpp"
#include "nlwave/kernel.hpp"

namespace nlwave::cli {

using json = nlohmann::json;

/// Object reader that remembers which keys were consumed.
class Fields {
public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) {
      throw ConfigError(display(), "expected an object");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const json* v = get(key);
    if (!v) {
      if (!fallback) {
        throw ConfigError(path(key), "required");
      }
      return *fallback;
    }
    if (!v->is_number()) {
      throw ConfigError(path(key), "expected a number");
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
      throw ConfigError(path(key), "must be finite");
    }
    return d;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) {
      get(key);
      return std::nullopt;
    }
    return number(key);
  }

  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
    const json* v = get(key);
    if (!v) {
      if (!fallback) {
        throw ConfigError(path(key), "required");
      }
      return *fallback;
    }
    if (!v->is_number_integer()) {
      throw ConfigError(path(key), "expected an integer");
    }
    return v->get<int>();
  }

  std::optional<int> optional_integer(const std::string& key) {
    if (!has(key)) {
      get(key);
      return std::nullopt;
    }
    return integer(key);
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = get(key);
    if (!v) {
      return fallback;
    }
    if (!v->is_boolean()) {
      throw ConfigError(path(key), "expected true or false");
    }
    return v->get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    const json* v = get(key);
    if (!v) {
      if (!fallback) {
        throw ConfigError(path(key), "required");
      }
      return *fallback;
    }
    if (!v->is_string()) {
      throw ConfigError(path(key), "expected a string");
    }
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = get(key);
    if (!v) {
      throw ConfigError(path(key), "required");
    }
    if (!v->is_array()) {
      throw ConfigError(path(key), "expected an array of numbers");
    }
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        throw ConfigError(path(key), "expected an array of finite numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const std::string& key) {
    const json* v = get(key);
    if (!v) {
      throw ConfigError(path(key), "required");
    }
    if (!v->is_array()) {
      throw ConfigError(path(key), "expected an array of integers");
    }
    std::vector<int> out;
    for (const auto& e : *v) {
      if (!e.is_number_integer()) {
        throw ConfigError(path(key), "expected an array of integers");
      }
      out.push_back(e.get<int>());
    }
    return out;
  }

  /// Throws on the first key that was never asked for.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError(path(it.key()), "unknown key");
      }
    }
  }

private:
  std::string display() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// ---------------------------------------------------------------------------
// Enumerations

enum class SolverKind { galerkin, collocation1d, midpoint2d };

inline std::string to_string(SolverKind k) {
  switch (k) {
  case SolverKind::galerkin:
    return "galerkin";
  case SolverKind::collocation1d:
    return "collocation1d";
  case SolverKind::midpoint2d:
    return "midpoint2d";
  }
  return "unknown";
}

inline SolverKind parse_solver(const std::string& s, const std::string& field) {
  if (s == "galerkin") {
    return SolverKind::galerkin;
  }
  if (s == "collocation1d") {
    return SolverKind::collocation1d;
  }
  if (s == "midpoint2d") {
    return SolverKind::midpoint2d;
  }
  throw ConfigError(field, "unknown solver '" + s + "' (galerkin, collocation1d, midpoint2d)");
}

inline Scheme parse_scheme(const std::string& s, const std::string& field) {
  for (Scheme c : {Scheme::paperImplicit, Scheme::explicitCentral, Scheme::averagedImplicit}) {
    if (s == to_string(c)) {
      return c;
    }
  }
  throw ConfigError(field, "unknown scheme '" + s + "' (paperImplicit, explicitCentral, averagedImplicit)");
}

inline A2Mode parse_a2(const std::string& s, const std::string& field) {
  if (s == "exactMass") {
    return A2Mode::exactMass;
  }
  if (s == "unitMass") {
    return A2Mode::unitMass;
  }
  throw ConfigError(field, "unknown a2Mode '" + s + "' (exactMass, unitMass)");
}

// ---------------------------------------------------------------------------
// Pieces

inline Interval parse_domain(Fields& parent, const std::string& key) {
  const json* j = parent.get(key);
  if (!j) {
    return reference_interval;
  }
  Fields f(*j, parent.path(key));
  Interval d{f.number("lo"), f.number("hi")};
  f.finish();
  if (!(d.lo < d.hi)) {
    throw ConfigError(parent.path(key), "need lo < hi");
  }
  return d;
}

struct KernelConfig {
  double scale = 1.0;
  bool periodic = false;
  std::optional<double> period;
  std::optional<int> wrap_radius;

  /// `domain_width` is the default period.
  KernelSpec build(double domain_width) const {
    KernelSpec k = KernelSpec::gaussian(scale);
    if (periodic) {
      k = k.periodized(period.value_or(domain_width), wrap_radius);
    }
    return k;
  }
};

inline KernelConfig parse_kernel(Fields& parent, const std::string& key) {
  const json* j = parent.get(key);
  const std::string path = parent.path(key);
  if (!j) {
    throw ConfigError(path, "required");
  }
  Fields f(*j, path);
  const std::string family = f.string("family", "gaussian");
  if (family != "gaussian") {
    throw ConfigError(f.path("family"), "unknown family '" + family + "' (gaussian)");
  }
  const bool has_s = f.has("s");
  const bool has_delta = f.has("delta");
  if (has_s == has_delta) {
    throw ConfigError(path, "give exactly one of s and delta");
  }
  KernelConfig k;
  if (has_s) {
    k.scale = f.number("s");
    f.get("delta");
    if (!(k.scale > 0.0)) {
      throw ConfigError(f.path("s"), "must be positive");
    }
  } else {
    const double delta = f.number("delta");
    f.get("s");
    if (!(delta > 0.0)) {
      throw ConfigError(f.path("delta"), "must be positive");
    }
    k.scale = 1.0 / (2.0 * delta * delta);
  }
  k.periodic = f.boolean("periodic", false);
  k.period = f.optional_number("period");
  k.wrap_radius = f.optional_integer("wrapRadius");
  if (k.period && !(*k.period > 0.0)) {
    throw ConfigError(f.path("period"), "must be positive");
  }
  if (k.wrap_radius && *k.wrap_radius < 0) {
    throw ConfigError(f.path("wrapRadius"), "must be nonnegative");
  }
  if (!k.periodic && (k.period || k.wrap_radius)) {
    throw ConfigError(path, "period and wrapRadius need periodic = true");
  }
  f.finish();
  return k;
}

/// Initial data and forcing descriptors from the preset catalogue.
struct Preset {
  std::string kind = "zero";
  double amp = 1.0;
  double width = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double value = 0.0;
  double freq = 1.0;
  int k = 0;
  std::string id;
};

enum class PresetSlot { u0, v0, g };

inline Preset parse_preset(Fields& parent, const std::string& key, PresetSlot slot, bool two_d) {
  const std::string path = parent.path(key);
  const json* j = parent.get(key);
  Preset p;
  if (!j) {
    p.kind = slot == PresetSlot::g ? "none" : "zero";
    if (slot == PresetSlot::u0) {
      throw ConfigError(path, "required");
    }
    return p;
  }
  Fields f(*j, path);
  p.kind = f.string("type");
  auto reject = [&](const char* why) { throw ConfigError(f.path("type"), "'" + p.kind + "' " + why); };
  if (p.kind == "gaussianBump") {
    if (slot == PresetSlot::g) {
      reject("is not a forcing preset (none, cosine, manufactured)");
    }
    p.amp = f.number("amp", 1.0);
    p.width = f.number("width");
    if (!(p.width > 0.0)) {
      throw ConfigError(f.path("width"), "must be positive");
    }
    const json* c = f.get("center");
    if (c) {
      if (two_d) {
        if (!c->is_array() || c->size() != 2 || !(*c)[0].is_number() || !(*c)[1].is_number()) {
          throw ConfigError(f.path("center"), "expected [cx, cy]");
        }
        p.cx = (*c)[0].get<double>();
        p.cy = (*c)[1].get<double>();
      } else {
        if (!c->is_number()) {
          throw ConfigError(f.path("center"), "expected a number");
        }
        p.cx = c->get<double>();
      }
    } else if (two_d) {
      p.cx = 0.5;
      p.cy = 0.5;
    }
  } else if (p.kind == "legendreMode") {
    if (slot != PresetSlot::u0) {
      reject("is only available for u0");
    }
    p.k = f.integer("k");
    if (p.k < 0) {
      throw ConfigError(f.path("k"), "must be nonnegative");
    }
  } else if (p.kind == "constant") {
    if (slot != PresetSlot::u0) {
      reject("is only available for u0");
    }
    p.value = f.number("c");
  } else if (p.kind == "zero") {
    if (slot != PresetSlot::v0) {
      reject("is only available for v0");
    }
  } else if (p.kind == "none") {
    if (slot != PresetSlot::g) {
      reject("is only available for g");
    }
  } else if (p.kind == "cosine") {
    if (slot != PresetSlot::g) {
      reject("is only available for g");
    }
    p.amp = f.number("amp");
    p.freq = f.number("freq", 1.0);
  } else if (p.kind == "manufactured") {
    if (slot != PresetSlot::g) {
      reject("is only available for g");
    }
    if (two_d) {
      reject("is not available for midpoint2d");
    }
    p.id = f.string("id");
    if (!manufactured_by_id(p.id)) {
      throw ConfigError(f.path("id"), "unknown manufactured solution '" + p.id + "' (gaussCos, polyQuad)");
    }
  } else {
    throw ConfigError(f.path("type"), "unknown preset '" + p.kind + "'");
  }
  f.finish();
  return p;
}

inline json preset_json(const Preset& p, bool two_d) {
  json j;
  j["type"] = p.kind;
  if (p.kind == "gaussianBump") {
    j["amp"] = p.amp;
    j["width"] = p.width;
    j["center"] = two_d ? json::array({p.cx, p.cy}) : json(p.cx);
  } else if (p.kind == "legendreMode") {
    j["k"] = p.k;
  } else if (p.kind == "constant") {
    j["c"] = p.value;
  } else if (p.kind == "cosine") {
    j["amp"] = p.amp;
    j["freq"] = p.freq;
  } else if (p.kind == "manufactured") {
    j["id"] = p.id;
  }
  return j;
}

/// 1D preset as a function of x. legendreMode uses the reference coordinate.
inline std::function<double(double)> preset_function(const Preset& p, Interval domain) {
  if (p.kind == "gaussianBump") {
    return [p](double x) {
      const double z = (x - p.cx) / p.width;
      return p.amp * std::exp(-z * z);
    };
  }
  if (p.kind == "legendreMode") {
    return [p, domain](double x) { return legendre_eval(p.k, domain.to_reference(x)); };
  }
  if (p.kind == "constant") {
    return [p](double) { return p.value; };
  }
  if (p.kind == "cosine") {
    return [p](double x) { return p.amp * std::cos(2.0 * std::numbers::pi * p.freq * x); };
  }
  return [](double) { return 0.0; };
}

/// 2D preset on the unit torus.
inline std::function<double(double, double)> preset_function_2d(const Preset& p) {
  if (p.kind == "gaussianBump") {
    return [p](double x, double y) {
      const double r2 = ((x - p.cx) * (x - p.cx) + (y - p.cy) * (y - p.cy)) / (p.width * p.width);
      return p.amp * std::exp(-r2);
    };
  }
  if (p.kind == "legendreMode") {
    return [p](double x, double y) { return legendre_eval(p.k, 2.0 * x - 1.0) * legendre_eval(p.k, 2.0 * y - 1.0); };
  }
  if (p.kind == "constant") {
    return [p](double, double) { return p.value; };
  }
  if (p.kind == "cosine") {
    return [p](double x, double y) {
      const double w = 2.0 * std::numbers::pi * p.freq;
      return p.amp * std::cos(w * x) * std::cos(w * y);
    };
  }
  return [](double, double) { return 0.0; };
}

// ---------------------------------------------------------------------------
// run

struct GridConfig {
  std::string type;         // gauss, composite, midpoint
  int points = 0;           // gauss, composite
  int subdomains = 0;       // composite
  int cells = 0;            // midpoint, midpoint2d
};

struct RunConfig {
  SolverKind solver = SolverKind::galerkin;
  Interval domain = reference_interval;
  KernelConfig kernel;
  double rho = 1.0;
  int N = 0;
  std::optional<RuleLayout> quadrature;
  A2Mode a2 = A2Mode::exactMass;
  int sample_points = 201;
  GridConfig grid;
  Scheme scheme = Scheme::paperImplicit;
  double dt = 0.0;
  double T = 0.0;
  std::vector<double> snapshot_times;
  Preset u0;
  Preset v0;
  Preset g;

  bool two_d() const noexcept { return solver == SolverKind::midpoint2d; }
  bool manufactured() const noexcept { return g.kind == "manufactured"; }
};

inline GridConfig parse_grid(Fields& parent, SolverKind solver) {
  const std::string path = parent.path("grid");
  const json* j = parent.get("grid");
  if (solver == SolverKind::galerkin) {
    if (j) {
      throw ConfigError(path, "not used by the galerkin solver");
    }
    return {};
  }
  if (!j) {
    throw ConfigError(path, "required for " + to_string(solver));
  }
  Fields f(*j, path);
  GridConfig g;
  if (solver == SolverKind::midpoint2d) {
    g.type = "midpoint";
    g.cells = f.integer("cells");
    if (g.cells < 4) {
      throw ConfigError(f.path("cells"), "need at least 4 cells per side");
    }
    f.finish();
    return g;
  }
  g.type = f.string("type");
  if (g.type == "gauss") {
    g.points = f.integer("points");
    if (g.points < 1) {
      throw ConfigError(f.path("points"), "must be >= 1");
    }
  } else if (g.type == "composite") {
    g.subdomains = f.integer("subdomains");
    g.points = f.integer("points");
    if (g.subdomains < 1) {
      throw ConfigError(f.path("subdomains"), "must be >= 1");
    }
    if (g.points < 1) {
      throw ConfigError(f.path("points"), "must be >= 1");
    }
  } else if (g.type == "midpoint") {
    g.cells = f.integer("cells");
    if (g.cells < 1) {
      throw ConfigError(f.path("cells"), "must be >= 1");
    }
  } else {
    throw ConfigError(f.path("type"), "unknown grid type '" + g.type + "' (gauss, composite, midpoint)");
  }
  f.finish();
  return g;
}

inline void validate_times(const std::string& path, double dt, double T, const std::vector<double>& times) {
  if (!(dt > 0.0)) {
    throw ConfigError(path + "dt", "must be positive");
  }
  if (!(T >= 0.0)) {
    throw ConfigError(path + "T", "must be nonnegative");
  }
  for (double t : times) {
    if (t < 0.0 || t > T) {
      throw ConfigError(path + "snapshotTimes", "time " + std::to_string(t) + " outside [0, T]");
    }
  }
  try {
    plan_steps(dt, T, times);
  } catch (const MisalignedSnapshot& e) {
    throw ConfigError(path + "snapshotTimes", e.what());
  }
}

/// `path` prefixes every field name (e.g. "first." inside a compare config).
inline RunConfig parse_run(const json& j, const std::string& path = "") {
  Fields f(j, path.empty() ? "" : path.substr(0, path.size() - 1));
  RunConfig c;
  c.solver = parse_solver(f.string("solver"), f.path("solver"));
  const bool two_d = c.two_d();
  if (two_d) {
    if (f.get("domain")) {
      throw ConfigError(f.path("domain"), "midpoint2d always runs on the unit torus");
    }
    c.domain = {0.0, 1.0};
  } else {
    c.domain = parse_domain(f, "domain");
  }
  c.kernel = parse_kernel(f, "kernel");
  if (two_d) {
    if (!c.kernel.periodic && f.has("kernel") && f.get("kernel")->contains("periodic")) {
      throw ConfigError(f.path("kernel.periodic"), "midpoint2d needs a periodic kernel");
    }
    if (c.kernel.period && *c.kernel.period != 1.0) {
      throw ConfigError(f.path("kernel.period"), "midpoint2d runs on the unit torus (period 1)");
    }
    c.kernel.periodic = true;
    c.kernel.period = 1.0;
  }
  c.rho = f.number("rho");
  if (!(c.rho > 0.0)) {
    throw ConfigError(f.path("rho"), "must be positive");
  }

  if (c.solver == SolverKind::galerkin) {
    c.N = f.integer("N");
    if (c.N < 0) {
      throw ConfigError(f.path("N"), "must be nonnegative");
    }
    if (const json* q = f.get("quadrature")) {
      Fields qf(*q, f.path("quadrature"));
      RuleLayout layout{qf.integer("panels", 1), qf.integer("points")};
      qf.finish();
      if (layout.panels < 1) {
        throw ConfigError(qf.path("panels"), "must be >= 1");
      }
      if (layout.points_per_panel < c.N + 1) {
        throw ConfigError(qf.path("points"), "need at least N + 1 points per panel");
      }
      c.quadrature = layout;
    }
    c.a2 = parse_a2(f.string("a2Mode", "exactMass"), f.path("a2Mode"));
    c.sample_points = f.integer("samplePoints", 201);
    if (c.sample_points < 2) {
      throw ConfigError(f.path("samplePoints"), "must be >= 2");
    }
  } else {
    for (const char* key : {"N", "quadrature", "a2Mode", "samplePoints"}) {
      if (f.get(key)) {
        throw ConfigError(f.path(key), "only used by the galerkin solver");
      }
    }
  }
  c.grid = parse_grid(f, c.solver);

  if (two_d) {
    if (f.get("scheme")) {
      throw ConfigError(f.path("scheme"), "midpoint2d always uses semi-implicit Euler");
    }
  } else {
    c.scheme = parse_scheme(f.string("scheme", "paperImplicit"), f.path("scheme"));
  }
  c.dt = f.number("dt");
  c.T = f.number("T");
  c.snapshot_times = f.has("snapshotTimes") ? f.numbers("snapshotTimes") : std::vector<double>{0.0, c.T};
  f.get("snapshotTimes");
  validate_times(path, c.dt, c.T, c.snapshot_times);

  c.g = parse_preset(f, "g", PresetSlot::g, two_d);
  if (c.manufactured()) {
    for (const char* key : {"u0", "v0"}) {
      if (f.get(key)) {
        throw ConfigError(f.path(key), "initial data come from the manufactured solution");
      }
    }
    c.u0.kind = "manufactured";
    c.u0.id = c.g.id;
    c.v0 = c.u0;
  } else {
    c.u0 = parse_preset(f, "u0", PresetSlot::u0, two_d);
    c.v0 = parse_preset(f, "v0", PresetSlot::v0, two_d);
  }
  f.finish();
  return c;
}

/// The configuration with every default filled in.
inline json resolved_json(const RunConfig& c) {
  json j;
  j["solver"] = to_string(c.solver);
  if (!c.two_d()) {
    j["domain"] = {{"lo", c.domain.lo}, {"hi", c.domain.hi}};
  }
  const KernelSpec k = c.kernel.build(c.domain.width());
  json kj = {{"family", "gaussian"}, {"s", k.scale()}, {"delta", k.width()}, {"periodic", k.periodic()}};
  if (k.periodic()) {
    kj["period"] = k.period();
    kj["wrapRadius"] = k.wrap_radius();
  }
  j["kernel"] = kj;
  j["rho"] = c.rho;
  if (c.solver == SolverKind::galerkin) {
    j["N"] = c.N;
    const RuleLayout layout = c.quadrature.value_or(default_rule_layout(k, c.N, c.domain));
    j["quadrature"] = {{"panels", layout.panels}, {"points", layout.points_per_panel}};
    j["a2Mode"] = std::string(to_string(c.a2));
    j["samplePoints"] = c.sample_points;
  } else if (c.two_d()) {
    j["grid"] = {{"cells", c.grid.cells}};
  } else {
    json g = {{"type", c.grid.type}};
    if (c.grid.type == "gauss") {
      g["points"] = c.grid.points;
    } else if (c.grid.type == "composite") {
      g["subdomains"] = c.grid.subdomains;
      g["points"] = c.grid.points;
    } else {
      g["cells"] = c.grid.cells;
    }
    j["grid"] = g;
  }
  j["scheme"] = c.two_d() ? std::string("semiImplicitEuler") : std::string(to_string(c.scheme));
  j["dt"] = c.dt;
  j["T"] = c.T;
  j["snapshotTimes"] = c.snapshot_times;
  j["u0"] = preset_json(c.u0, c.two_d());
  j["v0"] = preset_json(c.v0, c.two_d());
  j["g"] = preset_json(c.g, c.two_d());
  return j;
}

// ---------------------------------------------------------------------------
// convergence

struct SweepSpatial {
  std::vector<int> degrees;
  double dt = 0.0;
  Scheme scheme = Scheme::averagedImplicit;
};

struct SweepTemporal {
  std::vector<double> dts;
  int N = 0;
  Scheme scheme = Scheme::averagedImplicit;
  double T = 0.0;
};

struct ConvergenceConfig {
  ManufacturedSetup setup;
  KernelConfig kernel;
  std::optional<SweepSpatial> spatial;
  std::optional<SweepTemporal> temporal;
};

inline ConvergenceConfig parse_convergence(const json& j) {
  Fields f(j, "");
  ConvergenceConfig c;
  c.setup.domain = parse_domain(f, "domain");
  c.kernel = parse_kernel(f, "kernel");
  c.setup.kernel = c.kernel.build(c.setup.domain.width());
  c.setup.rho = f.number("rho");
  if (!(c.setup.rho > 0.0)) {
    throw ConfigError("rho", "must be positive");
  }
  c.setup.mode = parse_a2(f.string("a2Mode", "exactMass"), "a2Mode");
  const std::string id = f.string("manufactured", "gaussCos");
  const auto exact = manufactured_by_id(id);
  if (!exact) {
    throw ConfigError("manufactured", "unknown manufactured solution '" + id + "' (gaussCos, polyQuad)");
  }
  c.setup.exact = *exact;
  c.setup.T = f.number("T");
  if (!(c.setup.T > 0.0)) {
    throw ConfigError("T", "must be positive");
  }

  if (const json* s = f.get("spatial")) {
    Fields sf(*s, "spatial");
    SweepSpatial sw;
    sw.degrees = sf.integers("N");
    sw.dt = sf.number("dt");
    sw.scheme = parse_scheme(sf.string("scheme", "averagedImplicit"), "spatial.scheme");
    sf.finish();
    if (sw.degrees.size() < 2) {
      throw ConfigError("spatial.N", "need at least two degrees to see convergence");
    }
    for (int N : sw.degrees) {
      if (N < 0) {
        throw ConfigError("spatial.N", "degrees must be nonnegative");
      }
    }
    validate_times("spatial.", sw.dt, c.setup.T, {c.setup.T});
    c.spatial = sw;
  }
  if (const json* t = f.get("temporal")) {
    Fields tf(*t, "temporal");
    SweepTemporal sw;
    sw.dts = tf.numbers("dt");
    sw.N = tf.integer("N");
    sw.scheme = parse_scheme(tf.string("scheme", "averagedImplicit"), "temporal.scheme");
    sw.T = tf.number("T", c.setup.T);
    tf.finish();
    if (sw.dts.size() < 2) {
      throw ConfigError("temporal.dt", "need at least two step sizes to fit an order");
    }
    if (sw.N < 0) {
      throw ConfigError("temporal.N", "must be nonnegative");
    }
    if (!(sw.T > 0.0)) {
      throw ConfigError("temporal.T", "must be positive");
    }
    for (double dt : sw.dts) {
      validate_times("temporal.", dt, sw.T, {sw.T});
    }
    c.temporal = sw;
  }
  if (!c.spatial && !c.temporal) {
    throw ConfigError("spatial", "give a spatial or a temporal sweep");
  }
  f.finish();
  return c;
}

// ---------------------------------------------------------------------------
// stability

struct StabilityConfig {
  Interval domain = reference_interval;
  KernelConfig kernel;
  double rho = 1.0;
  A2Mode a2 = A2Mode::exactMass;
  std::vector<int> degrees;
  std::vector<double> dts;
  std::vector<Scheme> schemes{Scheme::paperImplicit, Scheme::explicitCentral, Scheme::averagedImplicit};
  long power_iterations = 100'000;
};

inline StabilityConfig parse_stability(const json& j) {
  Fields f(j, "");
  StabilityConfig c;
  c.domain = parse_domain(f, "domain");
  c.kernel = parse_kernel(f, "kernel");
  c.rho = f.number("rho");
  if (!(c.rho > 0.0)) {
    throw ConfigError("rho", "must be positive");
  }
  c.a2 = parse_a2(f.string("a2Mode", "exactMass"), "a2Mode");
  c.degrees = f.integers("N");
  if (c.degrees.empty()) {
    throw ConfigError("N", "empty list");
  }
  for (int N : c.degrees) {
    if (N < 0) {
      throw ConfigError("N", "degrees must be nonnegative");
    }
  }
  c.dts = f.numbers("dt");
  if (c.dts.empty()) {
    throw ConfigError("dt", "empty list");
  }
  for (double dt : c.dts) {
    if (!(dt > 0.0)) {
      throw ConfigError("dt", "step sizes must be positive");
    }
  }
  if (const json* s = f.get("schemes")) {
    if (!s->is_array() || s->empty()) {
      throw ConfigError("schemes", "expected a nonempty array of scheme names");
    }
    c.schemes.clear();
    for (const auto& e : *s) {
      if (!e.is_string()) {
        throw ConfigError("schemes", "expected scheme names");
      }
      c.schemes.push_back(parse_scheme(e.get<std::string>(), "schemes"));
    }
  }
  c.power_iterations = f.integer("powerIterations", 100'000);
  if (c.power_iterations < 1) {
    throw ConfigError("powerIterations", "must be >= 1");
  }
  f.finish();
  return c;
}

// ---------------------------------------------------------------------------
// compare

struct CompareConfig {
  RunConfig first;
  RunConfig second;
};

inline CompareConfig parse_compare(const json& j) {
  Fields f(j, "");
  const json* a = f.get("first");
  const json* b = f.get("second");
  if (!a) {
    throw ConfigError("first", "required");
  }
  if (!b) {
    throw ConfigError("second", "required");
  }
  f.finish();
  CompareConfig c{parse_run(*a, "first."), parse_run(*b, "second.")};
  for (const auto* r : {&c.first, &c.second}) {
    if (r->two_d()) {
      throw ConfigError(r == &c.first ? "first.solver" : "second.solver", "compare handles 1D solvers only");
    }
  }
  const json ra = resolved_json(c.first);
  const json rb = resolved_json(c.second);
  for (const char* key : {"domain", "kernel", "rho", "u0", "v0", "g", "T", "snapshotTimes"}) {
    if (ra.at(key) != rb.at(key)) {
      throw ConfigError(std::string("second.") + key, "differs from first; both blocks must describe one problem");
    }
  }
  return c;
}

} // namespace nlwave::cli
