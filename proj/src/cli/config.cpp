#include "qsd/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qsd/errors.hpp"

namespace qsd::cli {
namespace {

// Object reader that remembers which keys were consumed, so that anything
// left over at the end is reported as unknown.
class Obj {
 public:
  Obj(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_ + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(where(key) + " is required");
    return j_.at(key);
  }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  double number(const std::string& key, double def) {
    const Json* v = find(key);
    if (!v) return def;
    if (!v->is_number()) throw ConfigError(where(key) + " must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(where(key) + " must be finite");
    return x;
  }

  long integer(const std::string& key, long def) {
    const Json* v = find(key);
    if (!v) return def;
    if (!v->is_number_integer()) throw ConfigError(where(key) + " must be an integer");
    return v->get<long>();
  }

  std::size_t count(const std::string& key, std::size_t def) {
    const long n = integer(key, static_cast<long>(def));
    if (n < 0) throw ConfigError(where(key) + " must be nonnegative");
    return static_cast<std::size_t>(n);
  }

  bool boolean(const std::string& key, bool def) {
    const Json* v = find(key);
    if (!v) return def;
    if (!v->is_boolean()) throw ConfigError(where(key) + " must be true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& def) {
    const Json* v = find(key);
    if (!v) return def;
    if (!v->is_string()) throw ConfigError(where(key) + " must be a string");
    return v->get<std::string>();
  }

  std::string choice(const std::string& key, const std::string& def, std::initializer_list<const char*> allowed) {
    const std::string s = string(key, def);
    for (const char* a : allowed) {
      if (s == a) return s;
    }
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    throw ConfigError(where(key) + " = \"" + s + "\" is not one of {" + list + "}");
  }

  std::vector<double> numbers(const std::string& key) {
    const Json* v = find(key);
    if (!v) return {};
    if (!v->is_array()) throw ConfigError(where(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        throw ConfigError(where(key) + " must be an array of finite numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const std::string& key) {
    const Json* v = find(key);
    if (!v) return {};
    if (!v->is_array()) throw ConfigError(where(key) + " must be an array of integers");
    std::vector<int> out;
    for (const auto& e : *v) {
      if (!e.is_number_integer()) throw ConfigError(where(key) + " must be an array of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }

  const Json* array(const std::string& key) {
    const Json* v = find(key);
    if (v && !v->is_array()) throw ConfigError(where(key) + " must be an array");
    return v;
  }

  /// Rejects keys that were never asked for.
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key " + where(key));
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<model::Interval> parse_intervals(const Json* v, const std::string& path) {
  std::vector<model::Interval> out;
  if (!v) return out;
  if (!v->is_array()) throw ConfigError(path + " must be an array of [lo, hi] pairs");
  for (const auto& e : *v) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ConfigError(path + " must be an array of [lo, hi] pairs");
    }
    model::Interval iv{e[0].get<double>(), e[1].get<double>()};
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
      throw ConfigError(path + " needs finite lo < hi");
    }
    out.push_back(iv);
  }
  return out;
}

Json intervals_json(const std::vector<model::Interval>& v) {
  Json a = Json::array();
  for (const auto& iv : v) a.push_back({iv.lo, iv.hi});
  return a;
}

model::FieldTerm parse_term(const Json& j, const std::string& path) {
  Obj o(j, path);
  const std::string type = o.choice("type", "", {"constant", "polynomial", "sine", "indicator"});
  model::FieldTerm term;
  if (type == "constant") {
    term = model::ConstantTerm{o.number("value", 0.0)};
  } else if (type == "polynomial") {
    model::PolynomialTerm t;
    t.coeffs = o.numbers("coeffs");
    t.axis = static_cast<int>(o.integer("axis", -1));
    if (t.axis < -1) throw ConfigError(o.where("axis") + " must be -1 (all axes) or an axis index");
    term = t;
  } else if (type == "sine") {
    model::SineTerm t;
    t.amplitude = o.number("amplitude", 1.0);
    t.frequency = o.number("frequency", 1.0);
    t.phase = o.number("phase", 0.0);
    t.axis = static_cast<int>(o.integer("axis", 0));
    t.power = static_cast<int>(o.integer("power", 1));
    if (t.axis < 0) throw ConfigError(o.where("axis") + " must be an axis index");
    if (t.power < 0) throw ConfigError(o.where("power") + " must be nonnegative");
    term = t;
  } else {
    model::IndicatorTerm t;
    t.sides = parse_intervals(o.find("sides"), o.where("sides"));
    t.value = o.number("value", 1.0);
    term = t;
  }
  o.finish();
  return term;
}

Json term_json(const model::FieldTerm& term) {
  return std::visit(
      [](const auto& t) -> Json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, model::ConstantTerm>) {
          return {{"type", "constant"}, {"value", t.value}};
        } else if constexpr (std::is_same_v<T, model::PolynomialTerm>) {
          return {{"type", "polynomial"}, {"coeffs", t.coeffs}, {"axis", t.axis}};
        } else if constexpr (std::is_same_v<T, model::SineTerm>) {
          return {{"type", "sine"},   {"amplitude", t.amplitude}, {"frequency", t.frequency},
                  {"phase", t.phase}, {"axis", t.axis},           {"power", t.power}};
        } else {
          return {{"type", "indicator"}, {"sides", intervals_json(t.sides)}, {"value", t.value}};
        }
      },
      term);
}

std::vector<model::FieldTerm> parse_terms(const Json* v, const std::string& path) {
  std::vector<model::FieldTerm> out;
  if (!v) return out;
  if (!v->is_array()) throw ConfigError(path + " must be an array of terms");
  for (std::size_t i = 0; i < v->size(); ++i) out.push_back(parse_term((*v)[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Json terms_json(const std::vector<model::FieldTerm>& terms) {
  Json a = Json::array();
  for (const auto& t : terms) a.push_back(term_json(t));
  return a;
}

void check_axes(const std::vector<model::FieldTerm>& terms, std::size_t dim, const std::string& path) {
  for (const auto& term : terms) {
    int axis = -1;
    std::size_t sides = 0;
    if (const auto* p = std::get_if<model::PolynomialTerm>(&term)) axis = p->axis;
    if (const auto* s = std::get_if<model::SineTerm>(&term)) axis = s->axis;
    if (const auto* ind = std::get_if<model::IndicatorTerm>(&term)) sides = ind->sides.size();
    if (axis >= static_cast<int>(dim)) throw ConfigError(path + " refers to axis " + std::to_string(axis));
    if (sides > dim) throw ConfigError(path + " has an indicator with too many sides");
  }
}

ModelConfig parse_model(const Json& j) {
  Obj o(j, "model");
  ModelConfig m;

  Obj p(o.at("process"), "model.process");
  m.process.type = p.choice("type", "overdamped", {"overdamped", "kinetic", "stable"});
  m.process.gamma = p.number("gamma", 1.0);
  m.process.alpha = p.number("alpha", 1.0);
  m.process.c_alpha = p.number("c_alpha", 1.0);
  p.finish();
  if (m.process.type == "stable" && !(m.process.alpha > 0.0 && m.process.alpha < 2.0)) {
    throw ConfigError("model.process.alpha must lie in (0, 2)");
  }
  if (!(m.process.gamma > 0.0)) throw ConfigError("model.process.gamma must be positive");
  if (!(m.process.c_alpha > 0.0)) throw ConfigError("model.process.c_alpha must be positive");

  Obj d(o.at("domain"), "model.domain");
  m.domain.box = parse_intervals(&d.at("box"), "model.domain.box");
  m.domain.region = d.choice("region", "box", {"box", "ball"});
  m.domain.sides = parse_intervals(d.find("sides"), "model.domain.sides");
  m.domain.center = d.numbers("center");
  m.domain.radius = d.number("radius", 0.0);
  d.finish();
  const std::size_t dim = m.domain.box.size();
  if (dim == 0) throw ConfigError("model.domain.box must have at least one side");
  if (m.process.type == "kinetic" && dim % 2 != 0) {
    throw ConfigError("model.domain.box for a kinetic process covers (x, v) and needs an even dimension");
  }
  if (m.domain.region == "box" && !m.domain.sides.empty() && m.domain.sides.size() != dim) {
    throw ConfigError("model.domain.sides must match the box dimension");
  }
  if (m.domain.region == "ball") {
    if (m.domain.center.size() != dim) throw ConfigError("model.domain.center must match the box dimension");
    if (!(m.domain.radius > 0.0)) throw ConfigError("model.domain.radius must be positive");
  }

  if (const Json* g = o.find("grid")) {
    Obj go(*g, "model.grid");
    m.grid.cells = go.integers("cells");
    if (go.has("truncation_radius")) m.grid.truncation_radius = go.number("truncation_radius", 0.0);
    go.finish();
    if (!m.grid.cells.empty() && m.grid.cells.size() != dim) {
      throw ConfigError("model.grid.cells must match the box dimension");
    }
    for (int c : m.grid.cells) {
      if (c < 2) throw ConfigError("model.grid.cells must be at least 2 per axis");
    }
    if (m.grid.truncation_radius && !(*m.grid.truncation_radius > 0.0)) {
      throw ConfigError("model.grid.truncation_radius must be positive");
    }
  }

  m.potential = parse_terms(o.array("potential"), "model.potential");
  check_axes(m.potential, m.process.type == "kinetic" ? dim / 2 : dim, "model.potential");

  if (const Json* w = o.find("weight")) {
    Obj wo(*w, "model.weight");
    m.weight.type = wo.choice("type", "unit", {"unit", "exponential", "stable_lyapunov"});
    m.weight.a = wo.number("a", 0.0);
    m.weight.beta = wo.number("beta", 0.0);
    m.weight.theta = wo.number("theta", 0.0);
    m.weight.p = wo.number("p", 2.0);
    wo.finish();
    if (m.weight.type == "stable_lyapunov") {
      if (m.process.type != "stable") throw ConfigError("model.weight stable_lyapunov needs a stable process");
      const double k = m.weight.beta * m.weight.theta;
      if (!(k > 0.0) || !(2.0 * k < std::min(m.process.alpha, 1.0))) {
        throw ConfigError("model.weight needs 0 < 2*beta*theta < min(alpha, 1)");
      }
      if (!(m.weight.p > 1.0)) throw ConfigError("model.weight.p must exceed 1");
    }
    if (m.weight.type == "exponential" && !(m.weight.a >= 0.0)) {
      throw ConfigError("model.weight.a must be nonnegative");
    }
  }
  o.finish();
  return m;
}

SolverConfig parse_solver(const Json* j, std::size_t dim) {
  SolverConfig s;
  if (!j) return s;
  Obj o(*j, "solver");
  s.tol = o.number("tol", s.tol);
  s.max_iterations = static_cast<int>(o.integer("max_iterations", s.max_iterations));
  s.twist = parse_terms(o.array("twist"), "solver.twist");
  s.gap_horizon = o.number("gap_horizon", 0.0);
  s.survival_horizon = o.number("survival_horizon", 0.0);
  s.start = o.numbers("start");
  s.export_operator = o.boolean("export_operator", false);
  o.finish();
  if (!(s.tol > 0.0)) throw ConfigError("solver.tol must be positive");
  if (s.max_iterations < 1) throw ConfigError("solver.max_iterations must be positive");
  if (s.gap_horizon < 0.0 || s.survival_horizon < 0.0) throw ConfigError("solver horizons must be nonnegative");
  if (!s.start.empty() && s.start.size() != dim) throw ConfigError("solver.start must match the box dimension");
  check_axes(s.twist, dim, "solver.twist");
  return s;
}

SimulationConfig parse_simulation(const Json* j, std::size_t dim) {
  SimulationConfig s;
  if (!j) return s;
  Obj o(*j, "simulation");
  s.dt = o.number("dt", s.dt);
  s.T = o.number("T", s.T);
  s.n_paths = o.count("n_paths", 0);
  s.x0 = o.numbers("x0");
  s.bins = o.integers("bins");
  s.records = o.count("records", s.records);
  s.min_survivors = o.count("min_survivors", s.min_survivors);
  if (const Json* pots = o.array("potentials")) {
    for (std::size_t i = 0; i < pots->size(); ++i) {
      const std::string path = "simulation.potentials[" + std::to_string(i) + "]";
      Obj po((*pots)[i], path);
      TaggedPotential tp;
      tp.tag = po.string("tag", "");
      tp.terms = parse_terms(po.array("terms"), path + ".terms");
      po.finish();
      if (tp.tag.empty()) throw ConfigError(path + ".tag is required");
      check_axes(tp.terms, dim, path + ".terms");
      s.potentials.push_back(std::move(tp));
    }
  }
  s.extrapolation_ratio = o.number("extrapolation_ratio", 0.0);
  s.fv_particles = o.count("fv_particles", 0);
  s.fv_burn_in = o.number("fv_burn_in", 0.0);
  o.finish();
  if (!(s.dt > 0.0) || !(s.T > 0.0)) throw ConfigError("simulation.dt and simulation.T must be positive");
  if (!(s.dt <= s.T)) throw ConfigError("simulation.dt must not exceed simulation.T");
  const bool runs = s.n_paths > 0 || s.fv_particles > 0;
  if (runs && s.x0.size() != dim) throw ConfigError("simulation.x0 must match the box dimension");
  if (runs && (s.bins.empty() || s.bins.size() > dim)) {
    throw ConfigError("simulation.bins needs between 1 and the box dimension entries");
  }
  for (int b : s.bins) {
    if (b < 1) throw ConfigError("simulation.bins must be positive");
  }
  if (s.extrapolation_ratio != 0.0 && !(s.extrapolation_ratio > 1.0)) {
    throw ConfigError("simulation.extrapolation_ratio must be 0 (off) or greater than 1");
  }
  if (s.fv_burn_in < 0.0 || !(s.fv_burn_in < s.T)) throw ConfigError("simulation.fv_burn_in must lie in [0, T)");
  if (s.fv_particles == 1) throw ConfigError("simulation.fv_particles needs at least 2 particles");
  return s;
}

LdpConfig parse_ldp(const Json* j, std::size_t dim) {
  LdpConfig l;
  if (!j) return l;
  Obj o(*j, "ldp");
  l.bound = o.number("bound", l.bound);
  l.tol = o.number("tol", l.tol);
  l.max_iterations = static_cast<int>(o.integer("max_iterations", l.max_iterations));
  l.reversible = o.boolean("reversible", false);
  l.gateaux_pairs = o.count("gateaux_pairs", 0);
  if (const Json* betas = o.array("betas")) {
    for (std::size_t i = 0; i < betas->size(); ++i) {
      const std::string path = "ldp.betas[" + std::to_string(i) + "]";
      Obj bo((*betas)[i], path);
      BetaConfig b;
      b.tag = bo.string("tag", "");
      b.kind = bo.choice("kind", "qed", {"qed", "uniform", "mixture", "dirac", "density"});
      b.weight = bo.number("weight", 1.0);
      b.point = bo.numbers("point");
      b.terms = parse_terms(bo.array("terms"), path + ".terms");
      b.square = bo.boolean("square", false);
      b.gibbs = bo.boolean("gibbs", false);
      bo.finish();
      if (b.tag.empty()) throw ConfigError(path + ".tag is required");
      if (b.kind == "mixture" && !(b.weight >= 0.0 && b.weight <= 1.0)) {
        throw ConfigError(path + ".weight must lie in [0, 1]");
      }
      if (b.kind == "dirac" && b.point.size() != dim) throw ConfigError(path + ".point must match the box dimension");
      if (b.kind == "density" && b.terms.empty()) throw ConfigError(path + ".terms is required for a density");
      check_axes(b.terms, dim, path + ".terms");
      l.betas.push_back(std::move(b));
    }
  }
  o.finish();
  if (!(l.bound > 0.0)) throw ConfigError("ldp.bound must be positive");
  if (!(l.tol > 0.0)) throw ConfigError("ldp.tol must be positive");
  if (l.max_iterations < 1) throw ConfigError("ldp.max_iterations must be positive");
  return l;
}

std::vector<CheckConfig> parse_checks(const Json* j) {
  std::vector<CheckConfig> out;
  if (!j) return out;
  if (!j->is_array()) throw ConfigError("checks must be an array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < j->size(); ++i) {
    const std::string path = "checks[" + std::to_string(i) + "]";
    Obj o((*j)[i], path);
    CheckConfig c;
    c.metric = o.string("metric", "");
    c.name = o.string("name", c.metric);
    c.kind = o.choice("kind", "abs", {"abs", "rel", "max", "min", "within_ci"});
    c.expected = o.number("expected", 0.0);
    c.reference = o.string("reference", "");
    c.tolerance = o.number("tolerance", 0.0);
    o.finish();
    if (c.metric.empty()) throw ConfigError(path + ".metric is required");
    if (c.tolerance < 0.0) throw ConfigError(path + ".tolerance must be nonnegative");
    if (!names.insert(c.name).second) throw ConfigError(path + ".name \"" + c.name + "\" is duplicated");
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

RunConfig parse_config(const Json& j) {
  Obj o(j, "config");
  RunConfig c;
  const long schema = o.integer("schema", -1);
  if (schema != 1) throw ConfigError("config.schema must be 1");
  c.experiment = o.choice("experiment", "spectral", {"spectral", "simulate", "ldp", "validate"});
  c.model = parse_model(o.at("model"));
  const std::size_t dim = c.model.domain.box.size();
  c.solver = parse_solver(o.find("solver"), dim);
  c.simulation = parse_simulation(o.find("simulation"), dim);
  c.ldp = parse_ldp(o.find("ldp"), dim);
  if (const Json* r = o.find("rng")) {
    Obj ro(*r, "rng");
    if (const Json* s = ro.find("master_seed")) {
      if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0)) {
        throw ConfigError("rng.master_seed must be a nonnegative integer");
      }
      c.master_seed = s->get<std::uint64_t>();
    }
    ro.finish();
  }
  c.threads = static_cast<int>(o.integer("threads", 1));
  if (c.threads < 1) throw ConfigError("config.threads must be at least 1");
  c.output_dir = o.string("output_dir", c.output_dir);
  c.checks = parse_checks(o.find("checks"));
  o.finish();

  const bool needs_grid = c.experiment == "spectral" || c.experiment == "ldp" ||
                          (c.experiment == "validate" && (!c.ldp.betas.empty() || c.ldp.reversible));
  if (needs_grid && c.model.grid.cells.empty()) throw ConfigError("model.grid.cells is required for this experiment");
  if (c.ldp.reversible && c.model.process.type != "overdamped") {
    throw ConfigError("ldp.reversible needs an overdamped process");
  }
  if (c.experiment == "simulate" && c.simulation.n_paths == 0 && c.simulation.fv_particles == 0) {
    throw ConfigError("simulate needs simulation.n_paths or simulation.fv_particles");
  }
  // Cheap structural checks on the model objects themselves.
  try {
    model::validate(make_process(c.model));
    const auto domain = make_domain(c.model);
    if (!c.simulation.x0.empty() && !domain.contains(c.simulation.x0)) {
      throw ConfigError("simulation.x0 must lie in D");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("model rejected: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
  return parse_config(j);
}

Json to_json(const RunConfig& c) {
  Json model;
  model["process"] = {{"type", c.model.process.type},
                      {"gamma", c.model.process.gamma},
                      {"alpha", c.model.process.alpha},
                      {"c_alpha", c.model.process.c_alpha}};
  Json domain = {{"box", intervals_json(c.model.domain.box)}, {"region", c.model.domain.region}};
  if (!c.model.domain.sides.empty()) domain["sides"] = intervals_json(c.model.domain.sides);
  if (c.model.domain.region == "ball") {
    domain["center"] = c.model.domain.center;
    domain["radius"] = c.model.domain.radius;
  }
  model["domain"] = domain;
  Json grid = {{"cells", c.model.grid.cells}};
  if (c.model.grid.truncation_radius) grid["truncation_radius"] = *c.model.grid.truncation_radius;
  model["grid"] = grid;
  model["potential"] = terms_json(c.model.potential);
  model["weight"] = {{"type", c.model.weight.type},
                     {"a", c.model.weight.a},
                     {"beta", c.model.weight.beta},
                     {"theta", c.model.weight.theta},
                     {"p", c.model.weight.p}};

  Json solver = {{"tol", c.solver.tol},
                 {"max_iterations", c.solver.max_iterations},
                 {"twist", terms_json(c.solver.twist)},
                 {"gap_horizon", c.solver.gap_horizon},
                 {"survival_horizon", c.solver.survival_horizon},
                 {"start", c.solver.start},
                 {"export_operator", c.solver.export_operator}};

  Json pots = Json::array();
  for (const auto& p : c.simulation.potentials) pots.push_back({{"tag", p.tag}, {"terms", terms_json(p.terms)}});
  Json sim = {{"dt", c.simulation.dt},
              {"T", c.simulation.T},
              {"n_paths", c.simulation.n_paths},
              {"x0", c.simulation.x0},
              {"bins", c.simulation.bins},
              {"records", c.simulation.records},
              {"min_survivors", c.simulation.min_survivors},
              {"potentials", pots},
              {"extrapolation_ratio", c.simulation.extrapolation_ratio},
              {"fv_particles", c.simulation.fv_particles},
              {"fv_burn_in", c.simulation.fv_burn_in}};

  Json betas = Json::array();
  for (const auto& b : c.ldp.betas) {
    betas.push_back({{"tag", b.tag},
                     {"kind", b.kind},
                     {"weight", b.weight},
                     {"point", b.point},
                     {"terms", terms_json(b.terms)},
                     {"square", b.square},
                     {"gibbs", b.gibbs}});
  }
  Json ldp = {{"bound", c.ldp.bound},
              {"tol", c.ldp.tol},
              {"max_iterations", c.ldp.max_iterations},
              {"reversible", c.ldp.reversible},
              {"gateaux_pairs", c.ldp.gateaux_pairs},
              {"betas", betas}};

  Json checks = Json::array();
  for (const auto& k : c.checks) {
    checks.push_back({{"name", k.name},
                      {"metric", k.metric},
                      {"kind", k.kind},
                      {"expected", k.expected},
                      {"reference", k.reference},
                      {"tolerance", k.tolerance}});
  }

  return {{"schema", c.schema},     {"experiment", c.experiment},
          {"model", model},         {"solver", solver},
          {"simulation", sim},      {"ldp", ldp},
          {"rng", {{"master_seed", c.master_seed}}},
          {"threads", c.threads},   {"output_dir", c.output_dir},
          {"checks", checks}};
}

model::ScalarField make_field(const std::vector<model::FieldTerm>& terms) { return model::ScalarField(terms); }

model::ProcessSpec make_process(const ModelConfig& m) {
  const auto U = make_field(m.potential);
  if (m.process.type == "kinetic") return model::KineticLangevin{U, m.process.gamma};
  if (m.process.type == "stable") return model::StableSDE{U, m.process.alpha, m.process.c_alpha};
  return model::OverdampedLangevin{U, {}};
}

model::DomainSpec make_domain(const ModelConfig& m) {
  if (m.domain.region == "ball") {
    return model::DomainSpec(m.domain.box, model::OpenBall{m.domain.center, m.domain.radius});
  }
  return model::DomainSpec(m.domain.box, model::OpenBox{m.domain.sides.empty() ? m.domain.box : m.domain.sides});
}

}  // namespace qsd::cli
