#include "levyflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "levyflow/errors.hpp"
#include "levyflow/random.hpp"
#include "levyflow/serialize.hpp"

namespace levyflow {

namespace {

using nlohmann::json;

json curve_json(const CurveSpec& c) {
  return {{"kind", c.kind},     {"seed", c.seed},     {"modes", c.modes},
          {"amplitude", c.amplitude}, {"count", c.count}, {"from", c.from},
          {"to", c.to},         {"center", c.center}, {"radius", c.radius},
          {"turns", c.turns}};
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Overlays `user` on `base`, rejecting keys the base does not know.
void merge(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError("config: '" + path + "' must be an object");
  for (const auto& [key, value] : user.items()) {
    if (!base.contains(key)) throw ConfigError("config: unknown key '" + join(path, key) + "'");
    json& slot = base[key];
    if (slot.is_object()) {
      merge(slot, value, join(path, key));
    } else if (key == "curves" && path.empty()) {
      if (!value.is_array()) throw ConfigError("config: 'curves' must be an array");
      json curves = json::array();
      for (std::size_t i = 0; i < value.size(); ++i) {
        json c = curve_json(CurveSpec{});
        merge(c, value[i], "curves." + std::to_string(i));
        curves.push_back(std::move(c));
      }
      slot = std::move(curves);
    } else {
      slot = value;
    }
  }
}

template <typename T>
T get(const json& doc, const std::string& path, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: bad value for '" + join(path, key) + "'");
  }
}

double positive(const json& doc, const std::string& path, const char* key) {
  const auto v = get<double>(doc, path, key);
  if (!(v > 0.0)) throw ConfigError("config: '" + join(path, key) + "' must be positive");
  return v;
}

int at_least(const json& doc, const std::string& path, const char* key, int lo) {
  const auto v = get<int>(doc, path, key);
  if (v < lo) {
    throw ConfigError("config: '" + join(path, key) + "' must be >= " + std::to_string(lo));
  }
  return v;
}

std::uint64_t seed_of(const json& doc, const std::string& path, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError("config: '" + join(path, key) + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

Point point_of(const std::vector<double>& v, int dim, const std::string& what) {
  if (static_cast<int>(v.size()) != dim) {
    throw ConfigError("config: '" + what + "' needs " + std::to_string(dim) + " coordinates");
  }
  Point p{};
  std::copy(v.begin(), v.end(), p.begin());
  return p;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

json default_config_json() {
  const ExperimentConfig d = default_config();
  return to_json(d);
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  CurveSpec c;
  c.count = 10;
  cfg.curves.push_back(c);
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json curves = json::array();
  for (const auto& c : cfg.curves) curves.push_back(curve_json(c));
  const Tolerances& t = cfg.tolerances;
  return {
      {"schema", cfg.schema},
      {"seed", cfg.seed},
      {"torus", {{"dim", cfg.dim}, {"length", cfg.length}}},
      {"rank", cfg.rank},
      {"field",
       {{"kind", cfg.field.kind},
        {"seed", cfg.field.seed},
        {"modes", cfg.field.modes},
        {"amplitude", cfg.field.amplitude},
        {"max_k", cfg.field.max_k},
        {"path", cfg.field.path}}},
      {"curves", curves},
      {"transport", {{"step", cfg.transport.step}, {"panels", cfg.transport.panels}}},
      {"levy", {{"cesaro_n", cfg.levy.cesaro_n}, {"fd_eps", cfg.levy.fd_eps}}},
      {"flow",
       {{"grid", cfg.flow.grid},
        {"ds", cfg.flow.ds},
        {"total", cfg.flow.total},
        {"save_every", cfg.flow.save_every},
        {"fd_spacing", cfg.flow.fd_spacing},
        {"checkpoints", cfg.flow.checkpoints},
        {"seed", cfg.flow.seed},
        {"amplitude", cfg.flow.amplitude},
        {"modes", cfg.flow.modes},
        {"max_k", cfg.flow.max_k},
        {"abelian_grid", cfg.flow.abelian_grid},
        {"abelian_total", cfg.flow.abelian_total}}},
      {"tolerances",
       {{"unitarity", t.unitarity},
        {"group_law", t.group_law},
        {"reparametrization", t.reparametrization},
        {"duhamel", t.duhamel},
        {"first_derivative", t.first_derivative},
        {"gradient", t.gradient},
        {"kernel_form", t.kernel_form},
        {"kernel_symmetry", t.kernel_symmetry},
        {"laplacian_routes", t.laplacian_routes},
        {"cesaro", t.cesaro},
        {"cesaro_slope", t.cesaro_slope},
        {"cesaro_coefficient", t.cesaro_coefficient},
        {"functional", t.functional},
        {"functional_cesaro", t.functional_cesaro},
        {"functional_heat", t.functional_heat},
        {"flow_action", t.flow_action},
        {"flow_oracle", t.flow_oracle},
        {"order_factor", t.order_factor},
        {"critical", t.critical},
        {"theorem_formula", t.theorem_formula},
        {"theorem_fd", t.theorem_fd},
        {"theorem_abelian", t.theorem_abelian},
        {"r_exact", t.r_exact},
        {"r_localization", t.r_localization}}},
      {"checks", cfg.checks},
      {"threads", cfg.threads}};
}

ExperimentConfig parse_config(const json& user) {
  if (!user.is_object()) throw ConfigError("config: document must be a JSON object");
  if (!user.contains("schema")) throw ConfigError("config: missing 'schema'");
  if (!user.at("schema").is_number_integer() || user.at("schema").get<int>() != kSchemaVersion) {
    throw ConfigError("config: unsupported schema (expected " + std::to_string(kSchemaVersion) +
                      ")");
  }
  json doc = default_config_json();
  merge(doc, user, "");

  ExperimentConfig cfg;
  cfg.seed = seed_of(doc, "", "seed");
  const json& torus = doc.at("torus");
  cfg.dim = get<int>(torus, "torus", "dim");
  if (cfg.dim != 2 && cfg.dim != 3) throw ConfigError("config: 'torus.dim' must be 2 or 3");
  cfg.length = positive(torus, "torus", "length");
  cfg.rank = get<int>(doc, "", "rank");
  if (cfg.rank < 1 || cfg.rank > kMaxRank) {
    throw ConfigError("config: 'rank' must be in [1, " + std::to_string(kMaxRank) + "]");
  }

  const json& field = doc.at("field");
  cfg.field.kind = get<std::string>(field, "field", "kind");
  if (cfg.field.kind != "random_su2" && cfg.field.kind != "zero" && cfg.field.kind != "file") {
    throw ConfigError("config: 'field.kind' must be random_su2, zero or file");
  }
  if (cfg.field.kind == "random_su2" && cfg.rank != 2) {
    throw ConfigError("config: random_su2 fields need rank 2");
  }
  cfg.field.seed = seed_of(field, "field", "seed");
  cfg.field.modes = at_least(field, "field", "modes", 0);
  cfg.field.amplitude = get<double>(field, "field", "amplitude");
  cfg.field.max_k = at_least(field, "field", "max_k", 1);
  cfg.field.path = get<std::string>(field, "field", "path");
  if (cfg.field.kind == "file" && cfg.field.path.empty()) {
    throw ConfigError("config: 'field.path' required for file fields");
  }

  const json& curves = doc.at("curves");
  if (!curves.is_array() || curves.empty()) {
    throw ConfigError("config: 'curves' must be a non-empty array");
  }
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const json& c = curves[i];
    const std::string path = "curves." + std::to_string(i);
    CurveSpec spec;
    spec.kind = get<std::string>(c, path, "kind");
    if (spec.kind != "fourier" && spec.kind != "line" && spec.kind != "circle") {
      throw ConfigError("config: '" + path + ".kind' must be fourier, line or circle");
    }
    spec.seed = seed_of(c, path, "seed");
    spec.modes = at_least(c, path, "modes", 0);
    spec.amplitude = get<double>(c, path, "amplitude");
    spec.count = at_least(c, path, "count", 1);
    spec.from = get<std::vector<double>>(c, path, "from");
    spec.to = get<std::vector<double>>(c, path, "to");
    spec.center = get<std::vector<double>>(c, path, "center");
    spec.radius = positive(c, path, "radius");
    spec.turns = get<double>(c, path, "turns");
    if (spec.kind == "line") {
      point_of(spec.from, cfg.dim, path + ".from");
      point_of(spec.to, cfg.dim, path + ".to");
    }
    if (spec.kind == "circle") point_of(spec.center, cfg.dim, path + ".center");
    cfg.curves.push_back(std::move(spec));
  }

  const json& tr = doc.at("transport");
  cfg.transport.step = positive(tr, "transport", "step");
  cfg.transport.panels = at_least(tr, "transport", "panels", 1);

  const json& levy = doc.at("levy");
  cfg.levy.cesaro_n = get<std::vector<int>>(levy, "levy", "cesaro_n");
  if (cfg.levy.cesaro_n.empty() ||
      !std::is_sorted(cfg.levy.cesaro_n.begin(), cfg.levy.cesaro_n.end()) ||
      cfg.levy.cesaro_n.front() < 1) {
    throw ConfigError("config: 'levy.cesaro_n' must be ascending positive integers");
  }
  cfg.levy.fd_eps = positive(levy, "levy", "fd_eps");

  const json& fl = doc.at("flow");
  cfg.flow.grid = at_least(fl, "flow", "grid", 5);
  cfg.flow.ds = positive(fl, "flow", "ds");
  cfg.flow.total = positive(fl, "flow", "total");
  cfg.flow.save_every = at_least(fl, "flow", "save_every", 1);
  cfg.flow.fd_spacing = at_least(fl, "flow", "fd_spacing", 1);
  cfg.flow.checkpoints = get<std::vector<double>>(fl, "flow", "checkpoints");
  cfg.flow.seed = seed_of(fl, "flow", "seed");
  cfg.flow.amplitude = get<double>(fl, "flow", "amplitude");
  cfg.flow.modes = at_least(fl, "flow", "modes", 0);
  cfg.flow.max_k = at_least(fl, "flow", "max_k", 1);
  cfg.flow.abelian_grid = at_least(fl, "flow", "abelian_grid", 5);
  cfg.flow.abelian_total = positive(fl, "flow", "abelian_total");

  const json& tol = doc.at("tolerances");
  Tolerances& t = cfg.tolerances;
  const std::pair<const char*, double*> entries[] = {
      {"unitarity", &t.unitarity},
      {"group_law", &t.group_law},
      {"reparametrization", &t.reparametrization},
      {"duhamel", &t.duhamel},
      {"first_derivative", &t.first_derivative},
      {"gradient", &t.gradient},
      {"kernel_form", &t.kernel_form},
      {"kernel_symmetry", &t.kernel_symmetry},
      {"laplacian_routes", &t.laplacian_routes},
      {"cesaro", &t.cesaro},
      {"cesaro_slope", &t.cesaro_slope},
      {"cesaro_coefficient", &t.cesaro_coefficient},
      {"functional", &t.functional},
      {"functional_cesaro", &t.functional_cesaro},
      {"functional_heat", &t.functional_heat},
      {"flow_action", &t.flow_action},
      {"flow_oracle", &t.flow_oracle},
      {"order_factor", &t.order_factor},
      {"critical", &t.critical},
      {"theorem_formula", &t.theorem_formula},
      {"theorem_fd", &t.theorem_fd},
      {"theorem_abelian", &t.theorem_abelian},
      {"r_exact", &t.r_exact},
      {"r_localization", &t.r_localization}};
  for (const auto& [key, slot] : entries) *slot = positive(tol, "tolerances", key);

  cfg.checks = at_least(doc, "", "checks", 1);
  cfg.threads = at_least(doc, "", "threads", 1);
  return cfg;
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' must look like key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json* slot = &doc;
  std::string path;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    path = join(path, part);
    if (slot->is_array()) {
      std::size_t index = 0;
      const auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), index);
      if (ec != std::errc() || p != part.data() + part.size() || index >= slot->size()) {
        throw ConfigError("override: bad array index in '" + path + "'");
      }
      slot = &(*slot)[index];
    } else if (slot->is_object()) {
      if (!slot->contains(part)) throw ConfigError("override: unknown key '" + path + "'");
      slot = &(*slot)[part];
    } else {
      throw ConfigError("override: '" + path + "' is not inside an object or array");
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  *slot = std::move(value);
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::vector<std::string>& overrides) {
  json user;
  if (path) {
    try {
      user = json::parse(read_file(*path));
    } catch (const json::parse_error& e) {
      throw ConfigError("config: " + path->string() + ": " + e.what());
    }
  } else {
    user = {{"schema", kSchemaVersion}};
  }
  if (!user.is_object()) throw ConfigError("config: document must be a JSON object");
  if (!overrides.empty()) {
    // Overrides land on the complete document so every key path exists.
    if (!user.contains("schema")) throw ConfigError("config: missing 'schema'");
    json doc = default_config_json();
    merge(doc, user, "");
    for (const auto& o : overrides) apply_override(doc, o);
    return parse_config(doc);
  }
  return parse_config(user);
}

Torus make_torus(const ExperimentConfig& cfg) { return {cfg.dim, cfg.length}; }

GaugeField make_field(const ExperimentConfig& cfg) {
  const Torus torus = make_torus(cfg);
  if (cfg.field.kind == "zero") return AnalyticField::zero(torus, cfg.rank);
  if (cfg.field.kind == "file") {
    GaugeField f = load_field(cfg.field.path);
    if (!(f.torus() == torus) || f.rank() != cfg.rank) {
      throw ConfigError("config: field file does not match torus/rank");
    }
    return f;
  }
  return random_su2_field(torus, cfg.field.modes, cfg.field.amplitude, cfg.field.max_k,
                          derive_seed(cfg.seed, "field", cfg.field.seed));
}

std::vector<Curve> make_curves(const ExperimentConfig& cfg) {
  const Torus torus = make_torus(cfg);
  std::vector<Curve> out;
  for (std::size_t i = 0; i < cfg.curves.size(); ++i) {
    const CurveSpec& c = cfg.curves[i];
    const std::string path = "curves." + std::to_string(i);
    if (c.kind == "fourier") {
      for (int j = 0; j < c.count; ++j) {
        out.push_back(fourier_curve(torus, c.modes, c.amplitude,
                                    derive_seed(cfg.seed, "curve", c.seed + j)));
      }
    } else if (c.kind == "line") {
      for (int j = 0; j < c.count; ++j) {
        out.push_back(straight_line(cfg.dim, point_of(c.from, cfg.dim, path + ".from"),
                                    point_of(c.to, cfg.dim, path + ".to")));
      }
    } else {
      for (int j = 0; j < c.count; ++j) {
        out.push_back(circle(cfg.dim, point_of(c.center, cfg.dim, path + ".center"), c.radius,
                             c.turns));
      }
    }
  }
  return out;
}

GaugeField make_flow_initial(const ExperimentConfig& cfg) {
  const Torus torus = make_torus(cfg);
  if (cfg.rank != 2) throw ConfigError("config: flow initial data needs rank 2");
  const AnalyticField a0 = random_su2_field(torus, cfg.flow.modes, cfg.flow.amplitude,
                                            cfg.flow.max_k,
                                            derive_seed(cfg.seed, "flow", cfg.flow.seed));
  return sample_lattice(a0, cfg.flow.grid);
}

}  // namespace levyflow
