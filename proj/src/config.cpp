#include "gfzf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gfzf/errors.hpp"
#include "gfzf/initial_conditions.hpp"

namespace gfzf {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError("'" + std::string(where) + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
  }
}

double number(const json& v, std::string_view key) {
  if (!v.is_number()) throw ConfigError("'" + std::string(key) + "' must be a number");
  return v.get<double>();
}

double length(const json& v, std::string_view key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_length(v.get<std::string>());
    } catch (const InvalidArgument& e) {
      throw ConfigError("'" + std::string(key) + "': " + e.what());
    }
  }
  throw ConfigError("'" + std::string(key) + "' must be a number or a length string");
}

std::vector<double> number_list(const json& v, std::string_view key, bool lengths = false) {
  if (!v.is_array()) throw ConfigError("'" + std::string(key) + "' must be a list");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(lengths ? length(x, key) : number(x, key));
  return out;
}

FactorSpec parse_factor(const json& v, std::string_view key) {
  reject_unknown(v, key, {"kind", "k", "eta_init"});
  FactorSpec f;
  if (v.contains("kind")) {
    if (!v["kind"].is_string()) throw ConfigError("'" + std::string(key) + ".kind' must be a string");
    try {
      f.kind = parse_factor_kind(v["kind"].get<std::string>());
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string(key) + ".kind: " + e.what());
    }
  }
  if (v.contains("k")) f.k = number(v["k"], std::string(key) + ".k");
  if (v.contains("eta_init")) f.eta_init = number(v["eta_init"], std::string(key) + ".eta_init");
  try {
    f.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
  return f;
}

json factor_json(const FactorSpec& f) {
  return {{"kind", std::string(to_string(f.kind))}, {"k", f.k}, {"eta_init", f.eta_init}};
}

const std::set<std::string, std::less<>> kModelParams{"epsilon", "M", "beta", "C_sav", "terms"};

}  // namespace

double parse_length(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (c != ' ') s.push_back(c);
  }
  double scale = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    s.resize(s.size() - 2);
    if (!s.empty() && s.back() == '*') s.pop_back();
    if (s.empty() || s == "+") return scale;
    if (s == "-") return -scale;
  }
  double value = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidArgument("cannot parse length '" + std::string(text) + "'");
  }
  return value * scale;
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc, "config",
                 {"name", "model", "params", "scheme", "factor", "factor2", "bootstrap", "grid", "dt", "T", "ic",
                  "seed", "snapshot_times", "assertions", "dealias", "reference_dt", "dt_ladder", "schemes"});
  for (auto key : {"model", "grid", "dt", "T"}) {
    if (!doc.contains(key)) throw ConfigError(std::string("missing required key '") + key + "'");
  }

  RunConfig cfg;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ConfigError("'name' must be a string");
    cfg.name = doc["name"].get<std::string>();
  }
  if (!doc["model"].is_string()) throw ConfigError("'model' must be a string");
  cfg.model = doc["model"].get<std::string>();
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) throw ConfigError("'params' must be an object");
    for (const auto& [key, v] : doc["params"].items()) {
      if (!kModelParams.contains(key)) throw ConfigError("unknown key '" + key + "' in params");
      cfg.params[key] = number(v, "params." + key);
    }
  }
  cfg.params.try_emplace("C_sav", 1.0);

  if (doc.contains("scheme")) {
    if (!doc["scheme"].is_string()) throw ConfigError("'scheme' must be a string");
    try {
      cfg.scheme = parse_scheme(doc["scheme"].get<std::string>());
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("scheme: ") + e.what());
    }
  }
  if (doc.contains("factor")) cfg.factor = parse_factor(doc["factor"], "factor");
  cfg.factor2 = doc.contains("factor2") ? parse_factor(doc["factor2"], "factor2") : cfg.factor;
  if (doc.contains("bootstrap")) {
    if (doc["bootstrap"] != "rzf_cn") throw ConfigError("'bootstrap' supports only \"rzf_cn\"");
  }

  const json& grid = doc["grid"];
  reject_unknown(grid, "grid", {"dims", "extents", "origin"});
  if (!grid.contains("dims") || !grid.contains("extents")) throw ConfigError("grid needs 'dims' and 'extents'");
  for (double d : number_list(grid["dims"], "grid.dims")) {
    if (d != std::floor(d)) throw ConfigError("'grid.dims' must be integers");
    cfg.dims.push_back(static_cast<int>(d));
  }
  cfg.extents = number_list(grid["extents"], "grid.extents", true);
  if (grid.contains("origin")) {
    const auto o = number_list(grid["origin"], "grid.origin", true);
    if (o.size() != cfg.dims.size()) throw ConfigError("'grid.origin' needs one entry per axis");
    std::copy(o.begin(), o.end(), cfg.origin.begin());
  }
  try {
    (void)make_grid(cfg.dims, cfg.extents);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }

  cfg.dt = number(doc["dt"], "dt");
  cfg.T = number(doc["T"], "T");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("'dt' must be positive");
  if (!(cfg.T >= cfg.dt)) throw ConfigError("'T' must be at least dt");

  if (doc.contains("ic")) {
    const json& ic = doc["ic"];
    if (!ic.is_object() || !ic.contains("name") || !ic["name"].is_string()) {
      throw ConfigError("'ic' must be an object with a string 'name'");
    }
    cfg.ic.name = ic["name"].get<std::string>();
    std::vector<std::string_view> allowed;
    try {
      allowed = ic_parameters(cfg.ic.name);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("ic: ") + e.what());
    }
    for (const auto& [key, v] : ic.items()) {
      if (key == "name") continue;
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw ConfigError("unknown key '" + key + "' in ic");
      }
      cfg.ic.params[key] = number(v, "ic." + key);
    }
  } else {
    throw ConfigError("missing required key 'ic'");
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0)) {
      throw ConfigError("'seed' must be a non-negative integer");
    }
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("snapshot_times")) {
    cfg.snapshot_times = number_list(doc["snapshot_times"], "snapshot_times");
    for (double t : cfg.snapshot_times) {
      if (t < 0.0 || t > cfg.T) throw ConfigError("'snapshot_times' must lie in [0, T]");
    }
  }
  if (doc.contains("assertions")) {
    if (!doc["assertions"].is_boolean()) throw ConfigError("'assertions' must be true or false");
    cfg.assertions = doc["assertions"].get<bool>();
  }
  if (doc.contains("dealias")) {
    if (!doc["dealias"].is_boolean()) throw ConfigError("'dealias' must be true or false");
    cfg.dealias = doc["dealias"].get<bool>();
  }
  if (doc.contains("reference_dt")) {
    cfg.reference_dt = number(doc["reference_dt"], "reference_dt");
    if (!(*cfg.reference_dt > 0.0)) throw ConfigError("'reference_dt' must be positive");
  }
  if (doc.contains("dt_ladder")) {
    cfg.dt_ladder = number_list(doc["dt_ladder"], "dt_ladder");
    for (double d : cfg.dt_ladder) {
      if (!(d > 0.0)) throw ConfigError("'dt_ladder' entries must be positive");
    }
  }
  if (doc.contains("schemes")) {
    if (!doc["schemes"].is_array()) throw ConfigError("'schemes' must be a list");
    for (const auto& s : doc["schemes"]) {
      if (!s.is_string()) throw ConfigError("'schemes' entries must be strings");
      try {
        cfg.schemes.push_back(parse_scheme(s.get<std::string>()));
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("schemes: ") + e.what());
      }
    }
  }

  try {
    (void)model_of(cfg);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  if (cfg.scheme == SchemeKind::rmzf_cn && model_of(cfg).terms.size() != 2) {
    throw ConfigError("scheme rmzf_cn needs a two-term model (custom_split, or heat with terms = 2)");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& cfg, int indent) {
  json params = json::object();
  for (const auto& [k, v] : cfg.params) params[k] = v;
  json ic = {{"name", cfg.ic.name}};
  for (const auto& [k, v] : cfg.ic.params) ic[k] = v;
  json doc = {
      {"name", cfg.name},
      {"model", cfg.model},
      {"params", params},
      {"scheme", std::string(to_string(cfg.scheme))},
      {"factor", factor_json(cfg.factor)},
      {"factor2", factor_json(cfg.factor2)},
      {"bootstrap", cfg.bootstrap},
      {"grid",
       {{"dims", cfg.dims},
        {"extents", cfg.extents},
        {"origin", std::vector<double>(cfg.origin.begin(), cfg.origin.begin() + cfg.dims.size())}}},
      {"dt", cfg.dt},
      {"T", cfg.T},
      {"ic", ic},
      {"seed", cfg.seed},
      {"snapshot_times", cfg.snapshot_times},
      {"assertions", cfg.assertions},
      {"dealias", cfg.dealias},
      {"dt_ladder", cfg.dt_ladder},
  };
  if (cfg.reference_dt) doc["reference_dt"] = *cfg.reference_dt;
  if (!cfg.schemes.empty()) {
    json legs = json::array();
    for (auto s : cfg.schemes) legs.push_back(std::string(to_string(s)));
    doc["schemes"] = legs;
  }
  return doc.dump(indent);
}

GridSpec grid_of(const RunConfig& cfg) { return make_grid(cfg.dims, cfg.extents); }

ModelSpec model_of(const RunConfig& cfg) { return build_model(cfg.model, cfg.params, grid_of(cfg)); }

SchemeOptions options_of(const RunConfig& cfg) {
  SchemeOptions o;
  o.kind = cfg.scheme;
  o.factor = cfg.factor;
  o.factor2 = cfg.factor2;
  o.dealias = cfg.dealias;
  o.assertions = cfg.assertions;
  return o;
}

}  // namespace gfzf
