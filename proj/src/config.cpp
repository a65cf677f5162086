#include "dwlab/config.hpp"

#include "dwlab/errors.hpp"
#include "dwlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace dwlab {

using Json = nlohmann::ordered_json;

namespace {

void only_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw InvalidArgument(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw InvalidArgument(where + ": unknown key '" + k + "'");
}

template <class T>
void read(const Json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(where + "." + key + ": wrong type");
  }
}

void read_opt(const Json& obj, const char* key, std::optional<double>& out, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  double v = 0.0;
  read(obj, key, v, where);
  out = v;
}

std::filesystem::path resolve(const ExperimentConfig& c, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || c.base_dir.empty() ? path : c.base_dir / path;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument("config: " + what);
}

}  // namespace

const std::vector<std::string>& pipeline_names() {
  static const std::vector<std::string> names{"simulate",       "gramian", "verify-forward", "verify-reverse",
                                              "lemma",          "nonlinear", "fit"};
  return names;
}

void ExperimentConfig::validate() const {
  const auto& names = pipeline_names();
  require(std::find(names.begin(), names.end(), pipeline) != names.end(), "unknown pipeline '" + pipeline + "'");
  require(n_modes >= 1, "n_modes must be >= 1");
  require(length > 0.0 && std::isfinite(length), "length must be positive");
  require(damping.kind == "constant" || damping.kind == "interval", "damping.kind must be constant or interval");
  require(damping.amplitude >= 0.0, "damping.amplitude must be >= 0");
  if (damping.kind == "interval")
    require(damping.alpha >= 0.0 && damping.alpha < damping.beta && damping.beta <= length,
            "damping.interval must satisfy 0 <= a < b <= length");
  require(g.kind == "power" || g.kind == "exp" || g.kind == "table", "g.kind must be power, exp or table");
  require(g.r0 > 0.0, "g.r0 must be positive");
  if (g.kind == "power") require(!(g.p >= -0.5 && g.p <= 0.0), "g.p in [-1/2, 0] is excluded");
  if (g.kind == "exp") require(g.p > 0.0, "g.p must be positive for the exp rate");
  if (g.kind == "table") require(!g.path.empty(), "g.path is required for a table rate");
  require(simulation.T > 0.0, "simulation.T must be positive");
  require(simulation.dt > 0.0 && simulation.dt <= simulation.T, "simulation.dt must satisfy 0 < dt <= T");
  require(simulation.stride >= 1, "simulation.stride must be >= 1");
  require(probes.count >= 1, "probes.count must be >= 1");
  require(observability.T > 0.0, "observability.T must be positive");
  if (observability.C) require(*observability.C > 0.0, "observability.C must be positive");
  require(fit.t_min > 0.0 && fit.t_min < fit.t_max, "fit window must satisfy 0 < t_min < t_max");
  require(fit.rate == "forward" || fit.rate == "reverse", "fit.rate must be forward or reverse");
  require(fit.norm == "vx" || fit.norm == "da_v", "fit.norm must be vx or da_v");
  require(lemma.c > 0.0, "lemma.c must be positive");
  require(lemma.t_min > 0.0 && lemma.t_min < lemma.t_max, "lemma horizon must satisfy 0 < t_min < t_max");
  require(lemma.points >= 2, "lemma.points must be >= 2");
  const auto& law = nonlinear.g.kind;
  require(law == "linear" || law == "cubic" || law == "table", "nonlinear.g.kind must be linear, cubic or table");
  if (law == "table") require(!nonlinear.g.path.empty(), "nonlinear.g.path is required for a table law");
  require(nonlinear.C > 0.0 && nonlinear.c0 > 0.0 && nonlinear.c_prime > 0.0,
          "nonlinear.C, c0 and c_prime must be positive");
  if (nonlinear.c) require(*nonlinear.c > 0.0, "nonlinear.c must be positive");
  if (pipeline == "fit") require(!trace.empty(), "the fit pipeline needs a trace path");
}

ExperimentConfig parse_config(const Json& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  c.base_dir = base_dir;
  only_keys(doc, "config",
            {"pipeline", "n_modes", "length", "damping", "g", "simulation", "probes", "observability", "fit",
             "lemma", "nonlinear", "seed", "trace", "output"});
  read(doc, "pipeline", c.pipeline, "config");
  read(doc, "n_modes", c.n_modes, "config");
  read(doc, "length", c.length, "config");
  read(doc, "seed", c.seed, "config");
  read(doc, "trace", c.trace, "config");
  read(doc, "output", c.out, "config");
  if (doc.contains("damping")) {
    const auto& d = doc.at("damping");
    only_keys(d, "damping", {"kind", "interval", "amplitude"});
    read(d, "kind", c.damping.kind, "damping");
    read(d, "amplitude", c.damping.amplitude, "damping");
    if (d.contains("interval")) {
      std::vector<double> iv;
      read(d, "interval", iv, "damping");
      require(iv.size() == 2, "damping.interval must have two entries");
      c.damping.alpha = iv[0];
      c.damping.beta = iv[1];
    }
  }
  if (doc.contains("g")) {
    const auto& g = doc.at("g");
    only_keys(g, "g", {"kind", "p", "r0", "path"});
    read(g, "kind", c.g.kind, "g");
    read(g, "p", c.g.p, "g");
    read(g, "r0", c.g.r0, "g");
    read(g, "path", c.g.path, "g");
  }
  if (doc.contains("simulation")) {
    const auto& s = doc.at("simulation");
    only_keys(s, "simulation", {"T", "dt", "stride", "log_per_decade"});
    read(s, "T", c.simulation.T, "simulation");
    read(s, "dt", c.simulation.dt, "simulation");
    read(s, "stride", c.simulation.stride, "simulation");
    read(s, "log_per_decade", c.simulation.log_per_decade, "simulation");
  }
  if (doc.contains("probes")) {
    only_keys(doc.at("probes"), "probes", {"count"});
    read(doc.at("probes"), "count", c.probes.count, "probes");
  }
  if (doc.contains("observability")) {
    const auto& o = doc.at("observability");
    only_keys(o, "observability", {"T", "C", "samples"});
    read(o, "T", c.observability.T, "observability");
    read_opt(o, "C", c.observability.C, "observability");
    read(o, "samples", c.observability.samples, "observability");
  }
  if (doc.contains("fit")) {
    const auto& f = doc.at("fit");
    only_keys(f, "fit", {"t_min", "t_max", "rate", "norm"});
    read(f, "t_min", c.fit.t_min, "fit");
    read(f, "t_max", c.fit.t_max, "fit");
    read(f, "rate", c.fit.rate, "fit");
    read(f, "norm", c.fit.norm, "fit");
  }
  if (doc.contains("lemma")) {
    const auto& l = doc.at("lemma");
    only_keys(l, "lemma", {"c", "t_min", "t_max", "points"});
    read(l, "c", c.lemma.c, "lemma");
    read(l, "t_min", c.lemma.t_min, "lemma");
    read(l, "t_max", c.lemma.t_max, "lemma");
    read(l, "points", c.lemma.points, "lemma");
  }
  if (doc.contains("nonlinear")) {
    const auto& n = doc.at("nonlinear");
    only_keys(n, "nonlinear", {"g", "C", "c0", "c_prime", "c", "t_min"});
    if (n.contains("g")) {
      only_keys(n.at("g"), "nonlinear.g", {"kind", "path"});
      read(n.at("g"), "kind", c.nonlinear.g.kind, "nonlinear.g");
      read(n.at("g"), "path", c.nonlinear.g.path, "nonlinear.g");
      if (c.nonlinear.g.kind == "custom-table") c.nonlinear.g.kind = "table";
    }
    read(n, "C", c.nonlinear.C, "nonlinear");
    read(n, "c0", c.nonlinear.c0, "nonlinear");
    read(n, "c_prime", c.nonlinear.c_prime, "nonlinear");
    read_opt(n, "c", c.nonlinear.c, "nonlinear");
    read(n, "t_min", c.nonlinear.t_min, "nonlinear");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return parse_config(doc, path.parent_path());
}

Json resolved_json(const ExperimentConfig& c) {
  Json damping{{"kind", c.damping.kind}, {"amplitude", c.damping.amplitude}};
  if (c.damping.kind == "interval") damping["interval"] = {c.damping.alpha, c.damping.beta};
  Json g{{"kind", c.g.kind}, {"p", c.g.p}, {"r0", c.g.r0}};
  if (c.g.kind == "table") g["path"] = c.g.path;
  Json law{{"kind", c.nonlinear.g.kind}};
  if (c.nonlinear.g.kind == "table") law["path"] = c.nonlinear.g.path;
  Json doc{{"pipeline", c.pipeline},
           {"n_modes", c.n_modes},
           {"length", c.length},
           {"damping", damping},
           {"g", g},
           {"simulation",
            {{"T", c.simulation.T},
             {"dt", c.simulation.dt},
             {"stride", c.simulation.stride},
             {"log_per_decade", c.simulation.log_per_decade}}},
           {"probes", {{"count", c.probes.count}}},
           {"observability",
            {{"T", c.observability.T},
             {"C", c.observability.C ? Json(*c.observability.C) : Json(nullptr)},
             {"samples", c.observability.samples}}},
           {"fit", {{"t_min", c.fit.t_min}, {"t_max", c.fit.t_max}, {"rate", c.fit.rate}, {"norm", c.fit.norm}}},
           {"lemma",
            {{"c", c.lemma.c}, {"t_min", c.lemma.t_min}, {"t_max", c.lemma.t_max}, {"points", c.lemma.points}}},
           {"nonlinear",
            {{"g", law},
             {"C", c.nonlinear.C},
             {"c0", c.nonlinear.c0},
             {"c_prime", c.nonlinear.c_prime},
             {"c", c.nonlinear.c ? Json(*c.nonlinear.c) : Json(nullptr)},
             {"t_min", c.nonlinear.t_min}}},
           {"seed", c.seed}};
  if (!c.trace.empty()) doc["trace"] = c.trace;
  doc["output"] = c.out;
  return doc;
}

SpectralOperator make_operator(const ExperimentConfig& c) { return build_dirichlet_operator(c.n_modes, c.length); }

DampingProfile make_profile(const ExperimentConfig& c) {
  if (c.damping.kind == "interval") return DampingProfile::interval(c.damping.alpha, c.damping.beta, c.damping.amplitude);
  return DampingProfile::constant(c.damping.amplitude);
}

RateFunction make_rate(const ExperimentConfig& c) {
  if (c.g.kind == "power") return preset_power(c.g.p, c.g.r0);
  if (c.g.kind == "exp") return preset_exp(c.g.p, c.g.r0);
  return tabulated_rate(io::pairs_from_csv(io::read_text(resolve(c, c.g.path))));
}

NonlinearDamping make_law(const ExperimentConfig& c) {
  const auto& kind = c.nonlinear.g.kind;
  if (kind == "linear") return validate_damping(linear_law());
  if (kind == "cubic") return validate_damping(cubic_law());
  return validate_damping(tabulated_law(io::pairs_from_csv(io::read_text(resolve(c, c.nonlinear.g.path)))));
}

std::vector<StatePair> make_probes(std::size_t n_modes, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<StatePair> states;
  states.reserve(count);
  const auto n = static_cast<Eigen::Index>(n_modes);
  for (std::size_t i = 0; i < count; ++i) {
    Vector w0(n);
    Vector w1(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double kk = static_cast<double>(k + 1);
      w0(k) = normal(rng) / (kk * kk);
      w1(k) = normal(rng) / kk;
    }
    states.emplace_back(std::move(w0), std::move(w1));
  }
  return states;
}

}  // namespace dwlab
