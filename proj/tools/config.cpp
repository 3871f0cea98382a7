#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "nullcone/errors.hpp"
#include "nullcone/random_field.hpp"
#include "nullcone/snapshot.hpp"

namespace nullcone::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where.empty() ? what : where + ": " + what);
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected a JSON object");
}

void require_known_keys(const json& j, const std::string& where,
                        const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

template <typename T>
T get_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<T>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

std::array<double, 3> get_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(where, "expected an array of 3 numbers");
  std::array<double, 3> v{};
  for (int i = 0; i < 3; ++i) v[i] = get_number(j[i], where);
  return v;
}

LorentzBoost parse_boost(const json& j, const std::string& where) {
  require_object(j, where);
  require_known_keys(j, where, {"direction", "rapidity"});
  if (!j.contains("direction") || !j.contains("rapidity")) {
    fail(where, "boost needs 'direction' and 'rapidity'");
  }
  try {
    return LorentzBoost::along(get_vec3(j["direction"], where + ".direction"),
                               get_number(j["rapidity"], where + ".rapidity"));
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

FlowScheme parse_scheme(const std::string& s, const std::string& where) {
  if (s == "rk4") return FlowScheme::Rk4Explicit;
  if (s == "imex") return FlowScheme::ImexSbdf2;
  fail(where, "unknown scheme '" + s + "' (expected rk4 or imex)");
}

const char* scheme_name(FlowScheme s) {
  return s == FlowScheme::Rk4Explicit ? "rk4" : "imex";
}

AncientKind parse_ancient_kind(const std::string& s, const std::string& where) {
  if (s == "shrinking-sphere") return AncientKind::ShrinkingSphere;
  if (s == "king-rosenau") return AncientKind::KingRosenau;
  fail(where, "unknown ancient kind '" + s + "' (expected shrinking-sphere or king-rosenau)");
}

const char* ancient_kind_name(AncientKind k) {
  return k == AncientKind::ShrinkingSphere ? "shrinking-sphere" : "king-rosenau";
}

}  // namespace

double ProfileSpec::eval(double r) const {
  double sum = 0.0;
  double p = std::pow(r, lowest_power);
  for (double c : coeffs) {
    sum += c * p;
    p *= r;
  }
  return sum;
}

void ProfileSpec::validate() const {
  if (coeffs.empty()) fail("model.coeffs", "class-s profile needs at least one coefficient");
  if (!(bracket_lo > 0.0) || !(bracket_hi > bracket_lo)) {
    fail("model.bracket", "class-s profile needs 0 < lo < hi");
  }
}

LightconeModel ModelSpec::build() const {
  if (kind == "de-sitter") return LightconeModel::de_sitter();
  if (kind == "minkowski") return LightconeModel::minkowski();
  if (kind == "anti-de-sitter") return LightconeModel::anti_de_sitter();
  if (kind == "class-s") {
    if (!profile) fail("model", "class-s model needs coeffs/lowest_power/bracket");
    profile->validate();
    const ProfileSpec p = *profile;
    return LightconeModel::generic([p](double r) { return p.eval(r); }, "class-s",
                                   p.bracket_lo, p.bracket_hi);
  }
  fail("model.kind", "unknown model '" + kind +
                         "' (expected de-sitter, minkowski, anti-de-sitter, or class-s)");
}

int InitialSpec::descriptor_count() const {
  return int(constant.has_value()) + int(stcmc.has_value()) + int(random.has_value()) +
         int(ancient.has_value()) + int(snapshot.has_value());
}

void InitialSpec::clear_descriptors() {
  constant.reset();
  stcmc.reset();
  random.reset();
  ancient.reset();
  snapshot.reset();
}

void InitialSpec::validate() const {
  const int n = descriptor_count();
  if (n != 1) {
    fail("initial", n == 0 ? "no initial-data descriptor (one of constant, stcmc, random, "
                             "ancient, snapshot is required)"
                           : "more than one initial-data descriptor");
  }
  if (snapshot && !std::filesystem::exists(*snapshot)) {
    fail("initial.snapshot", "file does not exist: " + *snapshot);
  }
  if (area && !(*area > 0.0)) fail("initial.area", "target area must be positive");
}

ConformalFactor InitialSpec::build(const Sht& sht) const {
  validate();
  ConformalFactor w = [&] {
    if (constant) return ConformalFactor::constant(sht.grid_ptr(), *constant);
    if (stcmc) return stcmc_factor(*stcmc, sht.grid_ptr());
    if (random) {
      return ConformalFactor::from_log(
          synthesize_random(sht, random->seed, random->lmax, random->amplitude));
    }
    if (ancient) {
      AncientSolution sol;
      sol.kind = ancient->kind;
      sol.t_hat_offset = ancient->t_hat_offset;
      sol.boost = ancient->boost;
      return nmcf_from_ancient(sht, sol, ancient->t);
    }
    return ConformalFactor::from_omega(read_snapshot(*snapshot));
  }();
  if (area) w = rescaled_to_area(w, *area);
  return w;
}

void RunConfig::validate() const {
  if (nlat < 8) fail("grid.nlat", "must be at least 8");
  if (nlon > 0 && nlon < 2 * nlat) fail("grid.nlon", "must be at least 2*nlat (or omitted)");
  initial.validate();
  (void)model.build();
  try {
    flow.validate();
  } catch (const Error& e) {
    fail("flow", e.what());
  }
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg;
  require_object(j, "config");
  require_known_keys(j, "config", {"model", "grid", "initial", "flow", "output"});

  if (j.contains("model")) {
    const auto& jm = j["model"];
    require_object(jm, "model");
    require_known_keys(jm, "model", {"kind", "coeffs", "lowest_power", "bracket"});
    if (jm.contains("kind")) cfg.model.kind = get_string(jm["kind"], "model.kind");
    if (cfg.model.kind == "class-s") {
      ProfileSpec p;
      if (!jm.contains("coeffs") || !jm.contains("bracket")) {
        fail("model", "class-s model needs 'coeffs' and 'bracket'");
      }
      if (!jm["coeffs"].is_array()) fail("model.coeffs", "expected an array of numbers");
      for (const auto& c : jm["coeffs"]) p.coeffs.push_back(get_number(c, "model.coeffs"));
      if (jm.contains("lowest_power")) {
        p.lowest_power = get_integer<int>(jm["lowest_power"], "model.lowest_power");
      }
      const auto& jb = jm["bracket"];
      if (!jb.is_array() || jb.size() != 2) fail("model.bracket", "expected [lo, hi]");
      p.bracket_lo = get_number(jb[0], "model.bracket");
      p.bracket_hi = get_number(jb[1], "model.bracket");
      cfg.model.profile = std::move(p);
    } else if (jm.contains("coeffs") || jm.contains("lowest_power") || jm.contains("bracket")) {
      fail("model", "coeffs/lowest_power/bracket only apply to kind 'class-s'");
    }
  }

  if (j.contains("grid")) {
    const auto& jg = j["grid"];
    require_object(jg, "grid");
    require_known_keys(jg, "grid", {"nlat", "nlon"});
    if (jg.contains("nlat")) cfg.nlat = get_integer<int>(jg["nlat"], "grid.nlat");
    if (jg.contains("nlon")) cfg.nlon = get_integer<int>(jg["nlon"], "grid.nlon");
  }

  if (j.contains("initial")) {
    const auto& ji = j["initial"];
    require_object(ji, "initial");
    require_known_keys(ji, "initial",
                       {"constant", "stcmc", "random", "ancient", "snapshot", "area"});
    if (ji.contains("constant")) cfg.initial.constant = get_number(ji["constant"], "initial.constant");
    if (ji.contains("stcmc")) {
      const auto& js = ji["stcmc"];
      require_object(js, "initial.stcmc");
      require_known_keys(js, "initial.stcmc", {"b", "a"});
      StcmcParams p;
      if (js.contains("b")) p.b = get_number(js["b"], "initial.stcmc.b");
      if (js.contains("a")) p.a = get_vec3(js["a"], "initial.stcmc.a");
      cfg.initial.stcmc = p;
    }
    if (ji.contains("random")) {
      const auto& jr = ji["random"];
      require_object(jr, "initial.random");
      require_known_keys(jr, "initial.random", {"seed", "lmax", "amplitude"});
      InitialSpec::Random r;
      if (jr.contains("seed")) {
        r.seed = get_integer<unsigned long long>(jr["seed"], "initial.random.seed");
      }
      if (jr.contains("lmax")) r.lmax = get_integer<int>(jr["lmax"], "initial.random.lmax");
      if (jr.contains("amplitude")) {
        r.amplitude = get_number(jr["amplitude"], "initial.random.amplitude");
      }
      cfg.initial.random = r;
    }
    if (ji.contains("ancient")) {
      const auto& ja = ji["ancient"];
      require_object(ja, "initial.ancient");
      require_known_keys(ja, "initial.ancient", {"kind", "t_hat_offset", "boost", "t"});
      InitialSpec::Ancient a;
      if (ja.contains("kind")) {
        a.kind = parse_ancient_kind(get_string(ja["kind"], "initial.ancient.kind"),
                                    "initial.ancient.kind");
      }
      if (ja.contains("t_hat_offset")) {
        a.t_hat_offset = get_number(ja["t_hat_offset"], "initial.ancient.t_hat_offset");
      }
      if (ja.contains("boost")) a.boost = parse_boost(ja["boost"], "initial.ancient.boost");
      if (ja.contains("t")) a.t = get_number(ja["t"], "initial.ancient.t");
      cfg.initial.ancient = a;
    }
    if (ji.contains("snapshot")) {
      cfg.initial.snapshot = get_string(ji["snapshot"], "initial.snapshot");
    }
    if (ji.contains("area")) cfg.initial.area = get_number(ji["area"], "initial.area");
  }

  if (j.contains("flow")) {
    const auto& jf = j["flow"];
    require_object(jf, "flow");
    require_known_keys(jf, "flow",
                       {"scheme", "dt_init", "cfl_safety", "t_end", "stop_area_floor",
                        "stop_area_ceiling", "roundness_tol", "mots_h2_tol", "record_every",
                        "area_rate_safety"});
    auto& f = cfg.flow;
    if (jf.contains("scheme")) {
      f.scheme = parse_scheme(get_string(jf["scheme"], "flow.scheme"), "flow.scheme");
    }
    if (jf.contains("dt_init")) f.dt_init = get_number(jf["dt_init"], "flow.dt_init");
    if (jf.contains("cfl_safety")) f.cfl_safety = get_number(jf["cfl_safety"], "flow.cfl_safety");
    if (jf.contains("t_end")) f.t_end = get_number(jf["t_end"], "flow.t_end");
    if (jf.contains("stop_area_floor")) {
      f.stop_area_floor = get_number(jf["stop_area_floor"], "flow.stop_area_floor");
    }
    if (jf.contains("stop_area_ceiling")) {
      f.stop_area_ceiling = get_number(jf["stop_area_ceiling"], "flow.stop_area_ceiling");
    }
    if (jf.contains("roundness_tol")) {
      f.roundness_tol = get_number(jf["roundness_tol"], "flow.roundness_tol");
    }
    if (jf.contains("mots_h2_tol")) {
      f.mots_h2_tol = get_number(jf["mots_h2_tol"], "flow.mots_h2_tol");
    }
    if (jf.contains("record_every")) {
      f.record_every = get_integer<int>(jf["record_every"], "flow.record_every");
    }
    if (jf.contains("area_rate_safety")) {
      f.area_rate_safety = get_number(jf["area_rate_safety"], "flow.area_rate_safety");
    }
  }

  if (j.contains("output")) {
    const auto& jo = j["output"];
    require_object(jo, "output");
    require_known_keys(jo, "output", {"dir"});
    if (jo.contains("dir")) cfg.out_dir = get_string(jo["dir"], "output.dir");
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("config", "cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail("config", std::string("invalid JSON in ") + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
  json j;
  j["model"]["kind"] = model.kind;
  if (model.profile) {
    j["model"]["coeffs"] = model.profile->coeffs;
    j["model"]["lowest_power"] = model.profile->lowest_power;
    j["model"]["bracket"] = {model.profile->bracket_lo, model.profile->bracket_hi};
  }
  j["grid"]["nlat"] = nlat;
  j["grid"]["nlon"] = resolved_nlon();
  json ji = json::object();
  if (initial.constant) ji["constant"] = *initial.constant;
  if (initial.stcmc) {
    ji["stcmc"]["b"] = initial.stcmc->b;
    ji["stcmc"]["a"] = initial.stcmc->a;
  }
  if (initial.random) {
    ji["random"]["seed"] = initial.random->seed;
    ji["random"]["lmax"] = initial.random->lmax;
    ji["random"]["amplitude"] = initial.random->amplitude;
  }
  if (initial.ancient) {
    ji["ancient"]["kind"] = ancient_kind_name(initial.ancient->kind);
    ji["ancient"]["t_hat_offset"] = initial.ancient->t_hat_offset;
    ji["ancient"]["t"] = initial.ancient->t;
    if (initial.ancient->boost) {
      ji["ancient"]["boost"]["direction"] = initial.ancient->boost->direction;
      ji["ancient"]["boost"]["rapidity"] = initial.ancient->boost->rapidity;
    }
  }
  if (initial.snapshot) ji["snapshot"] = *initial.snapshot;
  if (initial.area) ji["area"] = *initial.area;
  j["initial"] = std::move(ji);
  j["flow"]["scheme"] = scheme_name(flow.scheme);
  j["flow"]["dt_init"] = flow.dt_init;
  j["flow"]["cfl_safety"] = flow.cfl_safety;
  j["flow"]["t_end"] = flow.t_end;
  j["flow"]["stop_area_floor"] = flow.stop_area_floor;
  j["flow"]["stop_area_ceiling"] = flow.stop_area_ceiling;
  j["flow"]["roundness_tol"] = flow.roundness_tol;
  j["flow"]["mots_h2_tol"] = flow.mots_h2_tol;
  j["flow"]["record_every"] = flow.record_every;
  j["flow"]["area_rate_safety"] = flow.area_rate_safety;
  j["output"]["dir"] = out_dir;
  return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::string_view bytes) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

const char* tool_version() { return NULLCONE_VERSION; }

}  // namespace nullcone::cli
