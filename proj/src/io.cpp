#include "sheq/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "sheq/errors.hpp"

namespace sheq::io {

namespace {

void only(const Json& j, const char* where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw InvalidArgument(std::string(where) + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : keys) ok = ok || it.key() == k;
    if (!ok) throw InvalidArgument("unknown field '" + it.key() + "' in " + where);
  }
}

double get(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  if (!v.is_number()) throw InvalidArgument(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double need(const Json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw InvalidArgument(std::string("missing field '") + key + "' in " + where);
  return get(j, key, 0.0);
}

std::vector<double> vec(const Json& j, const char* key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<std::vector<double>>();
}

std::optional<double> opt(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get(j, key, 0.0);
}

std::optional<std::pair<double, double>> pair_of(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 2) throw InvalidArgument(std::string("field '") + key + "' must be [a, k]");
  return std::make_pair(v[0], v[1]);
}

Json exponent_json(const CharExponent& e) {
  Json j;
  j["family"] = e.family_name();
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, IsotropicStable> || std::is_same_v<T, CoordinateStable>) {
          j["index"] = f.index;
          j["scale"] = f.scale;
        } else if constexpr (std::is_same_v<T, SubordinatedBrownian>) {
          j["p"] = f.spec.p;
          j["q_log"] = f.spec.q_log;
        } else {
          j["radius"] = f.radius;
          j["value"] = f.value;
        }
      },
      e.family());
  return j;
}

CharExponent exponent_from(const Json& j, int d) {
  if (!j.is_object() || !j.contains("family")) throw InvalidArgument("exponent needs a family");
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "isotropic_stable" || fam == "coordinate_stable") {
    only(j, "exponent", {"family", "index", "scale"});
    const double idx = get(j, "index", 2.0), sc = get(j, "scale", 1.0);
    if (fam == "isotropic_stable") return CharExponent(IsotropicStable{idx, sc}, d);
    return CharExponent(CoordinateStable{idx, sc}, d);
  }
  if (fam == "subordinated_brownian") {
    only(j, "exponent", {"family", "p", "q_log"});
    return CharExponent(SubordinatedBrownian{{get(j, "p", 0.5), get(j, "q_log", 0.0)}}, d);
  }
  if (fam == "table") {
    only(j, "exponent", {"family", "radius", "value"});
    return CharExponent(TableDriven{vec(j, "radius"), vec(j, "value")}, d);
  }
  throw InvalidArgument("unknown exponent family '" + fam + "'");
}

Json kernel_json(const CorrelationKernel& k) {
  Json j;
  j["family"] = k.family_name();
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Riesz>) {
          j["b"] = f.b;
          j["c"] = f.c;
        } else if constexpr (std::is_same_v<T, OrnsteinUhlenbeck>) {
          j["c1"] = f.c1;
          j["c2"] = f.c2;
          j["alpha"] = f.alpha;
        } else if constexpr (std::is_same_v<T, Poisson> || std::is_same_v<T, Cauchy>) {
          j["c1"] = f.c1;
          j["c2"] = f.c2;
        } else if constexpr (std::is_same_v<T, LogCorrected>) {
          j["a"] = f.a;
          j["b_log"] = f.b_log;
        } else {
          throw Unsupported("custom spectral kernels cannot be serialised");
        }
      },
      k.family());
  return j;
}

CorrelationKernel kernel_from(const Json& j, int d) {
  if (!j.is_object() || !j.contains("family")) throw InvalidArgument("kernel needs a family");
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "riesz") {
    only(j, "kernel", {"family", "b", "c"});
    return CorrelationKernel(Riesz{need(j, "b", "kernel"), get(j, "c", 1.0)}, d);
  }
  if (fam == "ornstein_uhlenbeck") {
    only(j, "kernel", {"family", "c1", "c2", "alpha"});
    return CorrelationKernel(OrnsteinUhlenbeck{get(j, "c1", 1.0), get(j, "c2", 1.0), get(j, "alpha", 2.0)}, d);
  }
  if (fam == "poisson" || fam == "cauchy") {
    only(j, "kernel", {"family", "c1", "c2"});
    if (fam == "poisson") return CorrelationKernel(Poisson{get(j, "c1", 1.0), get(j, "c2", 1.0)}, d);
    return CorrelationKernel(Cauchy{get(j, "c1", 1.0), get(j, "c2", 1.0)}, d);
  }
  if (fam == "log_corrected") {
    only(j, "kernel", {"family", "a", "b_log"});
    return CorrelationKernel(LogCorrected{get(j, "a", 1.0), get(j, "b_log", 0.0)}, d);
  }
  throw InvalidArgument("unknown kernel family '" + fam + "'");
}

Json measure_json(const MeasureSpec& mu) {
  Json atoms = Json::array(), gs = Json::array();
  for (const auto& a : mu.atoms) atoms.push_back({{"weight", a.weight}, {"at", a.at}});
  for (const auto& g : mu.gaussians) gs.push_back({{"weight", g.weight}, {"mean", g.mean}, {"s", g.s}});
  return {{"atoms", atoms}, {"gaussians", gs}};
}

}  // namespace

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

Json to_json(const ModelSpec& m) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["d"] = m.d;
  j["exponent"] = exponent_json(m.exponent);
  j["kernel"] = kernel_json(m.kernel);
  Json s;
  s["lip_sigma"] = m.sigma.lip_sigma;
  s["lower_linear"] = m.sigma.lower_linear;
  s["sigma0"] = m.sigma.sigma0;
  if (m.sigma.q_inf) s["q_inf"] = *m.sigma.q_inf;
  if (m.sigma.linear_kappa) s["linear_kappa"] = *m.sigma.linear_kappa;
  if (m.sigma.affine) s["affine"] = {m.sigma.affine->first, m.sigma.affine->second};
  j["sigma"] = s;
  Json b;
  b["lip_b"] = m.drift.lip_b;
  b["b0"] = m.drift.b0;
  if (m.drift.mass_lambda) b["mass_lambda"] = *m.drift.mass_lambda;
  if (m.drift.affine) b["affine"] = {m.drift.affine->first, m.drift.affine->second};
  j["drift"] = b;
  Json u;
  u["kind"] = to_string(m.initial.kind);
  switch (m.initial.kind) {
    case InitialData::Kind::Bounded:
      u["inf"] = m.initial.inf;
      u["sup"] = m.initial.sup;
      break;
    case InitialData::Kind::Delta:
      u["at"] = m.initial.at;
      break;
    case InitialData::Kind::Measure:
      u["measure"] = measure_json(m.initial.measure);
      break;
  }
  j["initial"] = u;
  return j;
}

ModelSpec model_from_json(const Json& j) {
  only(j, "model", {"schema_version", "d", "exponent", "kernel", "sigma", "drift", "initial"});
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kSchemaVersion)
    throw InvalidArgument("schema_version must be " + std::to_string(kSchemaVersion));
  if (!j.contains("d")) throw InvalidArgument("missing field 'd' in model");
  const int d = j.at("d").get<int>();
  if (!j.contains("exponent") || !j.contains("kernel")) throw InvalidArgument("model needs exponent and kernel");
  SigmaSpec sigma;
  if (j.contains("sigma")) {
    const Json& s = j.at("sigma");
    only(s, "sigma", {"lip_sigma", "lower_linear", "sigma0", "q_inf", "linear_kappa", "affine", "pam", "constant"});
    if (s.contains("pam")) {
      if (s.size() != 1) throw InvalidArgument("sigma.pam excludes other sigma fields");
      sigma = SigmaSpec::pam(get(s, "pam", 0.0));
    } else if (s.contains("constant")) {
      if (s.size() != 1) throw InvalidArgument("sigma.constant excludes other sigma fields");
      sigma = SigmaSpec::constant(get(s, "constant", 0.0));
    } else {
      sigma.lip_sigma = get(s, "lip_sigma", 0.0);
      sigma.lower_linear = get(s, "lower_linear", 0.0);
      sigma.sigma0 = get(s, "sigma0", 0.0);
      sigma.q_inf = opt(s, "q_inf");
      sigma.linear_kappa = opt(s, "linear_kappa");
      sigma.affine = pair_of(s, "affine");
    }
  }
  DriftSpec drift;
  if (j.contains("drift")) {
    const Json& b = j.at("drift");
    only(b, "drift", {"lip_b", "b0", "mass_lambda", "affine", "mass"});
    if (b.contains("mass")) {
      if (b.size() != 1) throw InvalidArgument("drift.mass excludes other drift fields");
      drift = DriftSpec::mass(get(b, "mass", 0.0));
    } else {
      drift.lip_b = get(b, "lip_b", 0.0);
      drift.b0 = get(b, "b0", 0.0);
      drift.mass_lambda = opt(b, "mass_lambda");
      drift.affine = pair_of(b, "affine");
    }
  }
  InitialData u0;
  if (j.contains("initial")) {
    const Json& u = j.at("initial");
    only(u, "initial", {"kind", "inf", "sup", "at", "measure"});
    const std::string kind = u.value("kind", std::string("bounded"));
    if (kind == "bounded") {
      u0 = InitialData::bounded(get(u, "inf", 1.0), get(u, "sup", get(u, "inf", 1.0)));
    } else if (kind == "delta") {
      u0 = InitialData::delta(u.contains("at") ? vec(u, "at") : std::vector<double>(d, 0.0));
    } else if (kind == "measure") {
      u0.kind = InitialData::Kind::Measure;
      const Json& mj = u.at("measure");
      only(mj, "measure", {"atoms", "gaussians"});
      if (mj.contains("atoms"))
        for (const auto& a : mj.at("atoms")) {
          only(a, "atom", {"weight", "at"});
          u0.measure.atoms.push_back({need(a, "weight", "atom"), vec(a, "at")});
        }
      if (mj.contains("gaussians"))
        for (const auto& g : mj.at("gaussians")) {
          only(g, "gaussian", {"weight", "mean", "s"});
          u0.measure.gaussians.push_back({need(g, "weight", "gaussian"), vec(g, "mean"), need(g, "s", "gaussian")});
        }
    } else {
      throw InvalidArgument("unknown initial kind '" + kind + "'");
    }
  }
  ModelSpec m(exponent_from(j.at("exponent"), d), kernel_from(j.at("kernel"), d), sigma, drift, u0);
  m.validate();
  return m;
}

ModelSpec load_model(const std::filesystem::path& p) {
  Json j;
  try {
    j = Json::parse(read_file(p));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("cannot parse " + p.string() + ": " + e.what());
  }
  return model_from_json(j);
}

Json to_json(const LatticeSpec& s) {
  return {{"d", s.d}, {"n", s.n}, {"L", s.L}, {"dt", s.dt}, {"T", s.T}, {"replicas", s.replicas}, {"seed", s.seed}};
}

LatticeSpec lattice_from_json(const Json& j) {
  only(j, "lattice", {"d", "n", "L", "dt", "T", "replicas", "seed"});
  LatticeSpec s;
  s.d = j.value("d", s.d);
  s.n = j.value("n", s.n);
  s.L = j.value("L", s.L);
  s.dt = j.value("dt", s.dt);
  s.T = j.value("T", s.T);
  s.replicas = j.value("replicas", s.replicas);
  s.seed = j.value("seed", s.seed);
  s.validate();
  return s;
}

Json to_json(const BoundResult& b) {
  Json j;
  if (std::isfinite(b.value))
    j["value"] = b.value;
  else
    j["value"] = num(b.value);
  j["status"] = to_string(b.status);
  if (!b.note.empty()) j["note"] = b.note;
  return j;
}

Json to_json(const LyapunovReport& r) {
  return {{"p", r.p},
          {"upper", to_json(r.upper)},
          {"lower2", to_json(r.lower2)},
          {"verdict", to_string(r.verdict)},
          {"theorem_refs", r.theorem_refs}};
}

std::string config_hash(const ModelSpec& m, const LatticeSpec& s) {
  std::string text;
  try {
    text = to_json(m).dump();
  } catch (const Unsupported&) {
    text = m.exponent.family_name() + "/" + m.kernel.family_name();
  }
  text += to_json(s).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + p.string());
  out << text;
}

}  // namespace sheq::io
