#include "sheq/cli.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "sheq/bounds.hpp"
#include "sheq/errors.hpp"
#include "sheq/io.hpp"
#include "sheq/parallel.hpp"
#include "sheq/potential.hpp"
#include "sheq/regularity.hpp"

namespace sheq::cli {

namespace {

using io::Json;
using io::num;

// true / false, or the string "indeterminate".
Json decision_json(Decision d) {
  if (d == Decision::Indeterminate) return to_string(d);
  return d == Decision::Yes;
}

ModelSpec require_model(const RunConfig& c) {
  if (!c.model_path) throw UsageError("--model is required for '" + c.command + "'");
  try {
    return io::load_model(*c.model_path);
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("bad model file: ") + e.what());
  }
}

std::vector<std::pair<std::string, ModelSpec>> variants(const RunConfig& c, const ModelSpec& m) {
  std::vector<std::pair<std::string, ModelSpec>> out;
  if (!c.sweep) {
    out.emplace_back("", m);
    return out;
  }
  for (double v : c.sweep->values) out.emplace_back(c.sweep->path + "=" + num(v), apply_sweep(m, c.sweep->path, v));
  return out;
}

std::filesystem::path dir_for(const RunConfig& c, const std::string& tag) {
  return tag.empty() ? c.out : c.out / tag;
}

}  // namespace

std::vector<double> parse_log_grid(const std::string& spec) {
  double lo = 0, hi = 0;
  long n = -1;
  char c1 = 0, c2 = 0;
  std::istringstream is(spec);
  is.imbue(std::locale::classic());
  if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':')
    throw UsageError("grid must be min:max:n, got '" + spec + "'");
  if (n <= 0) throw UsageError("grid '" + spec + "' is empty");
  if (!(lo > 0.0) || !(hi >= lo)) throw UsageError("grid needs 0 < min <= max");
  std::vector<double> g;
  for (long i = 0; i < n; ++i)
    g.push_back(n == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * double(i) / double(n - 1)));
  return g;
}

Sweep parse_sweep(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("sweep must be param=v1,v2,...");
  Sweep s;
  s.path = spec.substr(0, eq);
  std::istringstream is(spec.substr(eq + 1));
  is.imbue(std::locale::classic());
  std::string tok;
  while (std::getline(is, tok, ',')) {
    std::istringstream ts(tok);
    ts.imbue(std::locale::classic());
    double v;
    if (!(ts >> v)) throw UsageError("bad sweep value '" + tok + "'");
    s.values.push_back(v);
  }
  if (s.values.empty()) throw UsageError("sweep has no values");
  return s;
}

ModelSpec apply_sweep(const ModelSpec& m, const std::string& path, double value) {
  Json j = io::to_json(m);
  const auto dot = path.find('.');
  if (dot == std::string::npos) throw UsageError("sweep path must be section.field, got '" + path + "'");
  const std::string sec = path.substr(0, dot), key = path.substr(dot + 1);
  if (!j.contains(sec) || !j.at(sec).is_object()) throw UsageError("unknown sweep section '" + sec + "'");
  if (sec == "drift" && key == "mass_lambda") {
    j["drift"]["mass_lambda"] = value;
    j["drift"]["lip_b"] = 0.5 * std::abs(value);
  } else if (sec == "sigma" && key == "linear_kappa") {
    for (const char* k : {"lip_sigma", "lower_linear", "q_inf"}) j["sigma"][k] = std::abs(value);
    j["sigma"]["linear_kappa"] = value;
  } else {
    if (!j.at(sec).contains(key)) throw UsageError("sweep path '" + path + "' is not in the model");
    j[sec][key] = value;
  }
  try {
    return io::model_from_json(j);
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("sweep produced an invalid model: ") + e.what());
  }
}

int cmd_analyze(const RunConfig& c) {
  if (c.betas.empty()) throw UsageError("empty beta grid");
  const ModelSpec base = require_model(c);
  const auto vs = variants(c, base);
  parallel_for(vs.size(), [&](std::size_t i) {
    const ModelSpec& m = vs[i].second;
    const auto dir = dir_for(c, vs[i].first);
    io::write_file(dir / "potential_profile.csv", potential_profile(m, c.betas).to_csv());
    Json v;
    v["dalang"] = decision_json(dalang_condition(m));
    v["hawkes"] = decision_json(hawkes_condition(m.exponent, 1.0));
    v["transience"] = to_string(classify_transience(m));
    v["condition2"] = m.kernel.condition2_certified() && (m.exponent.radial() || std::holds_alternative<CoordinateStable>(m.exponent.family()));
    io::write_file(dir / "verdicts.json", v.dump(2) + "\n");
  });
  return 0;
}

int cmd_bounds(const RunConfig& c) {
  if (c.p.empty()) throw UsageError("empty --p list");
  const ModelSpec base = require_model(c);
  const auto vs = variants(c, base);
  parallel_for(vs.size(), [&](std::size_t i) {
    const ModelSpec& m = vs[i].second;
    Json j;
    j["reports"] = Json::array();
    for (int p : c.p) j["reports"].push_back(io::to_json(lyapunov_report(m, p)));
    const AsymptoticReport a = asymptotic_intermittency(m);
    j["asymptotic"] = {{"verdict", to_string(a.verdict)}, {"beta0", a.beta0}, {"eta_threshold", a.eta_threshold}, {"note", a.note}};
    const auto* st = std::get_if<IsotropicStable>(&m.exponent.family());
    const auto* rz = std::get_if<Riesz>(&m.kernel.family());
    if (m.sigma.linear_kappa && st && rz && st->scale == 1.0 && rz->c == 1.0) {
      Json pam;
      try {
        const PhaseThreshold t = pam_phase_threshold(m.d, st->index, rz->b, *m.sigma.linear_kappa);
        pam["lambda_lower_c"] = t.lambda_lower_c;
        pam["lambda_upper_c"] = t.lambda_upper_c;
        if (m.d == 1 && st->index == 2.0) pam["laplacian_form"] = pam_threshold_laplacian(rz->b, *m.sigma.linear_kappa);
      } catch (const InfiniteAmplitude&) {
        pam["tag"] = "NoSolution";
      }
      j["pam"] = pam;
    }
    io::write_file(dir_for(c, vs[i].first) / "lyapunov.json", j.dump(2) + "\n");
  });
  return 0;
}

int cmd_phase(const RunConfig& c) {
  const ModelSpec base = require_model(c);
  const auto vs = variants(c, base);
  std::vector<std::string> rows(vs.size());
  parallel_for(vs.size(), [&](std::size_t i) {
    const ModelSpec& m = vs[i].second;
    const auto* st = std::get_if<IsotropicStable>(&m.exponent.family());
    const auto* rz = std::get_if<Riesz>(&m.kernel.family());
    if (!st || !rz || !m.sigma.linear_kappa)
      throw UsageError("phase needs an isotropic stable exponent, a Riesz kernel and sigma.linear_kappa");
    const double param = c.sweep ? c.sweep->values[i] : 0.0;
    std::ostringstream os;
    os << num(param) << ',';
    try {
      const PhaseThreshold t = pam_phase_threshold(m.d, st->index, rz->b, *m.sigma.linear_kappa);
      os << num(t.lambda_lower_c) << ',' << num(t.lambda_upper_c) << ',' << to_string(lyapunov_report(m, 2).verdict);
    } catch (const InfiniteAmplitude&) {
      os << "NoSolution,NoSolution,NoSolution";
    }
    rows[i] = os.str();
  });
  std::string csv = "param,lambda_lower_c,lambda_upper_c,verdict_at_lambda0\n";
  for (const auto& r : rows) csv += r + "\n";
  io::write_file(c.out / "phase.csv", csv);
  return 0;
}

int cmd_regularity(const RunConfig& c) {
  if (c.sweep && c.sweep->path == "counterexample.q") {
    std::vector<Json> rows(c.sweep->values.size());
    parallel_for(rows.size(), [&](std::size_t i) {
      const CounterexampleReport r = counterexample_classifier(c.sweep->values[i]);
      rows[i] = {{"q", r.q},
                 {"verdict", to_string(r.verdict)},
                 {"numeric", to_string(r.numeric)},
                 {"dalang", to_string(r.dalang)},
                 {"agree", r.agree()},
                 {"gauge_exponent", r.gauge.exponent}};
    });
    std::string csv = "q,verdict,numeric,agree\n";
    for (const auto& r : rows)
      csv += num(r["q"].get<double>()) + "," + r["verdict"].get<std::string>() + "," +
             r["numeric"].get<std::string>() + "," + (r["agree"].get<bool>() ? "1" : "0") + "\n";
    io::write_file(c.out / "gauge.csv", csv);
    io::write_file(c.out / "gauge.json", Json(rows).dump(2) + "\n");
    return 0;
  }
  if (c.r_grid.empty()) throw UsageError("empty r grid");
  const ModelSpec base = require_model(c);
  const auto vs = variants(c, base);
  parallel_for(vs.size(), [&](std::size_t i) {
    const ModelSpec& m = vs[i].second;
    const auto dir = dir_for(c, vs[i].first);
    std::string csv = "r,d\n";
    for (double r : c.r_grid) csv += num(r) + "," + num(canonical_distance(m, r)) + "\n";
    io::write_file(dir / "gauge.csv", csv);
    io::write_file(dir / "gauge.json", entropy_verdict(m).to_json());
  });
  return 0;
}

int cmd_simulate(const RunConfig& c) {
  if (c.p.empty()) throw UsageError("empty --p list");
  const ModelSpec base = require_model(c);
  LatticeSpec s = c.lattice;
  s.d = base.d;
  s.seed = c.seed;
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const auto vs = variants(c, base);
  for (const auto& [tag, m] : vs) {
    const auto dir = dir_for(c, tag);
    for (int p : c.p) {
      const SimResult r = estimate_exponent(m, s, p);
      const std::string suffix = c.p.size() == 1 ? "" : "_p" + std::to_string(p);
      io::write_file(dir / ("trajectory" + suffix + ".csv"), r.to_csv());
      io::write_file(dir / ("summary" + suffix + ".json"), r.summary_json());
    }
  }
  return 0;
}

int cmd_verify(const RunConfig& c) {
  struct Check {
    std::string name;
    double value, reference, tol;
    bool relative;
  };
  std::vector<Check> checks;
  const double pi = std::numbers::pi;
  auto stable_riesz = [](int d, double q, double b) {
    return ModelSpec(CharExponent(IsotropicStable{q, 1.0}, d), CorrelationKernel(Riesz{b, 1.0}, d));
  };

  const double A = amplitude_A(1, 2.0, 0.5);
  checks.push_back({"A_{1,2,1/2} closed form", A, std::pow(2.0, -0.25) * std::sqrt(pi), 1e-12, true});
  for (double beta : {0.1, 1.0, 10.0}) {
    const ModelSpec m = stable_riesz(1, 1.5, 0.25);
    const double nu = 0.75 / 1.5;
    checks.push_back({"Upsilon quadrature vs A beta^{nu-1}, beta=" + num(beta), upsilon(m, beta).value,
                      amplitude_A(1, 1.5, 0.25) * std::pow(beta, nu - 1.0), 1e-6, true});
  }
  checks.push_back({"z_4", largest_hermite_zero(4), std::sqrt(3.0 + std::sqrt(6.0)), 1e-12, true});
  checks.push_back({"PAM threshold vs Laplacian form, b=1/2", pam_phase_threshold(1, 2.0, 0.5, 1.0).lambda_upper_c,
                    pam_threshold_laplacian(0.5, 1.0), 1e-10, true});
  {
    const ModelSpec g(CharExponent(IsotropicStable{2.0, 0.25}, 1), CorrelationKernel(Riesz{0.5, 1.0}, 1));
    const double exact = 4.0 / 3.0 * std::pow(2.0, -0.25) * std::tgamma(0.25) / std::sqrt(pi);
    checks.push_back({"occupation mean by quadrature (Girsanov value)", occupation_mean(g, 1.0), exact, 1e-8, true});
    const OccupationEstimate e = occupation_mc(g, 1.0, 4000, 1e-3, c.seed);
    checks.push_back({"occupation Monte Carlo (Girsanov value, 4 stderr + 3%)", e.mean, exact,
                      4.0 * e.stderr_mean + 0.03 * exact, false});
  }
  {
    const CharExponent cauchy(IsotropicStable{1.0, 1.0}, 1);
    for (double x : {0.0, 0.5, 2.0}) {
      const std::array<double, 1> xs{x};
      checks.push_back({"Cauchy density at x=" + num(x), transition_density(cauchy, 1.0, xs),
                        1.0 / (pi * (1.0 + x * x)), 1e-6, true});
    }
  }
  {
    const ModelSpec m = stable_riesz(1, 2.0, 0.5);
    LatticeSpec s;
    s.n = 64;
    s.L = 8.0;
    s.dt = 0.01;
    s.replicas = 400;
    s.seed = c.seed;
    const LinearValidation v = run_linear_validation(m, s, {0.1, 0.5});
    checks.push_back({"linear variance vs lattice mode sum", v.max_rel_error, 0.0, 0.15, false});
  }
  {
    const CorrelationKernel k(Cauchy{1.0, 1.0}, 1);
    const MeasureSpec mu{{Atom{0.7, {0.0}}, Atom{0.3, {1.3}}}, {}};
    const EnergyForms e = energy_form(k, mu);
    checks.push_back({"energy forms, two atoms, Cauchy kernel", e.spectral, e.spatial, 1e-6, true});
  }

  std::ostringstream report;
  bool ok = true;
  for (const auto& ch : checks) {
    const double err = ch.relative ? std::abs(ch.value - ch.reference) / std::abs(ch.reference)
                                   : std::abs(ch.value - ch.reference);
    const bool pass = err <= ch.tol;
    ok = ok && pass;
    report << (pass ? "PASS " : "FAIL ") << ch.name << ": value " << num(ch.value) << ", reference "
           << num(ch.reference) << ", " << (ch.relative ? "rel" : "abs") << " error " << num(err) << " (tol "
           << num(ch.tol) << ")\n";
  }
  std::cout << report.str();
  io::write_file(c.out / "verify.txt", report.str());
  return ok ? 0 : 1;
}

int run(int argc, char** argv) {
  CLI::App app{"Stochastic heat equation analysis: Lyapunov bounds, regularity and lattice simulation"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string model, sweep, plist, bgrid = "1e-3:1e3:25", rgrid = "1e-6:1e-1:31";

  auto common = [&](CLI::App* s) {
    s->add_option("--model", model, "model JSON file");
    s->add_option("--out", cfg.out, "output directory");
    s->add_option("--seed", cfg.seed, "random seed");
    s->add_option("--sweep", sweep, "param=v1,v2,... (e.g. kernel.b=0.25,0.5)");
    s->add_option("--p", plist, "comma-separated moment orders");
  };
  CLI::App* analyze = app.add_subcommand("analyze", "Upsilon profile and existence verdicts");
  common(analyze);
  analyze->add_option("--beta-grid", bgrid, "min:max:n, log spaced");
  CLI::App* bounds = app.add_subcommand("bounds", "Lyapunov exponent bounds");
  common(bounds);
  CLI::App* phase = app.add_subcommand("phase", "PAM phase thresholds over a sweep");
  common(phase);
  CLI::App* regularity = app.add_subcommand("regularity", "canonical distance and gauge");
  common(regularity);
  regularity->add_option("--r-grid", rgrid, "min:max:n, log spaced");
  CLI::App* simulate = app.add_subcommand("simulate", "lattice simulation");
  common(simulate);
  simulate->add_option("--replicas", cfg.lattice.replicas, "replicas M");
  simulate->add_option("--grid", cfg.lattice.n, "modes per axis N");
  simulate->add_option("--period", cfg.lattice.L, "period L");
  simulate->add_option("--dt", cfg.lattice.dt, "time step");
  simulate->add_option("--horizon", cfg.lattice.T, "horizon T");
  CLI::App* verify = app.add_subcommand("verify", "built-in oracle cross-checks");
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    if (!model.empty()) cfg.model_path = model;
    if (!sweep.empty()) cfg.sweep = parse_sweep(sweep);
    if (!plist.empty()) {
      cfg.p.clear();
      std::istringstream is(plist);
      std::string tok;
      while (std::getline(is, tok, ',')) {
        try {
          cfg.p.push_back(std::stoi(tok));
        } catch (...) {
          throw UsageError("bad --p entry '" + tok + "'");
        }
      }
    }
    if (sub == analyze) {
      cfg.betas = parse_log_grid(bgrid);
      return cmd_analyze(cfg);
    }
    if (sub == bounds) return cmd_bounds(cfg);
    if (sub == phase) return cmd_phase(cfg);
    if (sub == regularity) {
      cfg.r_grid = parse_log_grid(rgrid);
      return cmd_regularity(cfg);
    }
    if (sub == simulate) return cmd_simulate(cfg);
    return cmd_verify(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sheq::cli
