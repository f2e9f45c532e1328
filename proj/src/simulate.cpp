#include "sheq/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "sheq/errors.hpp"
#include "sheq/io.hpp"
#include "sheq/parallel.hpp"

namespace sheq {

namespace {

// 1 for self-conjugate modes of the half spectrum, 2 otherwise.
double mode_weight(const LatticeSpec& s, std::size_t k) {
  const std::size_t half = s.n / 2 + 1;
  const std::size_t k_last = s.d == 1 ? k : k % half;
  return (k_last == 0 || k_last == half - 1) ? 1.0 : 2.0;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double column_mean(const std::vector<std::vector<double>>& rows, std::size_t j) {
  std::vector<double> c(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) c[r] = rows[r][j];
  return pairwise_sum(c) / double(c.size());
}

}  // namespace

LinearValidation run_linear_validation(const ModelSpec& model, const LatticeSpec& s,
                                       const std::vector<double>& times) {
  if (times.empty()) throw InvalidArgument("no output times");
  ModelSpec m = model;
  m.sigma = SigmaSpec::constant(1.0);
  m.drift = DriftSpec::none();
  m.initial = InitialData::constant(0.0);
  auto grid = std::make_shared<const SpectralGrid>(m, s);
  std::vector<long> at;
  for (double t : times) {
    const long k = std::lround(t / s.dt);
    if (k < 1) throw InvalidArgument("output time below one step");
    at.push_back(k);
  }
  const long last = *std::max_element(at.begin(), at.end());
  std::vector<std::vector<double>> rec(s.replicas, std::vector<double>(at.size()));
  parallel_for(std::size_t(s.replicas), [&](std::size_t r) {
    FieldState st = initial_state(m, grid);
    const rng::Stream base(s.seed, r);
    for (long k = 1; k <= last; ++k) {
      rng::Stream sk = base.substream(static_cast<std::uint32_t>(k));
      step(st, m, sk);
      for (std::size_t i = 0; i < at.size(); ++i) {
        if (at[i] != k) continue;
        std::vector<double> sq(st.u.size());
        for (std::size_t j = 0; j < sq.size(); ++j) sq[j] = st.u[j] * st.u[j];
        rec[r][i] = pairwise_sum(sq) / double(sq.size());
      }
    }
  });
  LinearValidation out;
  const double vol = std::pow(s.L, s.d);
  const double n_rep = double(s.replicas);
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double t = at[i] * s.dt;
    const double mean = column_mean(rec, i);
    std::vector<double> dev(rec.size());
    for (std::size_t r = 0; r < rec.size(); ++r) dev[r] = (rec[r][i] - mean) * (rec[r][i] - mean);
    const double se = s.replicas > 1 ? std::sqrt(pairwise_sum(dev) / (n_rep - 1.0) / n_rep) : 0.0;
    double exact = 0.0, limit = 0.0;
    for (std::size_t k = 0; k < grid->modes(); ++k) {
      const double w = mode_weight(s, k);
      const double psi = grid->re_psi()[k];
      const double fh = grid->f_hat()[k];
      const double s2 = grid->noise_scale()[k] * grid->noise_scale()[k];
      const double a = std::exp(-2.0 * s.dt * psi);
      // s^2 sum_{j=1}^{n} a^j
      const double geo = psi == 0.0 ? double(at[i]) : a * -std::expm1(-2.0 * t * psi) / -std::expm1(-2.0 * s.dt * psi);
      exact += w * s2 * geo;
      limit += w * fh / vol * (psi == 0.0 ? t : -std::expm1(-2.0 * t * psi) / (2.0 * psi));
    }
    out.times.push_back(t);
    out.sample.push_back(mean);
    out.stderr_sample.push_back(se);
    out.exact.push_back(exact);
    out.limit.push_back(limit);
    out.rel_error.push_back(std::abs(mean - exact) / exact);
    out.max_rel_error = std::max(out.max_rel_error, out.rel_error.back());
  }
  return out;
}

SimResult estimate_exponent(const ModelSpec& m, const LatticeSpec& s, int p) {
  if (p < 1) throw InvalidArgument("moment order must be >= 1");
  auto grid = std::make_shared<const SpectralGrid>(m, s);
  const long steps = s.steps();
  const long every = std::max(1L, steps / 200);
  std::vector<long> rec_steps;
  for (long k = every; k <= steps; k += every) rec_steps.push_back(k);
  if (rec_steps.back() != steps) rec_steps.push_back(steps);
  const std::size_t R = rec_steps.size();
  const std::size_t M = s.replicas;
  std::vector<std::vector<double>> site2(M, std::vector<double>(R)), avg2 = site2, sitep = site2, avgp = site2;
  double t0 = 0.0;
  {
    const FieldState probe = initial_state(m, grid);
    t0 = probe.time;
  }
  parallel_for(M, [&](std::size_t r) {
    FieldState st = initial_state(m, grid);
    const rng::Stream base(s.seed, r);
    std::size_t next = 0;
    std::vector<double> a2(st.u.size()), ap(st.u.size());
    for (long k = 1; k <= steps; ++k) {
      rng::Stream sk = base.substream(static_cast<std::uint32_t>(k));
      step(st, m, sk);
      if (rec_steps[next] != k) continue;
      for (std::size_t j = 0; j < st.u.size(); ++j) {
        const double v = std::abs(st.u[j]);
        a2[j] = v * v;
        ap[j] = std::pow(v, p);
      }
      site2[r][next] = a2[0];
      sitep[r][next] = ap[0];
      avg2[r][next] = pairwise_sum(a2) / double(a2.size());
      avgp[r][next] = pairwise_sum(ap) / double(ap.size());
      ++next;
    }
  });

  SimResult out;
  out.p = p;
  out.replicas = s.replicas;
  out.stiffness = grid->stiffness();
  for (std::size_t i = 0; i < R; ++i) {
    out.t.push_back(t0 + rec_steps[i] * s.dt);
    out.m2_site.push_back(column_mean(site2, i));
    out.m2_avg.push_back(column_mean(avg2, i));
    out.mp_site.push_back(column_mean(sitep, i));
    out.mp_avg.push_back(column_mean(avgp, i));
  }
  const double t_end = out.t.back();
  out.window_lo = 0.5 * t_end;
  out.window_hi = t_end;
  std::vector<std::size_t> win;
  for (std::size_t i = 0; i < R; ++i)
    if (out.t[i] >= out.window_lo) win.push_back(i);
  if (win.size() < 2) throw InvalidArgument("fit window holds fewer than two output times");
  std::vector<double> wt, wy, ws;
  for (std::size_t i : win) {
    wt.push_back(out.t[i]);
    wy.push_back(std::log(out.mp_avg[i]));
    ws.push_back(std::log(out.mp_site[i]));
  }
  out.gamma_hat = ols_slope(wt, wy);
  out.gamma_site = ols_slope(wt, ws);

  // Bootstrap over replicas.
  const int B = 400;
  std::vector<double> boot(B);
  parallel_for(B, [&](std::size_t b) {
    rng::Stream bs(s.seed ^ 0x5DEECE66Dull, 0xB0000000ull + b);
    std::vector<std::size_t> idx(M);
    for (auto& v : idx) v = std::min<std::size_t>(M - 1, std::size_t(bs.uniform() * double(M)));
    std::vector<double> y;
    std::vector<double> col(M);
    for (std::size_t i : win) {
      for (std::size_t r = 0; r < M; ++r) col[r] = avgp[idx[r]][i];
      y.push_back(std::log(pairwise_sum(col) / double(M)));
    }
    boot[b] = ols_slope(wt, y);
  });
  std::vector<double> sorted = boot;
  std::sort(sorted.begin(), sorted.end());
  out.ci_lo = sorted[std::size_t(0.025 * (B - 1))];
  out.ci_hi = sorted[std::size_t(std::ceil(0.975 * (B - 1)))];
  const double mb = pairwise_sum(boot) / B;
  std::vector<double> dev(B);
  for (int b = 0; b < B; ++b) dev[b] = (boot[b] - mb) * (boot[b] - mb);
  out.stderr_gamma = std::sqrt(pairwise_sum(dev) / (B - 1));

  out.notes.push_back("lattice moment exponent, not the continuum exponent; only its sign is asserted");
  if (grid->zero_mode_dropped())
    out.notes.push_back("f^(0) infinite: zero-mode noise variance set to 0 (spectral truncation)");
  if (grid->stiffness() > 1.0) out.notes.push_back("dt max Re Psi > 1 (exponential integrator, informational)");
  out.config_hash = io::config_hash(m, s);
  return out;
}

std::string SimResult::to_csv() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "t,m2_site,m2_avg,mp_site,mp_avg\n" << std::setprecision(17);
  for (std::size_t i = 0; i < t.size(); ++i)
    os << t[i] << ',' << m2_site[i] << ',' << m2_avg[i] << ',' << mp_site[i] << ',' << mp_avg[i] << '\n';
  return os.str();
}

std::string SimResult::summary_json() const {
  nlohmann::ordered_json j;
  j["gamma_hat"] = gamma_hat;
  j["ci"] = {ci_lo, ci_hi};
  j["window"] = {window_lo, window_hi};
  j["config_hash"] = config_hash;
  j["p"] = p;
  j["gamma_site"] = gamma_site;
  j["stderr"] = stderr_gamma;
  j["replicas"] = replicas;
  j["stiffness"] = stiffness;
  j["notes"] = notes;
  return j.dump(2) + "\n";
}

}  // namespace sheq
