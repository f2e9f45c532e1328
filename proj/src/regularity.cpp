#include "sheq/regularity.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "sheq/errors.hpp"

namespace sheq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

quad::EndpointHint hint(const PowerLog& h) {
  quad::EndpointHint q;
  if (!h.rapid) {
    q.power = h.power;
    q.log_power = h.log_power;
  }
  return q;
}

double slope2(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

double linear_variance(const ModelSpec& m, double t) {
  if (!(t > 0.0)) throw InvalidArgument("linear_variance needs t > 0");
  if (dalang_condition(m) != Decision::Yes) throw PreconditionFailed("linear_variance needs Upsilon(1) < inf");
  return occupation_mean(m, t);
}

Sandwich linear_variance_sandwich(const ModelSpec& m, double t, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("sandwich needs lambda > 0");
  const UpsilonValue e = upsilon(m, 2.0 / lambda);
  if (!e.finite()) throw PreconditionFailed("sandwich needs a finite Upsilon(2/lambda)");
  return {-std::expm1(-2.0 * t / lambda) * e.value, std::exp(2.0 * t / lambda) * e.value, e.value};
}

double canonical_distance(const ModelSpec& m, double r) {
  if (!(r >= 0.0)) throw InvalidArgument("canonical_distance needs r >= 0");
  const int d = m.d;
  if (d > 3) throw Unsupported("canonical_distance supports d <= 3");
  if (!m.exponent.radial() || !m.kernel.radial())
    throw Unsupported("canonical_distance needs radial Re Psi and f^");
  if (r == 0.0) return 0.0;
  if (dalang_condition(m) != Decision::Yes) return kInf;
  const double c = spectral::fourier_norm(d) * spectral::sphere_area(d);
  auto g = [&](double rho) {
    return c * std::pow(rho, d - 1) * m.kernel.f_hat_axis(rho) / (1.0 + 2.0 * m.exponent.re_psi_axis(rho));
  };
  auto zero = [d](int k) { return spectral::spherical_kernel_zero(d, k); };
  const double z1 = zero(1) / r;
  PowerLog at0 = upsilon_origin(m.exponent, m.kernel, 1.0, AsymptoticSource::Declared);
  at0.power += 2.0;
  const PowerLog atinf = upsilon_tail(m.exponent, m.kernel, AsymptoticSource::Declared);
  auto head_f = [&](double rho) { return g(rho) * spectral::one_minus_spherical_kernel(d, rho * r); };
  const quad::Result head = quad::origin_segment(head_f, z1, 1e-11, 0.0, hint(at0));
  const quad::Result tail = quad::tail_segment(g, z1, 1e-11, 0.0, head.value, hint(atinf));
  quad::OscillatoryOptions opt;
  opt.rel = 1e-11;
  opt.abs = 1e-13 * (head.value + tail.value);
  opt.max_panels = 200000;
  const quad::Result osc = quad::oscillatory_tail(
      g, [d](double z) { return spectral::spherical_kernel(d, z); }, zero, r, 1, opt);
  if (!head.converged || !tail.converged || !osc.converged)
    throw QuadratureError("canonical distance", head.value + tail.value - osc.value,
                          head.error + tail.error + osc.error);
  return std::sqrt(std::max(0.0, head.value + tail.value - osc.value));
}

const char* to_string(GaugeRegime g) {
  switch (g) {
    case GaugeRegime::PolynomialGauge:
      return "PolynomialGauge";
    case GaugeRegime::PolyLogGauge:
      return "PolyLogGauge";
    case GaugeRegime::LipschitzGauge:
      return "LipschitzGauge";
    case GaugeRegime::LogOnlyGauge:
      return "LogOnlyGauge";
    case GaugeRegime::NoSolution:
      return "NoSolution";
  }
  return "NoSolution";
}

const char* to_string(EntropyIntegral e) { return e == EntropyIntegral::Finite ? "Finite" : "Infinite"; }

std::string GaugeReport::to_json() const {
  nlohmann::ordered_json j;
  j["regime"] = to_string(regime);
  j["exponent"] = exponent;
  j["entropy_integral"] = to_string(entropy);
  j["fit"] = {{"a", a}, {"s", s}, {"c", c}, {"slope", slope}, {"residual", residual},
              {"r_lo", r_lo}, {"r_hi", r_hi}};
  return j.dump(2) + "\n";
}

std::string GaugeReport::to_csv() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "r,d\n" << std::setprecision(17);
  for (std::size_t i = 0; i < r.size(); ++i) os << r[i] << ',' << dist[i] << '\n';
  return os.str();
}

GaugeReport entropy_verdict(const ModelSpec& m) {
  GaugeReport g;
  if (dalang_condition(m) != Decision::Yes) {
    g.regime = GaugeRegime::NoSolution;
    g.entropy = EntropyIntegral::Infinite;
    return g;
  }
  const int per_decade = 6;
  for (int i = 0; i <= 5 * per_decade; ++i) {
    const double r = std::pow(10.0, -6.0 + double(i) / per_decade);
    g.r.push_back(r);
    g.dist.push_back(canonical_distance(m, r));
  }
  // Drop the smallest decade; power fits use the next two decades, where
  // the r^2 correction is smallest, and the log-only fit uses all four.
  std::vector<double> lr, llr, ld, lr_all, llr_all, ld_all;
  for (std::size_t i = per_decade; i < g.r.size(); ++i) {
    const double x = std::log(g.r[i]), xx = std::log(-std::log(g.r[i])), y = std::log(g.dist[i]);
    lr_all.push_back(x);
    llr_all.push_back(xx);
    ld_all.push_back(y);
    if (i > std::size_t(3 * per_decade)) continue;
    lr.push_back(x);
    llr.push_back(xx);
    ld.push_back(y);
  }
  g.r_lo = g.r[per_decade];
  g.r_hi = g.r[3 * per_decade];
  const auto f = least_squares3(lr, llr, ld);
  g.a = f[0];
  g.s = f[1];
  g.c = f[2];
  double ss = 0.0;
  for (std::size_t i = 0; i < lr.size(); ++i) {
    const double e = ld[i] - (f[0] + f[1] * lr[i] + f[2] * llr[i]);
    ss += e * e;
  }
  g.residual = std::sqrt(ss / lr.size());
  g.slope = slope2(lr, ld);

  if (g.s < 0.05) {
    // d ~ |log r|^e: log N(eps) ~ eps^{1/e}, Dudley integrable iff e < -1/2.
    g.regime = GaugeRegime::LogOnlyGauge;
    g.r_hi = g.r.back();
    g.exponent = slope2(llr_all, ld_all);
    if (g.exponent >= 0.0) {
      g.regime = GaugeRegime::NoSolution;
      g.entropy = EntropyIntegral::Infinite;
    } else {
      g.entropy = g.exponent < -0.5 ? EntropyIntegral::Finite : EntropyIntegral::Infinite;
    }
    return g;
  }
  g.entropy = EntropyIntegral::Finite;
  if (std::abs(g.s - 1.0) < 0.02) {
    g.exponent = 1.0;
    g.regime = g.c > 0.25 ? GaugeRegime::PolyLogGauge : GaugeRegime::LipschitzGauge;
  } else {
    g.regime = GaugeRegime::PolynomialGauge;
    g.exponent = g.slope;
  }
  return g;
}

const char* to_string(CounterexampleVerdict v) {
  switch (v) {
    case CounterexampleVerdict::NoRandomFieldSolution:
      return "NoRandomFieldSolution";
    case CounterexampleVerdict::SolutionDiscontinuousEverywhere:
      return "SolutionDiscontinuousEverywhere";
    case CounterexampleVerdict::SolutionWithContinuousModification:
      return "SolutionWithContinuousModification";
  }
  return "NoRandomFieldSolution";
}

CounterexampleReport counterexample_classifier(double q) {
  if (!std::isfinite(q)) throw InvalidArgument("q must be finite");
  CounterexampleReport rep{q, CounterexampleVerdict::NoRandomFieldSolution,
                           CounterexampleVerdict::NoRandomFieldSolution, Decision::Indeterminate,
                           Finiteness::Indeterminate, {}};
  if (q > 2.0)
    rep.verdict = CounterexampleVerdict::SolutionWithContinuousModification;
  else if (q > 1.0)
    rep.verdict = CounterexampleVerdict::SolutionDiscontinuousEverywhere;

  const ModelSpec m(CharExponent(IsotropicStable{2.0, 1.0}, 3), CorrelationKernel(LogCorrected{1.0, q}, 3),
                    SigmaSpec::constant(1.0));
  rep.dalang = dalang_condition(m);
  rep.fitted_upsilon = upsilon(m.exponent, m.kernel, 1.0, AsymptoticSource::Fitted).status;
  if (rep.dalang == Decision::Yes && rep.fitted_upsilon == Finiteness::Finite) {
    rep.gauge = entropy_verdict(m);
    rep.numeric = rep.gauge.entropy == EntropyIntegral::Finite
                      ? CounterexampleVerdict::SolutionWithContinuousModification
                      : CounterexampleVerdict::SolutionDiscontinuousEverywhere;
  }
  return rep;
}

}  // namespace sheq
