#include "sheq/potential.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "sheq/errors.hpp"

namespace sheq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using std::numbers::pi;

PowerLog psi_growth(const CharExponent& e, AsymptoticSource src) {
  if (src == AsymptoticSource::Declared) return e.growth();
  return fit_power_log([&](double r) { return e.re_psi_axis(r); }, 1e3, 1e12);
}

PowerLog fhat_decay(const CorrelationKernel& k, AsymptoticSource src) {
  if (src == AsymptoticSource::Declared) return k.decay();
  return fit_power_log([&](double r) { return k.f_hat_axis(r); }, 1e3, 1e12);
}

PowerLog fhat_origin(const CorrelationKernel& k, AsymptoticSource src) {
  if (src == AsymptoticSource::Declared) return k.origin();
  return fit_power_log_origin([&](double r) { return k.f_hat_axis(r); }, 1e-12, 1e-3);
}

PowerLog psi_origin(const CharExponent& e, AsymptoticSource src) {
  if (src == AsymptoticSource::Declared) return e.origin();
  return fit_power_log_origin([&](double r) { return e.re_psi_axis(r); }, 1e-12, 1e-3);
}

bool grows(const PowerLog& g) { return g.rapid || g.power > 1e-12 || (std::abs(g.power) <= 1e-12 && g.log_power > 0); }

Decision classify_end(const PowerLog& h, bool at_infinity, AsymptoticSource src) {
  const double pt = src == AsymptoticSource::Declared ? 1e-12 : kFitPowerTol;
  const double lt = src == AsymptoticSource::Declared ? 1e-12 : kFitLogTol;
  return at_infinity ? tail_integrable(h, pt, lt) : origin_integrable(h, pt, lt);
}

double crossover(const CharExponent& e, double beta) {
  if (beta <= 0.0) return 1.0;
  const double r = e.radius_where(0.5 * beta);
  if (!std::isfinite(r)) return 1.0;
  return std::clamp(r, 1e-8, 1e8);
}

quad::EndpointHint hint_of(const PowerLog& h) {
  quad::EndpointHint q;
  if (!h.rapid) {
    q.power = h.power;
    q.log_power = h.log_power;
  }
  return q;
}

}  // namespace

const char* to_string(Finiteness f) {
  switch (f) {
    case Finiteness::Finite:
      return "finite";
    case Finiteness::Divergent:
      return "divergent";
    case Finiteness::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

std::string DivergenceCertificate::describe() const {
  std::ostringstream os;
  os << "integrand ~ " << sheq::describe(integrand) << " at " << where << " ("
     << (source == AsymptoticSource::Declared ? "declared" : "fitted") << " exponents)";
  return os.str();
}

PowerLog upsilon_tail(const CharExponent& e, const CorrelationKernel& k, AsymptoticSource src) {
  const PowerLog g = psi_growth(e, src);
  const PowerLog f = fhat_decay(k, src);
  PowerLog h = PowerLog{double(e.dim() - 1), 0.0, false} * f;
  if (grows(g)) h = h * reciprocal(g);
  return h;
}

PowerLog upsilon_origin(const CharExponent& e, const CorrelationKernel& k, double beta,
                        AsymptoticSource src) {
  PowerLog h = PowerLog{double(e.dim() - 1), 0.0, false} * fhat_origin(k, src);
  if (beta == 0.0) h = h * reciprocal(psi_origin(e, src));
  return h;
}

UpsilonValue upsilon(const CharExponent& e, const CorrelationKernel& k, double beta,
                     AsymptoticSource src) {
  if (!(beta >= 0.0)) throw InvalidArgument("upsilon needs beta >= 0");
  if (e.dim() != k.dim()) throw InvalidArgument("exponent and kernel dimensions differ");
  UpsilonValue out;
  out.beta = beta;
  const PowerLog tail = upsilon_tail(e, k, src);
  const PowerLog orig = upsilon_origin(e, k, beta, src);
  const Decision at_inf = classify_end(tail, true, src);
  const Decision at_zero = classify_end(orig, false, src);
  if (at_inf == Decision::No || at_zero == Decision::No) {
    out.value = kInf;
    out.error = 0.0;
    out.status = Finiteness::Divergent;
    out.certificate = at_inf == Decision::No ? DivergenceCertificate{"infinity", tail, src}
                                             : DivergenceCertificate{"origin", orig, src};
    return out;
  }
  quad::HalfLineOptions opt;
  opt.scale = crossover(e, beta);
  opt.rel = 1e-10;
  opt.at_infinity = hint_of(tail);
  opt.at_zero = hint_of(orig);
  if (src == AsymptoticSource::Fitted) {
    // A fitted power inside the tie zone is the borderline case; integrate it as one.
    if (std::abs(tail.power + 1.0) <= kFitPowerTol) opt.at_infinity.power = -1.0;
    if (std::abs(orig.power + 1.0) <= kFitPowerTol) opt.at_zero.power = -1.0;
  }
  auto h = [beta](double psi, double fh) { return fh / (beta + 2.0 * psi); };
  const quad::Result r = spectral_integral(e, k, h, opt);
  out.value = r.value;
  out.error = r.error;
  const bool analytic_ok = at_inf == Decision::Yes && at_zero == Decision::Yes;
  if (!r.converged || !std::isfinite(r.value)) {
    out.status = Finiteness::Indeterminate;
  } else {
    out.status = Finiteness::Finite;
    if (!analytic_ok) out.error = std::max(out.error, 1e-3 * std::abs(out.value));
  }
  if (beta == 0.0 && out.status == Finiteness::Finite) {
    for (double b : {1e-2, 1e-3, 1e-4}) {
      const UpsilonValue v = upsilon(e, k, b, src);
      out.trail.emplace_back(b, v.value);
    }
  }
  return out;
}

UpsilonValue upsilon(const ModelSpec& m, double beta) { return upsilon(m.exponent, m.kernel, beta); }

std::string PotentialProfile::to_csv() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "beta,upsilon,err,divergent\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.beta << ',';
    if (std::isinf(r.value))
      os << "inf";
    else
      os << r.value;
    os << ',' << r.error << ',' << (r.status == Finiteness::Divergent ? 1 : 0) << '\n';
  }
  return os.str();
}

PotentialProfile potential_profile(const ModelSpec& m, const std::vector<double>& betas) {
  if (betas.empty()) throw InvalidArgument("empty beta grid");
  PotentialProfile p;
  for (double b : betas) p.rows.push_back(upsilon(m, b));
  return p;
}

double amplitude_A(int d, double q, double b) {
  if (d < 1 || !(q > 0.0 && q <= 2.0) || !(b > 0.0 && b < d))
    throw InvalidArgument("amplitude_A needs q in (0, 2] and b in (0, d)");
  if (q + b <= d) throw InfiniteAmplitude("A_{d,q,b} is infinite when q + b <= d");
  const double nu = (d - b) / q;
  if (d == 1) {
    const double x = (1.0 - b) / q;
    return std::pow(2.0, b - nu) * std::tgamma(0.5 * b) / (std::sqrt(pi) * q * std::tgamma(0.5 * (1.0 - b))) *
           std::beta(x, 1.0 - x);
  }
  auto g = [&](double rho) { return std::pow(rho, d - 1) / (std::pow(rho, b) + std::pow(rho, q + b)); };
  quad::HalfLineOptions opt;
  opt.rel = 1e-12;
  const quad::Result r = quad::half_line(g, opt);
  if (!r.converged) throw QuadratureError("amplitude_A radial integral", r.value, r.error);
  return riesz_constant(d, b) / (std::pow(2.0 * pi, d) * std::pow(2.0, nu)) * spectral::sphere_area(d) *
         r.value;
}

Decision dalang_condition(const ModelSpec& m) {
  const UpsilonValue v = upsilon(m, 1.0);
  switch (v.status) {
    case Finiteness::Finite:
      return Decision::Yes;
    case Finiteness::Divergent:
      return Decision::No;
    default:
      return Decision::Indeterminate;
  }
}

double replica_potential_at(const ModelSpec& m, double beta, std::span<const double> x) {
  if (!(beta > 0.0)) throw InvalidArgument("replica potential needs beta > 0");
  if (static_cast<int>(x.size()) != m.d) throw InvalidArgument("replica potential: wrong dimension");
  const UpsilonValue up = upsilon(m, beta);
  if (!up.finite()) throw PreconditionFailed("replica potential needs a finite Upsilon(beta)");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double r = std::sqrt(r2);
  if (r == 0.0) return up.value;
  if (!m.exponent.radial() || !m.kernel.radial())
    throw Unsupported("replica potential off the origin needs radial exponent and kernel");
  const int d = m.d;
  const double c = spectral::fourier_norm(d) * spectral::sphere_area(d);
  auto g = [&](double rho) {
    return c * std::pow(rho, d - 1) * m.kernel.f_hat_axis(rho) / (beta + 2.0 * m.exponent.re_psi_axis(rho));
  };
  quad::OscillatoryOptions opt;
  opt.rel = 1e-10;
  opt.abs = 1e-14 * up.value;
  opt.max_panels = 200000;
  opt.at_zero = hint_of(upsilon_origin(m.exponent, m.kernel, beta, AsymptoticSource::Declared));
  const quad::Result res = quad::oscillatory(
      g, [d](double z) { return spectral::spherical_kernel(d, z); },
      [d](int i) { return spectral::spherical_kernel_zero(d, i); }, r, opt);
  if (!res.converged) throw QuadratureError("replica potential", res.value, res.error);
  return res.value;
}

namespace {

// E |m + s Z|^{-a}, Z standard normal in R^d, via
// |y|^{-a} = Gamma(a/2)^{-1} \int_0^inf t^{a/2-1} e^{-t|y|^2} dt.
double gaussian_negative_moment(int d, double a, double m2, double s2) {
  if (s2 == 0.0) return m2 == 0.0 ? kInf : std::pow(m2, -0.5 * a);
  if (m2 == 0.0)
    return std::pow(s2, -0.5 * a) * std::pow(2.0, -0.5 * a) * std::tgamma(0.5 * (d - a)) / std::tgamma(0.5 * d);
  auto g = [&](double t) {
    const double q = 1.0 + 2.0 * t * s2;
    return std::pow(t, 0.5 * a - 1.0) * std::pow(q, -0.5 * d) * std::exp(-t * m2 / q);
  };
  quad::HalfLineOptions opt;
  opt.scale = 1.0 / (2.0 * s2 + m2);
  opt.rel = 1e-12;
  const quad::Result r = quad::half_line(g, opt);
  if (!r.converged) throw QuadratureError("Gaussian negative moment", r.value, r.error);
  return r.value / std::tgamma(0.5 * a);
}

struct Component {
  double w;
  std::vector<double> x;
  double var;  // 0 for atoms
};

}  // namespace

EnergyForms energy_form(const CorrelationKernel& k, const MeasureSpec& mu) {
  const int d = k.dim();
  std::vector<Component> comps;
  for (const auto& a : mu.atoms) comps.push_back({a.weight, a.at, 0.0});
  for (const auto& g : mu.gaussians) comps.push_back({g.weight, g.mean, g.s * g.s});
  for (const auto& c : comps)
    if (static_cast<int>(c.x.size()) != d) throw InvalidArgument("measure dimension differs from kernel");
  if (!mu.atoms.empty() && !k.bounded_at_zero())
    throw InvalidArgument("atoms need a kernel bounded at the origin");
  if (!k.spatial_eval_available()) throw Unsupported("spatial energy needs a spatially evaluable kernel");
  const auto* riesz = std::get_if<Riesz>(&k.family());
  if (!mu.gaussians.empty() && !riesz) throw Unsupported("Gaussian components are supported with Riesz kernels only");
  if (!k.radial()) throw Unsupported("spectral energy needs a radial kernel");

  EnergyForms e{0.0, 0.0};
  const double c = spectral::fourier_norm(d) * spectral::sphere_area(d);
  for (const auto& ci : comps) {
    for (const auto& cj : comps) {
      std::vector<double> diff(d);
      double dist2 = 0.0;
      for (int i = 0; i < d; ++i) {
        diff[i] = ci.x[i] - cj.x[i];
        dist2 += diff[i] * diff[i];
      }
      const double V = ci.var + cj.var;
      const double w = ci.w * cj.w;
      // Spatial side.
      if (V == 0.0) {
        e.spatial += w * k.f(std::span<const double>(diff));
      } else {
        e.spatial += w * riesz->c * gaussian_negative_moment(d, d - riesz->b, dist2, V);
      }
      // Spectral side: (2 pi)^{-d} \int cos(xi.diff) e^{-V|xi|^2/2} f^(xi) dxi.
      auto g = [&](double rho) {
        return c * std::pow(rho, d - 1) * std::exp(-0.5 * V * rho * rho) * k.f_hat_axis(rho);
      };
      quad::Result r;
      const double dist = std::sqrt(dist2);
      if (dist == 0.0) {
        quad::HalfLineOptions opt;
        opt.rel = 1e-12;
        opt.scale = V > 0.0 ? 1.0 / std::sqrt(V) : 1.0;
        r = quad::half_line(g, opt);
      } else {
        quad::OscillatoryOptions opt;
        opt.rel = 1e-12;
        opt.abs = 1e-16;
        opt.max_panels = 200000;
        if (V > 0.0) opt.cutoff = std::sqrt(2.0 * 60.0 / V);
        r = quad::oscillatory(
            g, [d](double z) { return spectral::spherical_kernel(d, z); },
            [d](int i) { return spectral::spherical_kernel_zero(d, i); }, dist, opt);
      }
      if (!r.converged) throw QuadratureError("spectral energy", r.value, r.error);
      e.spectral += w * r.value;
    }
  }
  return e;
}

const char* to_string(Transience t) {
  switch (t) {
    case Transience::FiniteTotalOccupation:
      return "finite_total_occupation";
    case Transience::InfiniteTotalOccupation:
      return "infinite_total_occupation";
    case Transience::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

Transience classify_transience(const ModelSpec& m) {
  const UpsilonValue v = upsilon(m, 0.0);
  if (v.status == Finiteness::Finite) return Transience::FiniteTotalOccupation;
  if (v.status == Finiteness::Divergent) return Transience::InfiniteTotalOccupation;
  return Transience::Indeterminate;
}

double occupation_mean(const ModelSpec& m, double t) {
  if (!(t > 0.0)) throw InvalidArgument("occupation_mean needs t > 0");
  auto h = [t](double psi, double fh) {
    const double x = 2.0 * t * psi;
    const double w = x < 1e-12 ? t * (1.0 - 0.5 * x) : -std::expm1(-x) / (2.0 * psi);
    return w * fh;
  };
  const PowerLog tail = upsilon_tail(m.exponent, m.kernel, AsymptoticSource::Declared);
  if (tail_integrable(tail) != Decision::Yes) return kInf;
  quad::HalfLineOptions opt;
  opt.scale = crossover(m.exponent, 1.0 / t);
  opt.rel = 1e-11;
  opt.at_infinity = hint_of(tail);
  const quad::Result r = spectral_integral(m.exponent, m.kernel, h, opt);
  if (!r.converged) throw QuadratureError("occupation mean", r.value, r.error);
  return r.value;
}

}  // namespace sheq
