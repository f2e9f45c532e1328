#include "sheq/levy.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "sheq/errors.hpp"
#include "sheq/quadrature.hpp"
#include "sheq/spectral.hpp"

namespace sheq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_spec(const SubordinatorSpec& s) {
  if (!(s.p > 0.0 && s.p < 1.0)) throw InvalidArgument("subordinator index p must lie in (0, 1)");
  if (!std::isfinite(s.q_log)) throw InvalidArgument("subordinator log exponent must be finite");
}

}  // namespace

double laplace_exponent(const SubordinatorSpec& spec, double lambda, double rel) {
  require_spec(spec);
  if (!(lambda >= 0.0)) throw InvalidArgument("laplace_exponent needs lambda >= 0");
  if (lambda == 0.0) return 0.0;
  const double p = spec.p, h = 0.5 * spec.q_log;
  // x = e^{-u}: dx x^{-1-p} = e^{pu} du; u runs over (log 2, inf).
  auto G = [&](double u) {
    const double y = lambda * std::exp(-u);
    return -std::expm1(-y) * std::exp(p * u) * std::pow(u, h);
  };
  const double u0 = std::log(2.0);
  const double us = std::max(u0, std::log(lambda));
  quad::Result head;
  if (us > u0) head = quad::adaptive(G, u0, us, {0.0, 0.1 * rel, 4000});
  quad::Result tail = quad::detail::walk_log(G, us, +1, 745.0, {}, rel, 0.0, head.value);
  head += tail;
  if (!head.converged || !std::isfinite(head.value))
    throw QuadratureError("laplace_exponent did not converge", head.value, head.error);
  return head.value;
}

struct LaplaceTable::Impl {
  double x0, h;
  double slope_hi;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
  double y0, y1;
};

namespace {
constexpr double kTabLo = -40.0, kTabHi = 470.0, kTabStep = 0.1;
}

LaplaceTable::LaplaceTable(const SubordinatorSpec& spec) : spec_(spec) {
  require_spec(spec);
  const int n = static_cast<int>(std::lround((kTabHi - kTabLo) / kTabStep)) + 1;
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = std::log(laplace_exponent(spec, std::exp(kTabLo + i * kTabStep), 1e-12));
  const double slope = (y[n - 1] - y[n - 2]) / kTabStep;
  const double y0 = y.front(), y1 = y.back();
  auto impl = std::make_shared<Impl>(Impl{kTabLo, kTabStep, slope,
                                          boost::math::interpolators::cardinal_cubic_b_spline<double>(
                                              y.begin(), y.end(), kTabLo, kTabStep),
                                          y0, y1});
  impl_ = impl;
}

double LaplaceTable::operator()(double lambda) const {
  if (lambda <= 0.0) return 0.0;
  const double x = std::log(lambda);
  if (x <= kTabLo) return std::exp(impl_->y0 + (x - kTabLo));  // Phi linear near 0
  if (x >= kTabHi) return std::exp(impl_->y1 + impl_->slope_hi * (x - kTabHi));
  return std::exp(impl_->spline(x));
}

Bracket measure_subordinator_bracket(const SubordinatorSpec& spec,
                                     const std::vector<double>& lambdas) {
  Bracket b{kInf, 0.0};
  for (double l : lambdas) {
    if (!(l > std::numbers::e)) throw InvalidArgument("bracket grid must lie above e");
    const double r = laplace_exponent(spec, l) /
                     (std::pow(l, spec.p) * std::pow(std::log(l), 0.5 * spec.q_log));
    b.lo = std::min(b.lo, r);
    b.hi = std::max(b.hi, r);
  }
  return b;
}

struct CharExponent::Table {
  std::vector<double> r, v;
  double tail_power = 0.0;
  std::unique_ptr<boost::math::interpolators::pchip<std::vector<double>>> spline;
};

CharExponent::CharExponent(Family family, int dim) : family_(std::move(family)), dim_(dim) {
  if (dim < 1) throw InvalidArgument("dimension must be positive");
  if (const auto* s = std::get_if<IsotropicStable>(&family_)) {
    if (!(s->index > 0.0 && s->index <= 2.0)) throw InvalidArgument("stable index must lie in (0, 2]");
    if (!(s->scale > 0.0)) throw InvalidArgument("stable scale must be positive");
  } else if (const auto* c = std::get_if<CoordinateStable>(&family_)) {
    if (!(c->index > 0.0 && c->index <= 2.0)) throw InvalidArgument("stable index must lie in (0, 2]");
    if (!(c->scale > 0.0)) throw InvalidArgument("stable scale must be positive");
  } else if (const auto* b = std::get_if<SubordinatedBrownian>(&family_)) {
    require_spec(b->spec);
  } else {
    const auto& t = std::get<TableDriven>(family_);
    const std::size_t n = t.radius.size();
    if (n < 2 || t.value.size() != n) throw InvalidArgument("table needs >= 2 matching samples");
    for (std::size_t i = 0; i < n; ++i) {
      if (!(t.radius[i] > 0.0) || (i > 0 && !(t.radius[i] > t.radius[i - 1])))
        throw InvalidArgument("table radii must be positive and increasing");
      if (!(t.value[i] >= 0.0) || !std::isfinite(t.value[i]))
        throw InvalidArgument("table values must be finite and nonnegative");
    }
    auto tab = std::make_shared<Table>();
    tab->r = t.radius;
    tab->v = t.value;
    const double a = t.value[n - 2], z = t.value[n - 1];
    if (a > 0.0 && z > 0.0)
      tab->tail_power = std::log(z / a) / std::log(t.radius[n - 1] / t.radius[n - 2]);
    if (tab->tail_power > 2.0 + 1e-12)
      throw InvalidArgument("table grows faster than |xi|^2 at infinity");
    if (n >= 4) {
      tab->spline = std::make_unique<boost::math::interpolators::pchip<std::vector<double>>>(
          std::vector<double>(t.radius), std::vector<double>(t.value));
    }
    table_ = tab;
  }
}

std::string CharExponent::family_name() const {
  switch (family_.index()) {
    case 0:
      return "isotropic_stable";
    case 1:
      return "subordinated_brownian";
    case 2:
      return "coordinate_stable";
    default:
      return "table";
  }
}

bool CharExponent::radial() const {
  return dim_ == 1 || !std::holds_alternative<CoordinateStable>(family_);
}

double CharExponent::re_psi_radial(double rho) const {
  rho = std::abs(rho);
  if (rho == 0.0) return 0.0;
  if (const auto* s = std::get_if<IsotropicStable>(&family_)) return s->scale * std::pow(rho, s->index);
  if (const auto* b = std::get_if<SubordinatedBrownian>(&family_))
    return laplace_exponent(b->spec, 0.5 * rho * rho);
  if (const auto* c = std::get_if<CoordinateStable>(&family_)) {
    if (dim_ != 1) throw Unsupported("coordinate-stable exponent is not radial");
    return c->scale * std::pow(rho, c->index);
  }
  const Table& t = *table_;
  if (rho <= t.r.front()) return t.v.front() * (rho / t.r.front()) * (rho / t.r.front());
  if (rho >= t.r.back()) {
    if (t.tail_power == 0.0) return t.v.back();
    return t.v.back() * std::pow(rho / t.r.back(), t.tail_power);
  }
  if (t.spline) return std::max(0.0, (*t.spline)(rho));
  // Fewer than four samples: linear in between.
  const auto it = std::upper_bound(t.r.begin(), t.r.end(), rho);
  const std::size_t i = static_cast<std::size_t>(it - t.r.begin()) - 1;
  const double w = (rho - t.r[i]) / (t.r[i + 1] - t.r[i]);
  return (1.0 - w) * t.v[i] + w * t.v[i + 1];
}

double CharExponent::re_psi_axis(double rho) const {
  if (const auto* c = std::get_if<CoordinateStable>(&family_)) return c->scale * std::pow(std::abs(rho), c->index);
  return re_psi_radial(rho);
}

double CharExponent::re_psi(std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != dim_) throw InvalidArgument("re_psi: wrong dimension");
  if (const auto* c = std::get_if<CoordinateStable>(&family_)) {
    double s = 0.0;
    for (double x : xi) s += std::pow(std::abs(x), c->index);
    return c->scale * s;
  }
  double n2 = 0.0;
  for (double x : xi) n2 += x * x;
  return re_psi_radial(std::sqrt(n2));
}

PowerLog CharExponent::growth() const {
  if (const auto* s = std::get_if<IsotropicStable>(&family_)) return {s->index, 0.0, false};
  if (const auto* c = std::get_if<CoordinateStable>(&family_)) return {c->index, 0.0, false};
  if (const auto* b = std::get_if<SubordinatedBrownian>(&family_))
    return {2.0 * b->spec.p, 0.5 * b->spec.q_log, false};
  return {table_->tail_power, 0.0, false};
}

PowerLog CharExponent::origin() const {
  if (const auto* s = std::get_if<IsotropicStable>(&family_)) return {s->index, 0.0, false};
  if (const auto* c = std::get_if<CoordinateStable>(&family_)) return {c->index, 0.0, false};
  return {2.0, 0.0, false};
}

double CharExponent::radius_where(double level) const {
  if (level <= 0.0) return 0.0;
  auto f = [&](double u) { return re_psi_axis(std::exp(u)); };
  double lo = -60.0, hi = 230.0;
  if (f(hi) < level) return kInf;
  if (f(lo) >= level) return std::exp(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++i) {
    const double m = 0.5 * (lo + hi);
    (f(m) >= level ? hi : lo) = m;
  }
  return std::exp(hi);
}

bool CharExponent::simulable() const { return std::holds_alternative<IsotropicStable>(family_); }

namespace {

// Radial integral \int_R^inf exp(-t Re Psi(rho)) rho^{d-1} d rho, or the
// one-dimensional version along an axis.
quad::Result hawkes_tail(const CharExponent& e, double t, double R, int d) {
  auto g = [&](double rho) { return std::exp(-t * e.re_psi_axis(rho)) * std::pow(rho, d - 1); };
  return quad::tail_segment(g, R, 1e-8, 1e-300);
}

}  // namespace

Decision hawkes_condition(const CharExponent& e, double t) {
  if (!(t > 0.0)) throw InvalidArgument("hawkes_condition needs t > 0");
  const PowerLog g = e.growth();
  // Non-radial coordinate families factor into one-dimensional integrals.
  const int d = e.radial() ? e.dim() : 1;
  Decision analytic;
  if (g.power > 1e-12) {
    analytic = Decision::Yes;
  } else if (g.power < -1e-12) {
    analytic = Decision::No;
  } else if (g.log_power > 1.0) {
    analytic = Decision::Yes;
  } else if (g.log_power < 1.0) {
    analytic = Decision::No;
  } else {
    analytic = Decision::Indeterminate;  // exp(-c t log rho) needs the constant c
  }
  if (analytic != Decision::Yes) return analytic;
  const quad::Result tail = hawkes_tail(e, t, 1.0, d);
  if (!tail.converged || !std::isfinite(tail.value)) return Decision::Indeterminate;
  return Decision::Yes;
}

Decision has_transition_densities(const CharExponent& e) {
  if (e.dim() == 1) return hawkes_condition(e, 1.0);
  if (!e.radial()) throw Unsupported("transition-density criterion needs a radial exponent in d >= 2");
  const PowerLog g = e.growth();
  if (g.power > 1e-12 || (std::abs(g.power) <= 1e-12 && g.log_power > 0.0)) return Decision::Yes;
  return Decision::No;
}

namespace {

double radial_density(const CharExponent& e, double t, double r, int d) {
  const double R = e.radius_where(46.0 / t);
  auto g = [&](double rho) { return std::exp(-t * e.re_psi_axis(rho)) * std::pow(rho, d - 1); };
  quad::Result res;
  if (r == 0.0) {
    res = quad::origin_segment(g, R, 1e-12, 1e-300);
  } else {
    quad::OscillatoryOptions opt;
    opt.rel = 1e-12;
    opt.abs = 1e-18;
    opt.cutoff = R;
    opt.max_panels = 200000;
    res = quad::oscillatory(
        g, [d](double z) { return spectral::spherical_kernel(d, z); },
        [d](int k) { return spectral::spherical_kernel_zero(d, k); }, r, opt);
  }
  if (!res.converged) throw QuadratureError("transition_density inversion", res.value, res.error);
  return spectral::fourier_norm(d) * spectral::sphere_area(d) * res.value;
}

}  // namespace

double transition_density(const CharExponent& e, double t, std::span<const double> x) {
  if (static_cast<int>(x.size()) != e.dim()) throw InvalidArgument("transition_density: wrong dimension");
  if (hawkes_condition(e, t) != Decision::Yes)
    throw DensityUnavailable("exp(-t Re Psi) is not known to be integrable");
  if (!e.radial()) {
    double prod = 1.0;
    for (double xj : x) prod *= radial_density(e, t, std::abs(xj), 1);
    return prod;
  }
  double n2 = 0.0;
  for (double v : x) n2 += v * v;
  return radial_density(e, t, std::sqrt(n2), e.dim());
}

}  // namespace sheq
