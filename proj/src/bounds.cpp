#include "sheq/bounds.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "sheq/errors.hpp"

namespace sheq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const BisectionSettings kBis{};

// Boundary of the level set of a nonincreasing F: returns the point where F
// crosses `target`. F(0+) is supplied when known; if it is already below
// the target the boundary is 0.
struct Crossing {
  double value;
  BoundStatus status;
};

Crossing crossing_unguarded(const std::function<double(double)>& F, double target, std::optional<double> f0) {
  if (f0 && *f0 < target) return {0.0, BoundStatus::Ok};
  double lo = 1.0, hi = 1.0;
  if (F(1.0) < target) {
    // Walk down until F >= target.
    while (true) {
      lo = hi / 4.0;
      if (lo < 1e-300) return {0.0, BoundStatus::Ok};
      if (F(lo) >= target) break;
      hi = lo;
    }
  } else {
    while (true) {
      hi = lo * 4.0;
      if (hi > kBis.cap) return {kInf, BoundStatus::Indeterminate};
      if (F(hi) < target) break;
      lo = hi;
    }
  }
  for (int i = 0; i < kBis.max_iter && hi / lo - 1.0 > kBis.rel; ++i) {
    const double m = std::sqrt(lo * hi);
    (F(m) < target ? hi : lo) = m;
  }
  return {0.5 * (lo + hi), BoundStatus::Ok};
}

Crossing crossing(const std::function<double(double)>& F, double target, std::optional<double> f0) {
  try {
    return crossing_unguarded(F, target, f0);
  } catch (const QuadratureError&) {
    return {kInf, BoundStatus::Indeterminate};
  }
}

double ups(const ModelSpec& m, double beta) {
  const UpsilonValue v = upsilon(m, beta);
  if (v.status == Finiteness::Indeterminate)
    throw QuadratureError("Upsilon undetermined during bisection", v.value, v.error);
  return v.value;
}

// Upsilon(0), or value + error when the quadrature stalls short of its
// tolerance but is still resolved to 1e-3; only ever compared from above.
std::optional<double> ups0(const ModelSpec& m) {
  const UpsilonValue v = upsilon(m, 0.0);
  if (v.status != Finiteness::Indeterminate) return v.value;
  if (std::isfinite(v.value) && v.error <= 1e-3 * std::abs(v.value)) return v.value + v.error;
  return std::nullopt;
}

BoundResult from(const Crossing& c, std::string note = {}) {
  BoundResult r;
  r.value = c.value;
  r.status = c.status;
  r.note = std::move(note);
  if (c.status == BoundStatus::Indeterminate && r.note.empty())
    r.note = "level not reached below the bisection cap, or Upsilon unresolved on the way";
  return r;
}

std::optional<std::string> lower_preconditions(const ModelSpec& m) {
  if (!m.kernel.condition2_certified())
    return "spectral density is not certified coordinate-symmetric and nonincreasing";
  if (!m.exponent.radial() && !std::holds_alternative<CoordinateStable>(m.exponent.family()))
    return "Re Psi does not depend only on |xi_j|";
  if (m.initial.kind != InitialData::Kind::Bounded || !(m.initial.inf > 0.0))
    return "initial data must be bounded below by a positive constant";
  return std::nullopt;
}

}  // namespace

double hermite_he(int k, double x) {
  if (k < 0) throw InvalidArgument("Hermite degree must be nonnegative");
  if (k == 0) return 1.0;
  double a = 1.0, b = x;
  for (int n = 1; n < k; ++n) {
    const double c = x * b - n * a;
    a = b;
    b = c;
  }
  return b;
}

double largest_hermite_zero(int p) {
  if (p < 2 || p % 2 != 0) throw InvalidArgument("InvalidOrder: p must be an even integer >= 2");
  // He_p' = p He_{p-1}. Newton from 2 sqrt(p), above every zero, decreases
  // monotonically to the largest one.
  double x = 2.0 * std::sqrt(double(p));
  for (int i = 0; i < 200; ++i) {
    const double step = hermite_he(p, x) / (p * hermite_he(p - 1, x));
    x -= step;
    if (std::abs(step) <= 1e-16 * x) break;
  }
  const double eps = 1e-9 * x;
  if (hermite_he(p, x - eps) * hermite_he(p, x + eps) > 0.0)
    throw QuadratureError("Hermite zero failed the sign-change check", x, eps);
  return x;
}

const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::Ok:
      return "ok";
    case BoundStatus::NotApplicable:
      return "not_applicable";
    case BoundStatus::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

double q_function(const ModelSpec& m, int p, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("Q(p, beta) needs beta > 0");
  const double zp = largest_hermite_zero(p);
  double q = p * m.drift.lip_b / beta;
  if (m.sigma.lip_sigma > 0.0) q += zp * m.sigma.lip_sigma * std::sqrt(ups(m, 2.0 * beta / p));
  return q;
}

BoundResult upper_exponent(const ModelSpec& m, int p) {
  const double zp = largest_hermite_zero(p);
  if (m.drift.lip_b == 0.0 && m.sigma.lip_sigma == 0.0) return {0.0, BoundStatus::Ok, "Q vanishes identically"};
  if (dalang_condition(m) != Decision::Yes)
    return {kInf, BoundStatus::NotApplicable, "Upsilon(1) is not finite"};
  std::optional<double> f0;
  if (m.drift.lip_b == 0.0) {
    if (auto u0 = ups0(m)) f0 = zp * m.sigma.lip_sigma * std::sqrt(*u0);
  }
  auto F = [&](double beta) { return q_function(m, p, beta); };
  return from(crossing(F, 1.0, f0));
}

BoundResult lower_exponent2(const ModelSpec& m) {
  if (m.drift.lip_b != 0.0 || m.drift.mass_lambda)
    return {0.0, BoundStatus::NotApplicable, "drift must vanish"};
  if (!(m.sigma.lower_linear > 0.0)) return {0.0, BoundStatus::NotApplicable, "L_sigma unavailable"};
  if (auto why = lower_preconditions(m)) return {0.0, BoundStatus::NotApplicable, *why};
  const double L = m.sigma.lower_linear;
  const double target = std::pow(2.0, m.d - 1) / (L * L);
  auto F = [&](double beta) { return ups(m, beta); };
  return from(crossing(F, target, ups0(m)));
}

const char* to_string(AsymptoticVerdict v) {
  switch (v) {
    case AsymptoticVerdict::PositiveExponentForLargeEta:
      return "positive_exponent_for_large_eta";
    case AsymptoticVerdict::NotApplicable:
      return "not_applicable";
    case AsymptoticVerdict::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

AsymptoticReport asymptotic_intermittency(const ModelSpec& m) {
  AsymptoticReport r{AsymptoticVerdict::NotApplicable, 0.0, "", ""};
  if (!m.sigma.q_inf || !(*m.sigma.q_inf > 0.0)) {
    r.note = "liminf sigma(z)/|z| must be positive";
    return r;
  }
  if (m.drift.lip_b != 0.0 || m.drift.mass_lambda) {
    r.note = "drift must vanish";
    return r;
  }
  if (dalang_condition(m) != Decision::Yes) {
    r.note = "Upsilon(1) is not finite";
    return r;
  }
  if (auto why = lower_preconditions(m)) {
    r.note = *why;
    return r;
  }
  const double q0 = *m.sigma.q_inf;
  const double target = std::pow(2.0, m.d - 1) / (q0 * q0);
  const UpsilonValue v0 = upsilon(m, 0.0);
  if (v0.status != Finiteness::Divergent) {
    r.verdict = AsymptoticVerdict::Indeterminate;
    r.note = v0.finite() && v0.value < target ? "no beta0 with Upsilon(beta0) >= 2^{d-1}/q^2 exists"
                                             : "Upsilon(0) is finite, so the large-eta criterion does not apply";
    return r;
  }
  const Crossing c = crossing([&](double b) { return ups(m, b); }, target, std::nullopt);
  if (c.status != BoundStatus::Ok || !(c.value > 0.0)) {
    r.verdict = AsymptoticVerdict::Indeterminate;
    r.note = "beta0 search failed";
    return r;
  }
  r.verdict = AsymptoticVerdict::PositiveExponentForLargeEta;
  r.beta0 = c.value;
  std::ostringstream os;
  os.precision(10);
  os << "eta > sqrt(" << c.value << " * A*), A* = max(A^2, 2 |u0|_inf), A not quantified";
  r.eta_threshold = os.str();
  r.note = "sigma >= 0 pointwise is assumed, not checked";
  return r;
}

BoundResult massive_upper(const ModelSpec& m, int p, double lambda) {
  const double zp = largest_hermite_zero(p);
  const double lip = m.sigma.lip_sigma;
  if (lip == 0.0) return {lambda, BoundStatus::Ok, "Lip_sigma = 0"};
  if (dalang_condition(m) != Decision::Yes)
    return {kInf, BoundStatus::NotApplicable, "Upsilon(1) is not finite"};
  const double target = 1.0 / (zp * zp * lip * lip);
  const Crossing c = crossing([&](double a) { return ups(m, a); }, target, ups0(m));
  BoundResult r = from(c);
  if (r.ok()) r.value = lambda + 0.5 * p * c.value;
  return r;
}

BoundResult massive_lower(const ModelSpec& m, double lambda) {
  if (auto why = lower_preconditions(m)) return {lambda, BoundStatus::NotApplicable, *why};
  const double L = m.sigma.lower_linear;
  if (L == 0.0) return {lambda, BoundStatus::Ok, "L_sigma = 0: empty level set"};
  const double target = std::pow(2.0, m.d - 1) / (L * L);
  const Crossing c = crossing([&](double a) { return ups(m, a); }, target, ups0(m));
  BoundResult r = from(c);
  if (r.ok()) r.value = lambda + c.value;
  return r;
}

PhaseThreshold pam_phase_threshold(int d, double q, double b, double kappa) {
  if (kappa == 0.0) return {0.0, 0.0};
  const double A = amplitude_A(d, q, b);
  const double nu = (d - b) / q;
  const double k2 = kappa * kappa;
  return {-std::pow(A * k2 / std::pow(2.0, d - 1), 1.0 / (1.0 - nu)), -std::pow(A * k2, 1.0 / (1.0 - nu))};
}

double pam_threshold_laplacian(double b, double kappa) {
  if (!(b > 0.0 && b < 1.0)) throw InvalidArgument("needs b in (0, 1)");
  const double g = std::tgamma(0.5 * b) * std::tgamma(0.5 * (b + 1.0)) / std::sqrt(std::numbers::pi);
  return -std::pow(std::abs(kappa), 4.0 / (1.0 + b)) * std::pow(8.0, -(1.0 - b) / (1.0 + b)) *
         std::pow(g, 2.0 / (1.0 + b));
}

Decision temperate_existence(const ModelSpec& m) {
  const InitialData& u0 = m.initial;
  if (u0.kind == InitialData::Kind::Bounded)
    throw PreconditionFailed("the temperate criterion needs a finite-measure initial condition");
  const Decision hawkes = hawkes_condition(m.exponent, 1.0);
  if (hawkes != Decision::Yes) return hawkes;
  const Decision dal = dalang_condition(m);
  if (dal != Decision::Yes) return dal;
  const bool has_atoms = u0.kind == InitialData::Kind::Delta || !u0.measure.atoms.empty();
  if (!has_atoms) return Decision::Yes;  // Gaussian components: |u0^| decays like a Gaussian
  // |u0^| does not decay: \int d xi / (1 + 2 Re Psi) decides.
  const PowerLog g = m.exponent.growth();
  PowerLog tail{double(m.d - 1), 0.0, false};
  if (g.power > 0.0 || g.log_power > 0.0) tail = tail * reciprocal(g);
  const Decision analytic = tail_integrable(tail);
  if (analytic != Decision::Yes) return analytic;
  quad::HalfLineOptions opt;
  opt.rel = 1e-8;
  opt.at_infinity.power = tail.power;
  opt.at_infinity.log_power = tail.log_power;
  const int d = m.d;
  auto h = [&](double rho) { return std::pow(rho, d - 1) / (1.0 + 2.0 * m.exponent.re_psi_axis(rho)); };
  const quad::Result r = quad::half_line(h, opt);
  return r.converged && std::isfinite(r.value) ? Decision::Yes : Decision::Indeterminate;
}

BoundResult temperate_upper(const ModelSpec& m, int p) {
  const double zp = largest_hermite_zero(p);
  const double lip = m.sigma.lip_sigma;
  if (lip == 0.0) return {0.0, BoundStatus::Ok, "Lip_sigma = 0"};
  if (dalang_condition(m) != Decision::Yes)
    return {kInf, BoundStatus::NotApplicable, "Upsilon(1) is not finite"};
  const std::optional<double> u0 = ups0(m);
  if (u0 && std::isfinite(*u0) && lip < 1.0 / std::sqrt(2.0 * zp * zp * *u0))
    return {0.0, BoundStatus::Ok, "non-intermittency short-circuit: Lip_sigma < 1/sqrt(2 z_p^2 Upsilon(0))"};
  const double target = 1.0 / (2.0 * zp * zp * lip * lip);
  return from(crossing([&](double b) { return ups(m, b); }, target, u0));
}

const char* to_string(IntermittencyVerdict v) {
  switch (v) {
    case IntermittencyVerdict::WeaklyIntermittent:
      return "WeaklyIntermittent";
    case IntermittencyVerdict::NotWeaklyIntermittent:
      return "NotWeaklyIntermittent";
    case IntermittencyVerdict::Indeterminate:
      return "Indeterminate";
  }
  return "Indeterminate";
}

LyapunovReport lyapunov_report(const ModelSpec& m, int p) {
  LyapunovReport r;
  r.p = p;
  BoundResult upper2;
  if (m.drift.mass_lambda) {
    const double lambda = *m.drift.mass_lambda;
    r.upper = massive_upper(m, p, lambda);
    r.lower2 = massive_lower(m, lambda);
    upper2 = p == 2 ? r.upper : massive_upper(m, 2, lambda);
    r.theorem_refs = {"massive existence bound: lambda + (p/2) inf{alpha: Upsilon(alpha) < 1/(z_p^2 Lip^2)}",
                      "massive intermittency bound: lambda + sup{alpha: Upsilon(alpha) >= 2^{d-1}/L^2}"};
  } else {
    r.upper = upper_exponent(m, p);
    r.lower2 = lower_exponent2(m);
    upper2 = p == 2 ? r.upper : upper_exponent(m, 2);
    r.theorem_refs = {"existence bound: inf{beta: Q(p, beta) < 1}",
                      "intermittency bound: sup{beta: Upsilon(beta) >= 2^{d-1}/L^2}"};
  }
  const bool upper_finite = upper2.ok() && std::isfinite(upper2.value);
  if (r.lower2.ok() && r.lower2.value > 0.0 && upper_finite)
    r.verdict = IntermittencyVerdict::WeaklyIntermittent;
  else if (upper_finite && upper2.value <= 0.0)
    r.verdict = IntermittencyVerdict::NotWeaklyIntermittent;
  else
    r.verdict = IntermittencyVerdict::Indeterminate;
  return r;
}

}  // namespace sheq
