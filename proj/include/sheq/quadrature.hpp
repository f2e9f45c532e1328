#pragma once

// Adaptive Gauss-Kronrod quadrature plus the two integrators every spectral
// formula in the library is built on:
//   * half_line:   nonnegative integrands on (0, inf) with algebraic/log
//                  singularities at 0 and slow algebraic decay at infinity,
//                  handled by the substitution rho = s * e^u;
//   * oscillatory: g(rho) K(rho r) on (0, inf) where K has known zeros
//                  (cos, sinc, Bessel), summed between zeros with Wynn's
//                  epsilon acceleration.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

namespace sheq::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;

  Result& operator+=(const Result& o) {
    value += o.value;
    error += o.error;
    evaluations += o.evaluations;
    converged = converged && o.converged;
    return *this;
  }
};

struct Tolerance {
  double abs = 0.0;
  double rel = 1e-10;
  int max_intervals = 4000;
};

namespace detail {

// QUADPACK qk21 abscissae (positive half) and weights.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478002, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// 10-point Gauss weights attached to kXgk[1], kXgk[3], ..., kXgk[9].
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace detail

/// One 21-point Kronrod panel; error is |K21 - G10|.
template <class F>
Result gauss_kronrod21(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * detail::kWgk[10];
  double g = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double dx = h * detail::kXgk[i];
    const double s = f(c - dx) + f(c + dx);
    k += detail::kWgk[i] * s;
    if (i % 2 == 1) g += detail::kWg[i / 2] * s;
  }
  Result r;
  r.value = k * h;
  r.error = std::abs((k - g) * h);
  r.evaluations = 21;
  if (!std::isfinite(r.value)) r.converged = false;
  return r;
}

/// Globally adaptive bisection on [a, b] (largest-error panel first).
template <class F>
Result adaptive(F&& f, double a, double b, Tolerance tol = {}) {
  if (a == b) return {};
  std::priority_queue<detail::Panel> heap;
  Result first = gauss_kronrod21(f, a, b);
  Result out;
  out.evaluations = first.evaluations;
  heap.push({a, b, first.value, first.error});
  double total = first.value;
  double err = first.error;
  int intervals = 1;
  while (err > std::max(tol.abs, tol.rel * std::abs(total))) {
    if (intervals >= tol.max_intervals || !std::isfinite(total)) {
      out.converged = false;
      break;
    }
    const detail::Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (m <= p.a || m >= p.b) {  // interval exhausted in floating point
      heap.push(p);
      out.converged = false;
      break;
    }
    const Result l = gauss_kronrod21(f, p.a, m);
    const Result r = gauss_kronrod21(f, m, p.b);
    out.evaluations += l.evaluations + r.evaluations;
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    heap.push({p.a, m, l.value, l.error});
    heap.push({m, p.b, r.value, r.error});
    ++intervals;
  }
  // Re-sum to avoid drift from the incremental updates.
  double v = 0.0, e = 0.0;
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().error;
    heap.pop();
  }
  out.value = v;
  out.error = e;
  if (!std::isfinite(v)) out.converged = false;
  return out;
}

/// Asymptotic hint g(rho) ~ C rho^power |log rho|^log_power at an endpoint.
/// When power == -1 the tail is of logarithmic type and the geometric
/// extrapolation in u = log rho no longer applies.
struct EndpointHint {
  double power = std::numeric_limits<double>::quiet_NaN();
  double log_power = 0.0;
  bool log_tied() const { return std::isfinite(power) && std::abs(power + 1.0) < 1e-12; }
};

struct HalfLineOptions {
  double scale = 1.0;  ///< split point between the origin walk and the tail walk
  double rel = 1e-10;
  double abs = 0.0;
  EndpointHint at_zero;
  EndpointHint at_infinity;
  double max_log = 230.0;  ///< walk stops at |log rho| = max_log (rho ~ 1e100)
};

namespace detail {

// Walks panels in u away from u0 (direction +1 or -1) over G(u) >= 0, where
// u + u_shift = log(rho). Once the decay rate in u has stabilised the
// remainder is closed with a geometric tail estimate; log-tied hints use the
// exact tail of C |log rho|^l instead.
template <class G>
Result walk_log(G&& Gu, double u0, int dir, double u_limit,
                const EndpointHint& hint, double rel, double abs_tol,
                double reference, double u_shift = 0.0) {
  Result out;
  double u = u0;
  double kappa_prev = std::numeric_limits<double>::quiet_NaN();
  double g_prev = Gu(u0);
  out.evaluations += 1;
  double u_prev = u0;
  for (int k = 0; k < 100000; ++k) {
    const double w = std::max(1.0, 0.25 * std::abs(u + u_shift));
    double un = u + dir * w;
    bool last = false;
    if (dir * (un - u_limit) >= 0) {
      un = u_limit;
      last = true;
    }
    const double lo = std::min(u, un), hi = std::max(u, un);
    const double ref = std::abs(reference + out.value);
    Result p = adaptive(Gu, lo, hi, {std::max(abs_tol, 0.05 * rel * ref), 0.25 * rel, 2000});
    out += p;
    const double g_now = Gu(un);
    out.evaluations += 1;
    const double total = std::abs(reference + out.value);
    if (!std::isfinite(g_now)) {
      out.converged = false;
      return out;
    }
    // Zero after mass has been collected: the integrand has died out.
    if (g_now == 0.0 && out.value != 0.0) return out;
    if (hint.log_tied()) {
      const double l = hint.log_power;
      const double v = std::abs(un + u_shift);
      if (l < -1.0 && v > 1.0) {
        // G ~ C v^l, remaining integral C v^{l+1} / (-l-1).
        const double tail = g_now * v / (-l - 1.0);
        if (tail <= rel * total + abs_tol || last) {
          out.value += tail;
          out.error += 0.2 * tail;
          return out;
        }
      } else if (last) {
        out.converged = false;
        return out;
      }
    } else if (g_prev > 0.0) {
      const double kappa = std::log(g_prev / g_now) / std::abs(un - u_prev);
      const bool stable = kappa > 1e-3 && std::isfinite(kappa_prev) &&
                          std::abs(kappa - kappa_prev) <= 0.05 * kappa;
      if (stable && g_now / kappa <= rel * total + abs_tol) {
        out.value += g_now / kappa;
        out.error += 0.1 * g_now / kappa;
        return out;
      }
      if (last) {
        if (kappa > 1e-3) {
          const double tail = g_now / kappa;
          out.value += tail;
          out.error += tail;
          if (tail > 1e3 * (rel * total + abs_tol)) out.converged = false;
        } else {
          out.converged = false;
        }
        return out;
      }
      kappa_prev = kappa;
    } else if (last) {
      return out;
    }
    g_prev = g_now;
    u_prev = un;
    u = un;
  }
  out.converged = false;
  return out;
}

}  // namespace detail

/// Integral of a nonnegative g over (0, inf). Singularities at 0 must be
/// integrable; decay at infinity may be as slow as rho^{-1} |log rho|^{l}
/// with l < -1 when the matching hint is supplied.
template <class F>
Result half_line(F&& g, const HalfLineOptions& opt = {}) {
  const double s = opt.scale;
  const double ls = std::log(s);
  auto Gu = [&](double u) {
    const double rho = s * std::exp(u);
    if (rho == 0.0 || !std::isfinite(rho)) return 0.0;
    return g(rho) * rho;
  };
  // Hints are stated in log(rho); shift them into u = log(rho / s).
  Result right = detail::walk_log(Gu, 0.0, +1, opt.max_log - ls, opt.at_infinity,
                                  opt.rel, opt.abs, 0.0, ls);
  Result left = detail::walk_log(Gu, 0.0, -1, -opt.max_log - ls, opt.at_zero,
                                 opt.rel, opt.abs, right.value, ls);
  right += left;
  return right;
}

/// Integral of g over (0, b] by walking u = log(rho/b) down to -inf.
template <class F>
Result origin_segment(F&& g, double b, double rel, double abs_tol,
                      const EndpointHint& at_zero = {}, double max_log = 230.0) {
  auto Gu = [&](double u) {
    const double rho = b * std::exp(u);
    if (rho == 0.0) return 0.0;
    return g(rho) * rho;
  };
  return detail::walk_log(Gu, 0.0, -1, -max_log - std::log(b), at_zero, rel, abs_tol, 0.0,
                          std::log(b));
}

/// Integral of g over [a, inf) by walking u = log(rho/a) up to max_log.
template <class F>
Result tail_segment(F&& g, double a, double rel, double abs_tol, double reference = 0.0,
                    const EndpointHint& at_infinity = {}, double max_log = 230.0) {
  auto Gu = [&](double u) {
    const double rho = a * std::exp(u);
    if (!std::isfinite(rho)) return 0.0;
    return g(rho) * rho;
  };
  return detail::walk_log(Gu, 0.0, +1, max_log - std::log(a), at_infinity, rel, abs_tol,
                          reference, std::log(a));
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
inline double wynn_epsilon(const std::vector<double>& s) {
  const std::size_t n = s.size();
  if (n < 3) return s.empty() ? 0.0 : s.back();
  std::vector<double> prev(n + 1, 0.0);  // eps_{k-1}
  std::vector<double> cur(s.begin(), s.end());  // eps_k
  double best = s.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(n - k);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const double d = cur[i + 1] - cur[i];
      if (d == 0.0) return (k % 2 == 1) ? cur[i + 1] : best;
      next[i] = prev[i + 1] + 1.0 / d;
    }
    if (k % 2 == 0) best = next.back();
    prev = std::move(cur);
    cur = std::move(next);
  }
  return best;
}

struct OscillatoryOptions {
  double rel = 1e-10;
  double abs = 1e-15;
  double cutoff = std::numeric_limits<double>::infinity();  ///< hard truncation in rho
  int max_panels = 20000;
  EndpointHint at_zero;
};

namespace detail {

// Sums panels between consecutive zeros z_k/r, z_{k+1}/r for k >= k0,
// starting from the partial value `start`.
template <class I, class Z>
Result zero_panels(I&& integrand, Z&& zero, double r, int k0, Result start,
                   const OscillatoryOptions& opt) {
  Result out = start;
  double b = zero(k0) / r;
  std::vector<double> sums{out.value};
  double last_est = out.value;
  int stable = 0;
  for (int k = k0; k < k0 + opt.max_panels; ++k) {
    const double a = b;
    b = zero(k + 1) / r;
    bool last = false;
    if (b >= opt.cutoff) {
      b = opt.cutoff;
      last = true;
    }
    const double ref = std::abs(last_est);
    Result p = adaptive(integrand, a, b,
                        {std::max(opt.abs, 0.01 * opt.rel * ref), 1e-3 * opt.rel, 400});
    out.error += p.error;
    out.evaluations += p.evaluations;
    out.converged = out.converged && p.converged;
    sums.push_back(sums.back() + p.value);
    if (last || std::abs(p.value) <= 1e-3 * (opt.rel * std::abs(sums.back()) + opt.abs)) {
      out.value = sums.back();
      return out;
    }
    if (sums.size() >= 7) {
      const std::size_t m = std::min<std::size_t>(sums.size(), 25);
      std::vector<double> tail(sums.end() - static_cast<long>(m), sums.end());
      const double est = wynn_epsilon(tail);
      if (std::abs(est - last_est) <= opt.rel * std::abs(est) + opt.abs) {
        if (++stable >= 2) {
          out.value = est;
          out.error += std::abs(est - last_est);
          return out;
        }
      } else {
        stable = 0;
      }
      last_est = est;
    } else {
      last_est = sums.back();
    }
  }
  out.value = last_est;
  out.converged = false;
  return out;
}

}  // namespace detail

/// Integral over (0, cutoff) of g(rho) K(rho r), where zero(k), k = 1, 2, ...,
/// lists the positive zeros of K in increasing order and K > 0 before the
/// first zero.
template <class F, class K, class Z>
Result oscillatory(F&& g, K&& kernel, Z&& zero, double r, const OscillatoryOptions& opt = {}) {
  auto integrand = [&](double rho) { return g(rho) * kernel(rho * r); };
  const double b = zero(1) / r;
  if (b >= opt.cutoff) return origin_segment(integrand, opt.cutoff, opt.rel, opt.abs, opt.at_zero);
  Result head = origin_segment(integrand, b, opt.rel, opt.abs, opt.at_zero);
  return detail::zero_panels(integrand, zero, r, 1, head, opt);
}

/// Integral over (zero(k0)/r, cutoff) of g(rho) K(rho r).
template <class F, class K, class Z>
Result oscillatory_tail(F&& g, K&& kernel, Z&& zero, double r, int k0,
                        const OscillatoryOptions& opt = {}) {
  auto integrand = [&](double rho) { return g(rho) * kernel(rho * r); };
  return detail::zero_panels(integrand, zero, r, k0, Result{}, opt);
}

}  // namespace sheq::quad
