#include "sheq/asymptotics.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

namespace sheq {

const char* to_string(Decision d) {
  switch (d) {
    case Decision::No:
      return "false";
    case Decision::Yes:
      return "true";
    case Decision::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

PowerLog operator*(const PowerLog& a, const PowerLog& b) {
  PowerLog r;
  r.power = a.power + b.power;
  r.log_power = a.log_power + b.log_power;
  r.rapid = a.rapid || b.rapid;
  return r;
}

PowerLog reciprocal(const PowerLog& a) { return {-a.power, -a.log_power, false}; }

Decision tail_integrable(const PowerLog& h, double tol, double log_tol) {
  if (h.rapid) return Decision::Yes;
  if (h.power < -1.0 - tol) return Decision::Yes;
  if (h.power > -1.0 + tol) return Decision::No;
  if (h.log_power < -1.0 - log_tol) return Decision::Yes;
  if (h.log_power > -1.0 + log_tol) return Decision::No;
  // log_power == -1 exactly still diverges (log log growth); only a fitted
  // value in the tie zone is undecidable.
  return log_tol <= 1e-12 ? Decision::No : Decision::Indeterminate;
}

Decision origin_integrable(const PowerLog& h, double tol, double log_tol) {
  if (h.power > -1.0 + tol) return Decision::Yes;
  if (h.power < -1.0 - tol) return Decision::No;
  if (h.log_power < -1.0 - log_tol) return Decision::Yes;
  if (h.log_power > -1.0 + log_tol) return Decision::No;
  return log_tol <= 1e-12 ? Decision::No : Decision::Indeterminate;
}

std::array<double, 3> least_squares3(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& z) {
  double m[3][4] = {};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double row[3] = {1.0, x[i], y[i]};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m[a][b] += row[a] * row[b];
      m[a][3] += row[a] * z[i];
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    for (int k = 0; k < 4; ++k) std::swap(m[c][k], m[piv][k]);
    for (int r = 0; r < 3; ++r) {
      if (r == c || m[c][c] == 0.0) continue;
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

namespace {

PowerLog fit_generic(const std::function<double(double)>& h, double rho_lo, double rho_hi,
                     int n, bool origin) {
  std::vector<double> lx, llx, lh;
  const double a = std::log(rho_lo), b = std::log(rho_hi);
  for (int i = 0; i < n; ++i) {
    const double u = a + (b - a) * i / (n - 1);
    const double v = h(std::exp(u));
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    lx.push_back(u);
    llx.push_back(std::log(std::abs(u)));
    lh.push_back(std::log(v));
  }
  PowerLog r;
  if (lx.size() < 4) {
    // Everything underflowed: faster than any power at infinity.
    r.rapid = !origin;
    r.power = origin ? 0.0 : -1e300;
    return r;
  }
  // Rapid decay shows up as a steepening local slope.
  const std::size_t k = lx.size();
  const double slope_end = (lh[k - 1] - lh[k - 2]) / (lx[k - 1] - lx[k - 2]);
  const double slope_mid = (lh[k / 2] - lh[k / 2 - 1]) / (lx[k / 2] - lx[k / 2 - 1]);
  if (!origin && slope_end < -50.0 && slope_end < 1.5 * slope_mid) {
    r.rapid = true;
    r.power = slope_end;
    return r;
  }
  const auto c = least_squares3(lx, llx, lh);
  r.power = c[1];
  r.log_power = c[2];
  return r;
}

}  // namespace

PowerLog fit_power_log(const std::function<double(double)>& h, double rho_lo, double rho_hi,
                       int n) {
  return fit_generic(h, rho_lo, rho_hi, n, false);
}

PowerLog fit_power_log_origin(const std::function<double(double)>& h, double rho_lo,
                              double rho_hi, int n) {
  return fit_generic(h, rho_lo, rho_hi, n, true);
}

std::string describe(const PowerLog& h) {
  std::ostringstream os;
  if (h.rapid) return "faster than any power";
  os << "rho^" << h.power;
  if (h.log_power != 0.0) os << " |log rho|^" << h.log_power;
  return os.str();
}

}  // namespace sheq
