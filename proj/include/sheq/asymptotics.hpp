#pragma once

#include <array>
#include <functional>
#include <vector>
#include <string>

namespace sheq {

enum class Decision { No, Yes, Indeterminate };

const char* to_string(Decision d);

/// h(rho) ~ C rho^power |log rho|^log_power at an endpoint. `rapid` marks
/// decay (or growth) faster than every power; power is then meaningless.
struct PowerLog {
  double power = 0.0;
  double log_power = 0.0;
  bool rapid = false;
};

/// Sum of exponents (product of functions).
PowerLog operator*(const PowerLog& a, const PowerLog& b);
/// Exponents of 1 / h.
PowerLog reciprocal(const PowerLog& a);

/// Whether \int^inf h converges for h with the given tail behaviour. `tol`
/// widens the tie zone around power = -1 (and log_power = -1 on a tie);
/// inside it the answer is Indeterminate.
Decision tail_integrable(const PowerLog& h, double tol = 1e-12, double log_tol = 1e-12);

/// Whether \int_0 h converges for h ~ rho^power |log rho|^log_power at 0+.
Decision origin_integrable(const PowerLog& h, double tol = 1e-12, double log_tol = 1e-12);

/// Least-squares fit of log h = c + power log rho + log_power log log rho
/// on n log-spaced rho in [rho_lo, rho_hi] (rho_lo > e). Samples with h <= 0
/// or non-finite are dropped; `rapid` is set when the local power keeps
/// falling below -50.
PowerLog fit_power_log(const std::function<double(double)>& h, double rho_lo, double rho_hi,
                       int n = 48);

/// Same near the origin: rho in [rho_lo, rho_hi] with rho_hi < 1/e, using
/// log log(1/rho).
PowerLog fit_power_log_origin(const std::function<double(double)>& h, double rho_lo,
                              double rho_hi, int n = 48);

/// Tolerances used when classifying fitted (rather than declared) exponents.
inline constexpr double kFitPowerTol = 0.01;
inline constexpr double kFitLogTol = 0.2;

std::string describe(const PowerLog& h);

/// Coefficients (c0, c1, c2) of the least-squares fit z ~ c0 + c1 x + c2 y.
std::array<double, 3> least_squares3(const std::vector<double>& x, const std::vector<double>& y,
                                     const std::vector<double>& z);

}  // namespace sheq
