#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>

#include "sheq/asymptotics.hpp"
#include "sheq/levy.hpp"

namespace sheq {

/// f(x) = c |x|^{-(d-b)}, f^(xi) = c C_{d,b} |xi|^{-b},
/// C_{d,b} = pi^{d/2} 2^b Gamma(b/2) / Gamma((d-b)/2).
struct Riesz {
  double b = 0.5;
  double c = 1.0;
};

/// f(x) = c1 exp(-c2 |x|^alpha).
///   alpha = 2: f^ = c1 (pi/c2)^{d/2} exp(-|xi|^2 / (4 c2));
///   alpha = 1: f^ = c1 2^d pi^{(d-1)/2} Gamma((d+1)/2) c2 / (c2^2 + |xi|^2)^{(d+1)/2};
///   otherwise a numeric Hankel transform.
struct OrnsteinUhlenbeck {
  double c1 = 1.0;
  double c2 = 1.0;
  double alpha = 2.0;
};

/// f(x) = c1 (|x|^2 + c2)^{-(d+1)/2},
/// f^ = c1 pi^{(d+1)/2} / (Gamma((d+1)/2) sqrt(c2)) exp(-sqrt(c2) |xi|).
struct Poisson {
  double c1 = 1.0;
  double c2 = 1.0;
};

/// f(x) = c1 / prod_j (c2 + x_j^2), f^ = c1 (pi / sqrt c2)^d exp(-sqrt(c2) sum_j |xi_j|).
struct Cauchy {
  double c1 = 1.0;
  double c2 = 1.0;
};

/// Spectral-only: f^(xi) = 1 / (1 + Phi(|xi|^2/2)) for the subordinator with
/// p = a/2, q_log = 2 b_log, so f^ ~ |xi|^{-a} (log |xi|)^{-b_log}. 0 < a < 2.
struct LogCorrected {
  double a = 1.0;
  double b_log = 0.0;
};

/// Arbitrary spectral density, for tests and checker sanity runs.
struct CustomSpectral {
  std::function<double(std::span<const double>)> f_hat;
  bool radial = false;
  std::string label = "custom";
};

class CorrelationKernel {
 public:
  using Family = std::variant<Riesz, OrnsteinUhlenbeck, Poisson, Cauchy, LogCorrected, CustomSpectral>;

  CorrelationKernel(Family family, int dim);

  int dim() const { return dim_; }
  const Family& family() const { return family_; }
  std::string family_name() const;

  bool radial() const;
  bool spatial_eval_available() const;
  bool condition2_certified() const { return condition2_; }
  bool lower_semicontinuous() const;
  /// f(0) < inf.
  bool bounded_at_zero() const;

  /// f(x); +inf at x = 0 for Riesz. Throws Unsupported for spectral-only kernels.
  double f(std::span<const double> x) const;
  double f_radial(double r) const;
  double f_hat(std::span<const double> xi) const;
  /// f^ along the first axis (the radial profile for radial kernels).
  double f_hat_axis(double rho) const;

  /// Declared behaviour of f^ at infinity and at the origin along rays;
  /// custom kernels return fitted exponents.
  PowerLog decay() const;
  PowerLog origin() const;

 private:
  struct Cache;
  Family family_;
  int dim_;
  bool condition2_ = false;
  std::shared_ptr<const Cache> cache_;
};

struct DefiniteReport {
  bool ok;
  double min_eigenvalue;  ///< smallest circulant eigenvalue of the lattice covariance
  double max_eigenvalue;
  double min_covariance;  ///< smallest lattice covariance value, for information
};

/// Lattice covariance c = inverse DFT of f^ samples on the n^d torus of side
/// L (zero mode dropped when f^(0) = inf); its circulant eigenvalues must be
/// >= -1e-8 max. d <= 3.
DefiniteReport check_positive_definite(const CorrelationKernel& k, int n, double L);

/// Reflection symmetry in each coordinate and coordinate-wise monotone
/// decrease of f^ on sampled rays.
bool check_condition2(const CorrelationKernel& k, int samples_per_axis = 64);

/// Riesz constant C_{d,b}.
double riesz_constant(int d, double b);

}  // namespace sheq
