#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sheq/asymptotics.hpp"

namespace sheq {

/// Levy measure density x^{-1-p} (log 1/x)^{q_log/2} on (0, 1/2).
struct SubordinatorSpec {
  double p = 0.5;
  double q_log = 0.0;
};

/// Phi(lambda) = \int (1 - e^{-lambda x}) Pi(dx). Throws QuadratureError if
/// the integral does not settle.
double laplace_exponent(const SubordinatorSpec& spec, double lambda, double rel = 1e-12);

/// Cubic B-spline of log Phi against log lambda on a uniform grid; used where
/// Phi is evaluated millions of times. Relative error below 1e-7.
class LaplaceTable {
 public:
  explicit LaplaceTable(const SubordinatorSpec& spec);
  double operator()(double lambda) const;
  const SubordinatorSpec& spec() const { return spec_; }

 private:
  struct Impl;
  SubordinatorSpec spec_;
  std::shared_ptr<const Impl> impl_;
};

/// Min and max of Phi(lambda) / (lambda^p (log lambda)^{q_log/2}) over the
/// given lambdas (all > e).
struct Bracket {
  double lo;
  double hi;
};
Bracket measure_subordinator_bracket(const SubordinatorSpec& spec,
                                     const std::vector<double>& lambdas);

/// Re Psi(xi) = scale |xi|^index.
struct IsotropicStable {
  double index = 2.0;
  double scale = 1.0;
};

/// Psi(xi) = Phi(|xi|^2 / 2).
struct SubordinatedBrownian {
  SubordinatorSpec spec;
};

/// Re Psi(xi) = scale sum_j |xi_j|^index. Not radial for d >= 2.
struct CoordinateStable {
  double index = 2.0;
  double scale = 1.0;
};

/// Radial profile rho -> Re Psi sampled at increasing radii. Monotone cubic
/// between samples, quadratic below the first one, and the power law
/// through the last two samples beyond the last.
struct TableDriven {
  std::vector<double> radius;
  std::vector<double> value;
};

class CharExponent {
 public:
  using Family = std::variant<IsotropicStable, SubordinatedBrownian, CoordinateStable, TableDriven>;

  CharExponent(Family family, int dim);

  static CharExponent stable(double index, double scale, int dim) {
    return CharExponent(IsotropicStable{index, scale}, dim);
  }

  int dim() const { return dim_; }
  const Family& family() const { return family_; }
  std::string family_name() const;
  bool radial() const;
  /// Re Psi depends on xi only through |xi_1|, ..., |xi_d|.
  bool coordinate_symmetric() const { return true; }

  double re_psi(std::span<const double> xi) const;
  /// Radial profile; throws Unsupported for non-radial families in d >= 2.
  double re_psi_radial(double rho) const;
  /// Re Psi along the first axis, defined for every family.
  double re_psi_axis(double rho) const;

  /// Declared behaviour of Re Psi as rho -> inf and rho -> 0 (along rays).
  PowerLog growth() const;
  PowerLog origin() const;

  /// Smallest rho (found by bisection) with Re Psi(rho) >= level, or +inf.
  double radius_where(double level) const;

  /// Brownian or isotropic stable: paths can be sampled exactly.
  bool simulable() const;

 private:
  struct Table;
  Family family_;
  int dim_;
  std::shared_ptr<const Table> table_;
};

/// exp(-t Re Psi) in L^1(R^d), by the growth of Re Psi with a confirming
/// tail quadrature.
Decision hawkes_condition(const CharExponent& e, double t);

/// For radial exponents in d >= 2: Re Psi -> inf at infinity. In d = 1 the
/// Hawkes criterion at t = 1 decides. Non-radial input in d >= 2 throws
/// Unsupported.
Decision has_transition_densities(const CharExponent& e);

/// p_t(x) by Fourier inversion of exp(-t Re Psi). Throws DensityUnavailable
/// unless hawkes_condition(e, t) is Yes.
double transition_density(const CharExponent& e, double t, std::span<const double> x);

}  // namespace sheq
