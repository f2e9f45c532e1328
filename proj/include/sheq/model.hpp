#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sheq/kernels.hpp"
#include "sheq/levy.hpp"

namespace sheq {

/// Data on sigma used by the bounds, plus an optional concrete
/// sigma(u) = a + k u for simulation.
struct SigmaSpec {
  double lip_sigma = 0.0;
  double lower_linear = 0.0;  ///< L_sigma; 0 when unavailable
  double sigma0 = 0.0;        ///< |sigma(0)|
  std::optional<double> q_inf;         ///< liminf sigma(z)/|z|
  std::optional<double> linear_kappa;  ///< set when sigma(u) = kappa u
  std::optional<std::pair<double, double>> affine;  ///< (a, k) for simulation

  static SigmaSpec pam(double kappa);
  static SigmaSpec constant(double c);
  void validate() const;
  /// sigma(u) if a concrete form is known; throws PreconditionFailed otherwise.
  double eval(double u) const;
  bool has_form() const { return linear_kappa.has_value() || affine.has_value(); }
};

/// b(u) data; mass_lambda marks b(u) = lambda u / 2.
struct DriftSpec {
  double lip_b = 0.0;
  double b0 = 0.0;
  std::optional<double> mass_lambda;
  std::optional<std::pair<double, double>> affine;  ///< b(u) = a + k u, for simulation

  static DriftSpec none() { return {}; }
  static DriftSpec mass(double lambda);
  void validate() const;
  double eval(double u) const;
};

struct Atom {
  double weight;
  std::vector<double> at;
};

/// weight * N(mean, s^2 I).
struct GaussianBump {
  double weight;
  std::vector<double> mean;
  double s;
};

/// Finite measure: atoms plus isotropic Gaussian densities.
struct MeasureSpec {
  std::vector<Atom> atoms;
  std::vector<GaussianBump> gaussians;

  double mass() const;
  std::complex<double> fourier(std::span<const double> xi) const;  ///< \int e^{i xi.x} mu(dx)
  int dim() const;
};

struct InitialData {
  enum class Kind { Bounded, Delta, Measure };
  Kind kind = Kind::Bounded;
  double inf = 1.0;  ///< eta for bounded data
  double sup = 1.0;
  std::vector<double> at;  ///< delta location
  MeasureSpec measure;

  static InitialData bounded(double lo, double hi) { return {Kind::Bounded, lo, hi, {}, {}}; }
  static InitialData constant(double c) { return bounded(c, c); }
  static InitialData delta(std::vector<double> z) { return {Kind::Delta, 0.0, 0.0, std::move(z), {}}; }
  /// |u0^(xi)|; Delta gives 1.
  double fourier_abs(std::span<const double> xi) const;
};

struct ModelSpec {
  int d;
  CharExponent exponent;
  CorrelationKernel kernel;
  SigmaSpec sigma;
  DriftSpec drift;
  InitialData initial;

  ModelSpec(CharExponent e, CorrelationKernel k, SigmaSpec s = {}, DriftSpec b = {},
            InitialData u0 = {});
  void validate() const;
};

const char* to_string(InitialData::Kind k);

}  // namespace sheq
