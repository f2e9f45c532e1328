#pragma once

#include <string>
#include <vector>

#include "sheq/model.hpp"
#include "sheq/potential.hpp"

namespace sheq {

/// E|u_t(x)|^2 for the linear equation (u0 = 0, sigma = 1):
/// (2 pi)^{-d} \int (1 - e^{-2 t Re Psi}) / (2 Re Psi) f^ d xi.
/// Throws PreconditionFailed when Upsilon(1) = inf.
double linear_variance(const ModelSpec& m, double t);

struct Sandwich {
  double lower;   ///< (1 - e^{-2t/lambda}) E_lambda
  double upper;   ///< e^{2t/lambda} E_lambda
  double energy;  ///< E_lambda(delta) = Upsilon(2/lambda)
};
Sandwich linear_variance_sandwich(const ModelSpec& m, double t, double lambda);

/// d(r)^2 = (2 pi)^{-d} \int (1 - cos(xi.x)) f^ / (1 + 2 Re Psi) d xi at
/// |x| = r, by radial reduction. Radial models with d <= 3.
double canonical_distance(const ModelSpec& m, double r);

enum class GaugeRegime { PolynomialGauge, PolyLogGauge, LipschitzGauge, LogOnlyGauge, NoSolution };
const char* to_string(GaugeRegime g);

enum class EntropyIntegral { Finite, Infinite };
const char* to_string(EntropyIntegral e);

struct GaugeReport {
  GaugeRegime regime = GaugeRegime::NoSolution;
  double exponent = 0.0;  ///< r^exponent, or |log r|^exponent for the log-only gauge
  EntropyIntegral entropy = EntropyIntegral::Infinite;
  // log d = a + s log r + c log log(1/r) over the fit window.
  double a = 0.0;
  double s = 0.0;
  double c = 0.0;
  double slope = 0.0;  ///< two-parameter slope of log d against log r
  double residual = 0.0;  ///< rms residual of the three-parameter fit
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::vector<double> r;
  std::vector<double> dist;

  std::string to_json() const;
  /// r,d CSV with header.
  std::string to_csv() const;
};

/// Gauge of the canonical distance from samples on r in [1e-6, 1e-1] (the
/// smallest decade dropped from the fit), and the Dudley entropy verdict.
GaugeReport entropy_verdict(const ModelSpec& m);

enum class CounterexampleVerdict {
  NoRandomFieldSolution,
  SolutionDiscontinuousEverywhere,
  SolutionWithContinuousModification
};
const char* to_string(CounterexampleVerdict v);

struct CounterexampleReport {
  double q;
  CounterexampleVerdict verdict;  ///< from the q ranges
  CounterexampleVerdict numeric;  ///< from Upsilon finiteness and the entropy fit
  Decision dalang;
  Finiteness fitted_upsilon;
  GaugeReport gauge;
  bool agree() const { return verdict == numeric; }
};

/// d = 3, Re Psi = |xi|^2, f^ ~ |xi|^{-1} (log |xi|)^{-q}.
CounterexampleReport counterexample_classifier(double q);

}  // namespace sheq
