#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sheq/model.hpp"
#include "sheq/quadrature.hpp"
#include "sheq/spectral.hpp"

namespace sheq {

enum class Finiteness { Finite, Divergent, Indeterminate };
const char* to_string(Finiteness f);

/// Where the analytic exponents came from.
enum class AsymptoticSource { Declared, Fitted };

struct DivergenceCertificate {
  std::string where;  ///< "infinity" or "origin"
  PowerLog integrand;  ///< radial integrand rho^{d-1} f^/(beta + 2 Re Psi) at that end
  AsymptoticSource source;
  std::string describe() const;
};

struct UpsilonValue {
  double beta = 0.0;
  double value = 0.0;  ///< +inf when divergent
  double error = 0.0;
  Finiteness status = Finiteness::Finite;
  std::optional<DivergenceCertificate> certificate;
  /// For beta = 0: the limit is reported with the last three finite betas.
  std::vector<std::pair<double, double>> trail;
  bool finite() const { return status == Finiteness::Finite; }
};

/// (2 pi)^{-d} \int h(Re Psi(xi), f^(xi)) dxi by radial reduction (angular
/// average when either factor is not radial).
template <class H>
quad::Result spectral_integral(const CharExponent& e, const CorrelationKernel& k, H&& h,
                               const quad::HalfLineOptions& opt);

/// The radial tail and origin exponents of rho^{d-1} f^/(beta + 2 Re Psi).
PowerLog upsilon_tail(const CharExponent& e, const CorrelationKernel& k, AsymptoticSource src);
PowerLog upsilon_origin(const CharExponent& e, const CorrelationKernel& k, double beta,
                        AsymptoticSource src);

/// Upsilon(beta) = (2 pi)^{-d} \int f^(xi) / (beta + 2 Re Psi(xi)) dxi.
UpsilonValue upsilon(const CharExponent& e, const CorrelationKernel& k, double beta,
                     AsymptoticSource src = AsymptoticSource::Declared);
UpsilonValue upsilon(const ModelSpec& m, double beta);

struct PotentialProfile {
  std::vector<UpsilonValue> rows;
  /// CSV with header beta,upsilon,err,divergent.
  std::string to_csv() const;
};
PotentialProfile potential_profile(const ModelSpec& m, const std::vector<double>& betas);

/// A_{d,q,b} with Upsilon(alpha) = A alpha^{nu-1} for stable(q, scale 1) +
/// Riesz(b, c = 1). Closed form in d = 1, radial quadrature otherwise.
/// Throws InfiniteAmplitude when q + b <= d.
double amplitude_A(int d, double q, double b);

/// Upsilon(1) < inf. Indeterminate only when neither route decides.
Decision dalang_condition(const ModelSpec& m);

/// pi_beta(x) = (2 pi)^{-d} \int e^{-i xi.x} f^/(beta + 2 Re Psi) dxi, radial
/// models only. Throws PreconditionFailed unless Upsilon(beta) is finite.
double replica_potential_at(const ModelSpec& m, double beta, std::span<const double> x);

struct EnergyForms {
  double spatial;
  double spectral;
};

/// \int\int f(x-y) mu(dx) mu(dy) and (2 pi)^{-d} \int |mu^|^2 f^. Atoms need
/// f(0) < inf; Gaussian components are supported with Riesz kernels.
EnergyForms energy_form(const CorrelationKernel& k, const MeasureSpec& mu);

enum class Transience { FiniteTotalOccupation, InfiniteTotalOccupation, Indeterminate };
const char* to_string(Transience t);

/// Decided by the finiteness of Upsilon(0).
Transience classify_transience(const ModelSpec& m);

struct OccupationEstimate {
  double mean;
  double stderr_mean;
  long paths;
  double dt;
  std::string bias_note;
};

/// Monte Carlo mean of L_t(f) = \int_0^t f(Xbar_s) ds over replica paths
/// (exponent 2 Re Psi), midpoint Riemann sums. Isotropic stable exponents only.
OccupationEstimate occupation_mc(const ModelSpec& m, double t, long n_paths, double dt,
                                 std::uint64_t seed);

/// Mean occupation E L_t(f) = \int_0^t (Pbar_s f)(0) ds by quadrature, for
/// the same class of models; used as a cross-check of occupation_mc.
double occupation_mean(const ModelSpec& m, double t);

// ---------------------------------------------------------------------------

template <class H>
quad::Result spectral_integral(const CharExponent& e, const CorrelationKernel& k, H&& h,
                               const quad::HalfLineOptions& opt) {
  const int d = e.dim();
  const double c = spectral::fourier_norm(d) * spectral::sphere_area(d);
  if (e.radial() && k.radial()) {
    auto g = [&](double rho) {
      return c * std::pow(rho, d - 1) * h(e.re_psi_axis(rho), k.f_hat_axis(rho));
    };
    return quad::half_line(g, opt);
  }
  auto full = [&](std::span<const double> xi) { return h(e.re_psi(xi), k.f_hat(xi)); };
  auto g = [&](double rho) {
    return c * std::pow(rho, d - 1) * spectral::angular_average(d, full, rho, 1e-10);
  };
  return quad::half_line(g, opt);
}

}  // namespace sheq
