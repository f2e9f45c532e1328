#pragma once

#include <string>
#include <vector>

#include "sheq/model.hpp"
#include "sheq/potential.hpp"

namespace sheq {

/// Probabilists' Hermite polynomial by the three-term recurrence.
double hermite_he(int k, double x);

/// Largest zero z_p of He_p, p even >= 2. Throws InvalidArgument otherwise.
double largest_hermite_zero(int p);

enum class BoundStatus { Ok, NotApplicable, Indeterminate };
const char* to_string(BoundStatus s);

struct BoundResult {
  double value = 0.0;
  BoundStatus status = BoundStatus::Ok;
  std::string note;
  bool ok() const { return status == BoundStatus::Ok; }
};

/// Q(p, beta) = p Lip_b / beta + z_p Lip_sigma sqrt(Upsilon(2 beta / p)).
double q_function(const ModelSpec& m, int p, double beta);

/// inf{beta > 0 : Q(p, beta) < 1}, an upper bound on the top p-th moment
/// exponent.
BoundResult upper_exponent(const ModelSpec& m, int p);

/// sup{beta > 0 : Upsilon(beta) >= 2^{d-1} / L_sigma^2}, sup of the empty
/// set = 0; a lower bound on inf_x of the second moment exponent.
BoundResult lower_exponent2(const ModelSpec& m);

enum class AsymptoticVerdict { PositiveExponentForLargeEta, NotApplicable, Indeterminate };
const char* to_string(AsymptoticVerdict v);

struct AsymptoticReport {
  AsymptoticVerdict verdict;
  double beta0 = 0.0;  ///< Upsilon(beta0) >= 2^{d-1} / q_inf^2
  std::string eta_threshold;  ///< symbolic: eta > sqrt(beta0 A*), A* = max(A^2, 2 |u0|_inf)
  std::string note;
};
AsymptoticReport asymptotic_intermittency(const ModelSpec& m);

/// lambda + (p/2) inf{alpha > 0 : Upsilon(alpha) < 1 / (z_p^2 Lip_sigma^2)}.
BoundResult massive_upper(const ModelSpec& m, int p, double lambda);
/// lambda + sup{alpha > 0 : Upsilon(alpha) >= 2^{d-1} / L_sigma^2}.
BoundResult massive_lower(const ModelSpec& m, double lambda);

struct PhaseThreshold {
  double lambda_lower_c;  ///< -(A kappa^2 / 2^{d-1})^{1/(1-nu)}
  double lambda_upper_c;  ///< -(A kappa^2)^{1/(1-nu)}
};
/// Critical mass for the parabolic Anderson model with stable(q) and Riesz(b).
PhaseThreshold pam_phase_threshold(int d, double q, double b, double kappa);
/// The Laplacian form in d = 1, q = 2.
double pam_threshold_laplacian(double b, double kappa);

/// Integrability of (|u0^| + f^) / (1 + 2 Re Psi) together with the Hawkes
/// condition. Bounded (non-measure) initial data throws PreconditionFailed.
Decision temperate_existence(const ModelSpec& m);

/// inf{beta > 0 : Upsilon(beta) < 1 / (2 z_p^2 Lip_sigma^2)}, with the
/// short-circuit to 0 when Lip_sigma < 1 / sqrt(2 z_p^2 Upsilon(0)).
BoundResult temperate_upper(const ModelSpec& m, int p);

enum class IntermittencyVerdict { WeaklyIntermittent, NotWeaklyIntermittent, Indeterminate };
const char* to_string(IntermittencyVerdict v);

struct LyapunovReport {
  int p;
  BoundResult upper;
  BoundResult lower2;
  IntermittencyVerdict verdict;
  std::vector<std::string> theorem_refs;
};

/// Upper bound at p and the second-moment lower bound, massive variants when
/// the drift is a mass term.
LyapunovReport lyapunov_report(const ModelSpec& m, int p);

struct BisectionSettings {
  double rel = 1e-8;
  int max_iter = 200;
  double cap = 1e12;
};

}  // namespace sheq
