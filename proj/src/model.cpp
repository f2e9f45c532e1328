#include "sheq/model.hpp"

#include <cmath>

#include "sheq/errors.hpp"

namespace sheq {

SigmaSpec SigmaSpec::pam(double kappa) {
  SigmaSpec s;
  s.lip_sigma = std::abs(kappa);
  s.lower_linear = std::abs(kappa);
  s.linear_kappa = kappa;
  s.q_inf = std::abs(kappa);
  return s;
}

SigmaSpec SigmaSpec::constant(double c) {
  SigmaSpec s;
  s.sigma0 = std::abs(c);
  s.affine = std::make_pair(c, 0.0);
  return s;
}

void SigmaSpec::validate() const {
  if (!(lip_sigma >= 0.0) || !(lower_linear >= 0.0) || !(sigma0 >= 0.0))
    throw InvalidArgument("sigma constants must be nonnegative");
  if (lower_linear > 0.0 && lip_sigma > 0.0 && lower_linear > lip_sigma * (1.0 + 1e-12))
    throw InvalidArgument("L_sigma cannot exceed Lip_sigma");
  if (linear_kappa) {
    const double k = std::abs(*linear_kappa);
    if (std::abs(lip_sigma - k) > 1e-12 * std::max(1.0, k) ||
        std::abs(lower_linear - k) > 1e-12 * std::max(1.0, k) || sigma0 != 0.0)
      throw InvalidArgument("linear sigma requires Lip_sigma = L_sigma = |kappa| and sigma(0) = 0");
  }
}

double SigmaSpec::eval(double u) const {
  if (linear_kappa) return *linear_kappa * u;
  if (affine) return affine->first + affine->second * u;
  throw PreconditionFailed("sigma has no concrete form for simulation");
}

DriftSpec DriftSpec::mass(double lambda) {
  DriftSpec b;
  b.mass_lambda = lambda;
  b.lip_b = 0.5 * std::abs(lambda);
  return b;
}

void DriftSpec::validate() const {
  if (!(lip_b >= 0.0) || !(b0 >= 0.0)) throw InvalidArgument("drift constants must be nonnegative");
  if (mass_lambda) {
    if (std::abs(lip_b - 0.5 * std::abs(*mass_lambda)) > 1e-12 * std::max(1.0, lip_b) || b0 != 0.0)
      throw InvalidArgument("mass term requires Lip_b = |lambda|/2 and b(0) = 0");
  }
}

double DriftSpec::eval(double u) const {
  // The mass term is applied exactly by the semigroup, not here.
  if (affine) return affine->first + affine->second * u;
  return 0.0;
}

double MeasureSpec::mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.weight;
  for (const auto& g : gaussians) m += g.weight;
  return m;
}

int MeasureSpec::dim() const {
  if (!atoms.empty()) return static_cast<int>(atoms.front().at.size());
  if (!gaussians.empty()) return static_cast<int>(gaussians.front().mean.size());
  return 0;
}

std::complex<double> MeasureSpec::fourier(std::span<const double> xi) const {
  std::complex<double> s = 0.0;
  auto dot = [&](const std::vector<double>& x) {
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) v += xi[i] * x[i];
    return v;
  };
  double n2 = 0.0;
  for (double v : xi) n2 += v * v;
  for (const auto& a : atoms) s += a.weight * std::polar(1.0, dot(a.at));
  for (const auto& g : gaussians) s += g.weight * std::exp(-0.5 * g.s * g.s * n2) * std::polar(1.0, dot(g.mean));
  return s;
}

double InitialData::fourier_abs(std::span<const double> xi) const {
  switch (kind) {
    case Kind::Delta:
      return 1.0;
    case Kind::Measure:
      return std::abs(measure.fourier(xi));
    case Kind::Bounded:
      break;
  }
  throw PreconditionFailed("bounded initial data has no Fourier transform as a finite measure");
}

ModelSpec::ModelSpec(CharExponent e, CorrelationKernel k, SigmaSpec s, DriftSpec b, InitialData u0)
    : d(e.dim()),
      exponent(std::move(e)),
      kernel(std::move(k)),
      sigma(std::move(s)),
      drift(std::move(b)),
      initial(std::move(u0)) {
  validate();
}

void ModelSpec::validate() const {
  if (exponent.dim() != d || kernel.dim() != d) throw InvalidArgument("exponent, kernel and model dimensions differ");
  sigma.validate();
  drift.validate();
  if (initial.kind == InitialData::Kind::Bounded) {
    if (!(initial.inf >= 0.0) || !(initial.sup >= initial.inf))
      throw InvalidArgument("bounded initial data needs 0 <= inf <= sup");
  } else if (initial.kind == InitialData::Kind::Delta) {
    if (static_cast<int>(initial.at.size()) != d) throw InvalidArgument("delta location has wrong dimension");
  } else {
    const int md = initial.measure.dim();
    if (md != 0 && md != d) throw InvalidArgument("initial measure has wrong dimension");
    for (const auto& a : initial.measure.atoms)
      if (a.weight < 0.0) throw InvalidArgument("initial measure weights must be nonnegative");
    for (const auto& g : initial.measure.gaussians)
      if (g.weight < 0.0 || !(g.s > 0.0)) throw InvalidArgument("Gaussian component needs weight >= 0, s > 0");
  }
}

const char* to_string(InitialData::Kind k) {
  switch (k) {
    case InitialData::Kind::Bounded:
      return "bounded";
    case InitialData::Kind::Delta:
      return "delta";
    case InitialData::Kind::Measure:
      return "measure";
  }
  return "bounded";
}

}  // namespace sheq
