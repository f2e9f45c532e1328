#include <cmath>
#include <numbers>
#include <vector>

#include "sheq/errors.hpp"
#include "sheq/parallel.hpp"
#include "sheq/potential.hpp"
#include "sheq/rng.hpp"

namespace sheq {

namespace {

// Increment of the replica process (Re Psi doubled) over time h.
void replica_increment(rng::Stream& s, double q, double c, double h, std::vector<double>& dx) {
  const double gamma = 2.0 * c * h;  // E e^{i xi.dX} = exp(-gamma |xi|^q)
  if (q == 2.0) {
    const double sd = std::sqrt(2.0 * gamma);
    for (double& v : dx) v = sd * s.normal();
    return;
  }
  // Sub-Gaussian representation sqrt(A) G, G ~ N(0, 2I), A positive (q/2)-stable.
  const double alpha = 0.5 * q;
  const double a = std::pow(gamma, 1.0 / alpha) * rng::positive_stable(s, alpha);
  const double sd = std::sqrt(2.0 * a);
  for (double& v : dx) v = sd * s.normal();
}

}  // namespace

OccupationEstimate occupation_mc(const ModelSpec& m, double t, long n_paths, double dt,
                                 std::uint64_t seed) {
  if (!(t > 0.0) || !(dt > 0.0) || n_paths < 2) throw InvalidArgument("occupation_mc needs t, dt > 0, n_paths >= 2");
  if (!m.exponent.simulable()) throw Unsupported("occupation_mc needs a Brownian or isotropic stable exponent");
  if (!m.kernel.spatial_eval_available()) throw Unsupported("occupation_mc needs a spatially evaluable f");
  const auto& st = std::get<IsotropicStable>(m.exponent.family());
  const long steps = std::max(1L, std::lround(t / dt));
  const double h = t / steps;
  const int d = m.d;
  std::vector<double> totals(static_cast<std::size_t>(n_paths));
  parallel_for(totals.size(), [&](std::size_t p) {
    rng::Stream s(seed, p);
    std::vector<double> x(d, 0.0), dx(d);
    double acc = 0.0;
    for (long k = 0; k < steps; ++k) {
      // Midpoint rule: first move half a step, then whole steps.
      replica_increment(s, st.index, st.scale, k == 0 ? 0.5 * h : h, dx);
      for (int i = 0; i < d; ++i) x[i] += dx[i];
      acc += m.kernel.f(std::span<const double>(x));
    }
    totals[p] = acc * h;
  });
  const double n = static_cast<double>(n_paths);
  const double mean = pairwise_sum(totals) / n;
  std::vector<double> sq(totals.size());
  for (std::size_t i = 0; i < totals.size(); ++i) sq[i] = (totals[i] - mean) * (totals[i] - mean);
  const double var = pairwise_sum(sq) / (n - 1.0);
  OccupationEstimate e{mean, std::sqrt(var / n), n_paths, h, ""};
  if (!m.kernel.bounded_at_zero())
    e.bias_note =
        "f is singular at 0; the midpoint Riemann sum under-samples the singularity (bias not corrected)";
  return e;
}

}  // namespace sheq
