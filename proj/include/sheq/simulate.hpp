#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sheq/model.hpp"
#include "sheq/rng.hpp"

namespace sheq {

struct LatticeSpec {
  int d = 1;
  int n = 128;       ///< modes per axis, a power of two
  double L = 64.0;   ///< period
  double dt = 0.005;
  double T = 2.0;
  int replicas = 800;
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t sites() const;
  long steps() const;  ///< round(T / dt)
};

/// Mode tables and FFT plans for one (model, lattice) pair. Modes follow
/// the real-to-complex layout: n in d = 1, n x (n/2 + 1) in d = 2.
class SpectralGrid {
 public:
  SpectralGrid(const ModelSpec& m, const LatticeSpec& s);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  const LatticeSpec& spec() const { return spec_; }
  std::size_t sites() const { return sites_; }
  std::size_t modes() const { return re_psi_.size(); }
  const std::vector<double>& re_psi() const { return re_psi_; }
  const std::vector<double>& f_hat() const { return f_hat_; }  ///< 0 where f^ is infinite
  /// sqrt(dt f^ / L^d) per mode.
  const std::vector<double>& noise_scale() const { return noise_scale_; }
  /// e^{dt (lambda/2 - Re Psi)} per mode.
  const std::vector<double>& multiplier() const { return multiplier_; }
  /// Wave vector of mode k.
  std::vector<double> xi(std::size_t k) const;
  /// dt max_k Re Psi(xi_k); informational.
  double stiffness() const { return stiffness_; }
  bool zero_mode_dropped() const { return zero_dropped_; }
  double mass_lambda() const { return lambda_; }

  /// Unnormalised transforms; `backward` overwrites its input.
  void forward(const double* in, std::complex<double>* out) const;
  void backward(std::complex<double>* in, double* out) const;

 private:
  struct Plans;
  LatticeSpec spec_;
  std::size_t sites_;
  std::vector<double> re_psi_, f_hat_, noise_scale_, multiplier_;
  double stiffness_ = 0.0;
  bool zero_dropped_ = false;
  double lambda_ = 0.0;
  std::unique_ptr<Plans> plans_;
};

struct FieldState {
  std::vector<double> u;                  ///< site values
  std::vector<std::complex<double>> u_hat;  ///< forward transform of u
  double time = 0.0;
  long step = 0;
  std::shared_ptr<const SpectralGrid> grid;  ///< carries the multipliers
};

/// Lattice field with Cov(dW(x), dW(y)) = dt L^{-d} sum_k f^(xi_k) e^{i xi_k.(x-y)}.
std::vector<double> synthesize_noise_increment(const SpectralGrid& g, rng::Stream& s);

/// u0 constant; bounded data with inf != sup is rejected.
FieldState initial_state(const ModelSpec& m, std::shared_ptr<const SpectralGrid> g);

/// Lattice transition density p_dt(. - z) at time dt (measure data: the
/// same kernel against the measure). d = 1 and a temperate model only.
FieldState delta_initial(const ModelSpec& m, std::shared_ptr<const SpectralGrid> g);

/// u_hat <- e^{dt (lambda/2 - Psi)} (u_hat + F[dt b(u) + sigma(u) dW]).
void step(FieldState& st, const ModelSpec& m, rng::Stream& s);

struct LinearValidation {
  std::vector<double> times;
  std::vector<double> sample;  ///< replica and site mean of u^2
  std::vector<double> stderr_sample;
  std::vector<double> exact;   ///< discrete variance of the scheme
  std::vector<double> limit;   ///< L^{-d} sum_k (1 - e^{-2t Re Psi}) f^ / (2 Re Psi)
  std::vector<double> rel_error;
  double max_rel_error = 0.0;
};

/// sigma = 1, b = 0, u0 = 0 on the lattice, compared at the given times.
LinearValidation run_linear_validation(const ModelSpec& m, const LatticeSpec& s,
                                       const std::vector<double>& times = {0.25, 0.5, 1.0});

struct SimResult {
  int p = 2;
  std::vector<double> t, m2_site, m2_avg, mp_site, mp_avg;
  double gamma_hat = 0.0;  ///< OLS slope of log mp_avg on the window
  double gamma_site = 0.0;  ///< same for mp_site
  double ci_lo = 0.0, ci_hi = 0.0;  ///< 95% bootstrap interval over replicas
  double stderr_gamma = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  int replicas = 0;
  double stiffness = 0.0;
  std::string config_hash;
  std::vector<std::string> notes;

  std::string to_csv() const;
  std::string summary_json() const;
};

SimResult estimate_exponent(const ModelSpec& m, const LatticeSpec& s, int p = 2);

}  // namespace sheq
