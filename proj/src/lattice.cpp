#include <fftw3.h>

#include <bit>
#include <cmath>
#include <mutex>

#include "sheq/bounds.hpp"
#include "sheq/errors.hpp"
#include "sheq/parallel.hpp"
#include "sheq/simulate.hpp"

namespace sheq {

void LatticeSpec::validate() const {
  if (d != 1 && d != 2) throw InvalidArgument("lattice simulation supports d = 1, 2");
  if (n < 2 || !std::has_single_bit(static_cast<unsigned>(n))) throw InvalidArgument("N must be a power of two");
  if (!(L > 0.0) || !(dt > 0.0) || !(T > 0.0)) throw InvalidArgument("L, dt and T must be positive");
  if (replicas < 1) throw InvalidArgument("replicas must be >= 1");
}

std::size_t LatticeSpec::sites() const { return d == 1 ? std::size_t(n) : std::size_t(n) * n; }

long LatticeSpec::steps() const { return std::max(1L, std::lround(T / dt)); }

struct SpectralGrid::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

SpectralGrid::SpectralGrid(const ModelSpec& m, const LatticeSpec& s) : spec_(s), sites_(s.sites()) {
  s.validate();
  if (m.d != s.d) throw InvalidArgument("model and lattice dimensions differ");
  const int n = s.n;
  const std::size_t half = n / 2 + 1;
  const std::size_t modes = s.d == 1 ? half : std::size_t(n) * half;
  if (m.drift.mass_lambda) lambda_ = *m.drift.mass_lambda;
  re_psi_.resize(modes);
  f_hat_.resize(modes);
  noise_scale_.resize(modes);
  multiplier_.resize(modes);
  const double vol = std::pow(s.L, s.d);
  for (std::size_t k = 0; k < modes; ++k) {
    const std::vector<double> x = xi(k);
    const double psi = m.exponent.re_psi(x);
    double fh = m.kernel.f_hat(x);
    if (k == 0 && !std::isfinite(fh)) {
      fh = 0.0;
      zero_dropped_ = true;
    }
    re_psi_[k] = psi;
    f_hat_[k] = fh;
    noise_scale_[k] = std::sqrt(s.dt * fh / vol);
    multiplier_[k] = std::exp(s.dt * (0.5 * lambda_ - psi));
    stiffness_ = std::max(stiffness_, s.dt * psi);
  }
  plans_ = std::make_unique<Plans>();
  std::vector<double> r(sites_);
  std::vector<std::complex<double>> c(modes);
  auto* cp = reinterpret_cast<fftw_complex*>(c.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  if (s.d == 1) {
    plans_->fwd = fftw_plan_dft_r2c_1d(n, r.data(), cp, flags);
    plans_->bwd = fftw_plan_dft_c2r_1d(n, cp, r.data(), flags);
  } else {
    plans_->fwd = fftw_plan_dft_r2c_2d(n, n, r.data(), cp, flags);
    plans_->bwd = fftw_plan_dft_c2r_2d(n, n, cp, r.data(), flags);
  }
}

SpectralGrid::~SpectralGrid() {
  if (!plans_) return;
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  fftw_destroy_plan(plans_->fwd);
  fftw_destroy_plan(plans_->bwd);
}

std::vector<double> SpectralGrid::xi(std::size_t k) const {
  const int n = spec_.n;
  const double w = 2.0 * std::numbers::pi / spec_.L;
  const std::size_t half = n / 2 + 1;
  if (spec_.d == 1) return {w * double(k)};
  const long k1 = static_cast<long>(k / half);
  const long k2 = static_cast<long>(k % half);
  return {w * double(k1 <= n / 2 ? k1 : k1 - n), w * double(k2)};
}

void SpectralGrid::forward(const double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(plans_->fwd, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void SpectralGrid::backward(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(plans_->bwd, reinterpret_cast<fftw_complex*>(in), out);
}

namespace {

// Spectrum of dW, i.e. forward(dW) = sqrt(N) s_k W_k with W the transform
// of i.i.d. standard normals, so E|forward(dW)_k|^2 = N^2 s_k^2.
void noise_spectrum(const SpectralGrid& g, rng::Stream& s, std::vector<double>& white,
                    std::vector<std::complex<double>>& out) {
  const std::size_t N = g.sites();
  white.resize(N);
  for (double& v : white) v = s.normal();
  out.resize(g.modes());
  g.forward(white.data(), out.data());
  const double root = std::sqrt(double(N));
  const auto& sc = g.noise_scale();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= root * sc[k];
}

void to_sites(FieldState& st) {
  const SpectralGrid& g = *st.grid;
  std::vector<std::complex<double>> tmp = st.u_hat;
  st.u.resize(g.sites());
  g.backward(tmp.data(), st.u.data());
  const double inv = 1.0 / double(g.sites());
  for (double& v : st.u) v *= inv;
}

}  // namespace

std::vector<double> synthesize_noise_increment(const SpectralGrid& g, rng::Stream& s) {
  std::vector<double> white;
  std::vector<std::complex<double>> spec;
  noise_spectrum(g, s, white, spec);
  std::vector<double> dw(g.sites());
  g.backward(spec.data(), dw.data());
  const double inv = 1.0 / double(g.sites());
  for (double& v : dw) v *= inv;
  return dw;
}

FieldState initial_state(const ModelSpec& m, std::shared_ptr<const SpectralGrid> g) {
  if (m.initial.kind != InitialData::Kind::Bounded) return delta_initial(m, std::move(g));
  if (m.initial.inf != m.initial.sup)
    throw Unsupported("simulation needs constant bounded initial data (inf = sup)");
  FieldState st;
  st.grid = std::move(g);
  st.u.assign(st.grid->sites(), m.initial.inf);
  st.u_hat.resize(st.grid->modes());
  st.grid->forward(st.u.data(), st.u_hat.data());
  return st;
}

FieldState delta_initial(const ModelSpec& m, std::shared_ptr<const SpectralGrid> g) {
  if (m.d != 1) throw PreconditionFailed("delta initial data needs d = 1: the temperate criterion fails for d >= 2");
  if (m.initial.kind == InitialData::Kind::Bounded) throw PreconditionFailed("initial data is not a measure");
  if (temperate_existence(m) != Decision::Yes) throw PreconditionFailed("temperate existence criterion not met");
  MeasureSpec mu = m.initial.measure;
  if (m.initial.kind == InitialData::Kind::Delta) mu = MeasureSpec{{Atom{1.0, m.initial.at}}, {}};
  FieldState st;
  st.grid = std::move(g);
  const SpectralGrid& grid = *st.grid;
  const double N = double(grid.sites());
  const double L = grid.spec().L;
  st.u_hat.resize(grid.modes());
  for (std::size_t k = 0; k < grid.modes(); ++k) {
    const std::vector<double> x = grid.xi(k);
    st.u_hat[k] = N / L * grid.multiplier()[k] * std::conj(mu.fourier(x));
  }
  to_sites(st);
  st.time = grid.spec().dt;
  return st;
}

void step(FieldState& st, const ModelSpec& m, rng::Stream& s) {
  const SpectralGrid& g = *st.grid;
  const double dt = g.spec().dt;
  const std::size_t N = g.sites();
  const auto& mult = g.multiplier();
  thread_local std::vector<double> white, forcing;
  thread_local std::vector<std::complex<double>> noise, fh;
  noise_spectrum(g, s, white, noise);

  const bool const_sigma = !m.sigma.linear_kappa && m.sigma.affine && m.sigma.affine->second == 0.0;
  const bool const_drift = !m.drift.affine || m.drift.affine->second == 0.0;
  if (const_sigma && const_drift) {
    const double c = m.sigma.affine->first;
    const double b0 = m.drift.affine ? m.drift.affine->first : 0.0;
    for (std::size_t k = 0; k < noise.size(); ++k) {
      std::complex<double> f = c * noise[k];
      if (k == 0) f += dt * b0 * double(N);
      st.u_hat[k] = mult[k] * (st.u_hat[k] + f);
    }
  } else {
    forcing.resize(N);
    g.backward(noise.data(), forcing.data());
    const double inv = 1.0 / double(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double u = st.u[i];
      forcing[i] = dt * m.drift.eval(u) + m.sigma.eval(u) * forcing[i] * inv;
    }
    fh.resize(g.modes());
    g.forward(forcing.data(), fh.data());
    for (std::size_t k = 0; k < fh.size(); ++k) st.u_hat[k] = mult[k] * (st.u_hat[k] + fh[k]);
  }
  to_sites(st);
  st.time += dt;
  ++st.step;
}

}  // namespace sheq
