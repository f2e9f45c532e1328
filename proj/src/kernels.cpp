#include "sheq/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "sheq/errors.hpp"
#include "sheq/quadrature.hpp"
#include "sheq/spectral.hpp"

namespace sheq {

using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double ou_hankel(const OrnsteinUhlenbeck& k, int d, double rho) {
  const double area = spectral::sphere_area(d);
  if (rho == 0.0)
    return k.c1 * area * std::tgamma(d / k.alpha) / (k.alpha * std::pow(k.c2, d / k.alpha));
  auto g = [&](double r) { return std::exp(-k.c2 * std::pow(r, k.alpha)) * std::pow(r, d - 1); };
  quad::OscillatoryOptions opt;
  opt.rel = 1e-11;
  opt.abs = 1e-16;
  opt.cutoff = std::pow((80.0 + 4.0 * d) / k.c2, 1.0 / k.alpha);
  opt.max_panels = 100000;
  const quad::Result res = quad::oscillatory(
      g, [d](double z) { return spectral::spherical_kernel(d, z); },
      [d](int i) { return spectral::spherical_kernel_zero(d, i); }, rho, opt);
  if (!res.converged) throw QuadratureError("OU spectral density", res.value, res.error);
  return std::max(0.0, k.c1 * area * res.value);
}

// Shared by the constructor and check_condition2.
template <class F>
bool condition2_holds(F&& fhat, int d, int samples) {
  const std::array<double, 3> others = {0.0, 0.7, 3.1};
  int combos = 1;
  for (int i = 1; i < d; ++i) combos *= 3;
  std::vector<double> ts{0.0};
  for (int i = 0; i < samples; ++i) ts.push_back(1e-3 * std::pow(1e5, double(i) / (samples - 1)));
  std::vector<double> xi(d);
  auto eval = [&] { return fhat(std::span<const double>(xi)); };
  auto same = [](double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)) + 1e-300;
  };
  for (int j = 0; j < d; ++j) {
    for (int c = 0; c < combos; ++c) {
      int code = c;
      std::vector<double> base(d, 0.0);
      for (int i = 0; i < d; ++i) {
        if (i == j) continue;
        base[i] = others[code % 3];
        code /= 3;
      }
      double prev = kInf;
      for (double t : ts) {
        xi = base;
        xi[j] = t;
        const double v = eval();
        if (!(v >= 0.0)) return false;
        if (!std::isinf(prev) && v > prev * (1.0 + 1e-9) + 1e-300) return false;
        // Reflections of the moving coordinate and of all the others.
        xi[j] = -t;
        if (!same(eval(), v)) return false;
        for (int i = 0; i < d; ++i) xi[i] = -xi[i];
        if (!same(eval(), v)) return false;
        prev = v;
      }
    }
  }
  return true;
}

}  // namespace

double riesz_constant(int d, double b) {
  return std::pow(pi, 0.5 * d) * std::pow(2.0, b) * std::tgamma(0.5 * b) / std::tgamma(0.5 * (d - b));
}

struct CorrelationKernel::Cache {
  std::unique_ptr<LaplaceTable> phi;
  PowerLog decay, origin;
};

CorrelationKernel::CorrelationKernel(Family family, int dim) : family_(std::move(family)), dim_(dim) {
  if (dim < 1) throw InvalidArgument("dimension must be positive");
  auto cache = std::make_shared<Cache>();
  std::visit(overloaded{
                 [&](const Riesz& k) {
                   if (!(k.b > 0.0 && k.b < dim)) throw InvalidArgument("Riesz index b must lie in (0, d)");
                   if (!(k.c > 0.0)) throw InvalidArgument("Riesz constant must be positive");
                   cache->decay = {-k.b, 0.0, false};
                   cache->origin = {-k.b, 0.0, false};
                 },
                 [&](const OrnsteinUhlenbeck& k) {
                   if (!(k.c1 > 0.0 && k.c2 > 0.0)) throw InvalidArgument("OU constants must be positive");
                   if (!(k.alpha > 0.0 && k.alpha <= 2.0)) throw InvalidArgument("OU alpha must lie in (0, 2]");
                   cache->decay = k.alpha == 2.0 ? PowerLog{0.0, 0.0, true}
                                                 : PowerLog{-(dim + k.alpha), 0.0, false};
                 },
                 [&](const Poisson& k) {
                   if (!(k.c1 > 0.0 && k.c2 > 0.0)) throw InvalidArgument("Poisson constants must be positive");
                   cache->decay = {0.0, 0.0, true};
                 },
                 [&](const Cauchy& k) {
                   if (!(k.c1 > 0.0 && k.c2 > 0.0)) throw InvalidArgument("Cauchy constants must be positive");
                   cache->decay = {0.0, 0.0, true};
                 },
                 [&](const LogCorrected& k) {
                   if (!(k.a > 0.0 && k.a < 2.0)) throw InvalidArgument("log-corrected index a must lie in (0, 2)");
                   cache->phi = std::make_unique<LaplaceTable>(SubordinatorSpec{0.5 * k.a, 2.0 * k.b_log});
                   cache->decay = {-k.a, -k.b_log, false};
                 },
                 [&](const CustomSpectral& k) {
                   if (!k.f_hat) throw InvalidArgument("custom kernel needs a spectral density");
                 },
             },
             family_);
  cache_ = cache;
  if (std::holds_alternative<CustomSpectral>(family_)) {
    auto axis = [this](double r) { return f_hat_axis(r); };
    cache->decay = fit_power_log(axis, 1e3, 1e12);
    cache->origin = fit_power_log_origin(axis, 1e-12, 1e-3);
  }
  condition2_ = condition2_holds([this](std::span<const double> x) { return f_hat(x); }, dim_, 40);
}

std::string CorrelationKernel::family_name() const {
  static const char* names[] = {"riesz", "ornstein_uhlenbeck", "poisson", "cauchy", "log_corrected", "custom"};
  return names[family_.index()];
}

bool CorrelationKernel::radial() const {
  if (dim_ == 1) return true;
  if (std::holds_alternative<Cauchy>(family_)) return false;
  if (const auto* c = std::get_if<CustomSpectral>(&family_)) return c->radial;
  return true;
}

bool CorrelationKernel::spatial_eval_available() const {
  return !std::holds_alternative<LogCorrected>(family_) && !std::holds_alternative<CustomSpectral>(family_);
}

bool CorrelationKernel::lower_semicontinuous() const { return spatial_eval_available(); }

bool CorrelationKernel::bounded_at_zero() const {
  return spatial_eval_available() && !std::holds_alternative<Riesz>(family_);
}

double CorrelationKernel::f_radial(double r) const {
  r = std::abs(r);
  return std::visit(overloaded{
                        [&](const Riesz& k) { return r == 0.0 ? kInf : k.c * std::pow(r, -(dim_ - k.b)); },
                        [&](const OrnsteinUhlenbeck& k) { return k.c1 * std::exp(-k.c2 * std::pow(r, k.alpha)); },
                        [&](const Poisson& k) { return k.c1 * std::pow(r * r + k.c2, -0.5 * (dim_ + 1)); },
                        [&](const Cauchy& k) -> double {
                          if (dim_ != 1) throw Unsupported("Cauchy kernel is not radial in d >= 2");
                          return k.c1 / (k.c2 + r * r);
                        },
                        [&](const LogCorrected&) -> double {
                          throw Unsupported("log-corrected kernels are spectral-only");
                        },
                        [&](const CustomSpectral&) -> double {
                          throw Unsupported("custom kernels are spectral-only");
                        },
                    },
                    family_);
}

double CorrelationKernel::f(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw InvalidArgument("f: wrong dimension");
  if (const auto* k = std::get_if<Cauchy>(&family_)) {
    double prod = k->c1;
    for (double v : x) prod /= (k->c2 + v * v);
    return prod;
  }
  return f_radial(norm(x));
}

double CorrelationKernel::f_hat_axis(double rho) const {
  rho = std::abs(rho);
  const int d = dim_;
  return std::visit(
      overloaded{
          [&](const Riesz& k) { return rho == 0.0 ? kInf : k.c * riesz_constant(d, k.b) * std::pow(rho, -k.b); },
          [&](const OrnsteinUhlenbeck& k) {
            if (k.alpha == 2.0) return k.c1 * std::pow(pi / k.c2, 0.5 * d) * std::exp(-rho * rho / (4.0 * k.c2));
            if (k.alpha == 1.0)
              return k.c1 * std::pow(2.0, d) * std::pow(pi, 0.5 * (d - 1)) * std::tgamma(0.5 * (d + 1)) * k.c2 /
                     std::pow(k.c2 * k.c2 + rho * rho, 0.5 * (d + 1));
            return ou_hankel(k, d, rho);
          },
          [&](const Poisson& k) {
            return k.c1 * std::pow(pi, 0.5 * (d + 1)) / (std::tgamma(0.5 * (d + 1)) * std::sqrt(k.c2)) *
                   std::exp(-std::sqrt(k.c2) * rho);
          },
          [&](const Cauchy& k) {
            // Axis point: the other d-1 factors sit at xi_j = 0.
            return k.c1 * std::pow(pi / std::sqrt(k.c2), d) * std::exp(-std::sqrt(k.c2) * rho);
          },
          [&](const LogCorrected&) { return 1.0 / (1.0 + (*cache_->phi)(0.5 * rho * rho)); },
          [&](const CustomSpectral& k) {
            std::vector<double> xi(d, 0.0);
            xi[0] = rho;
            return k.f_hat(std::span<const double>(xi));
          },
      },
      family_);
}

double CorrelationKernel::f_hat(std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != dim_) throw InvalidArgument("f_hat: wrong dimension");
  if (const auto* k = std::get_if<Cauchy>(&family_)) {
    double s = 0.0;
    for (double v : xi) s += std::abs(v);
    return k->c1 * std::pow(pi / std::sqrt(k->c2), dim_) * std::exp(-std::sqrt(k->c2) * s);
  }
  if (const auto* k = std::get_if<CustomSpectral>(&family_)) return k->f_hat(xi);
  return f_hat_axis(norm(xi));
}

PowerLog CorrelationKernel::decay() const { return cache_->decay; }
PowerLog CorrelationKernel::origin() const { return cache_->origin; }

bool check_condition2(const CorrelationKernel& k, int samples_per_axis) {
  return condition2_holds([&](std::span<const double> x) { return k.f_hat(x); }, k.dim(),
                          std::max(samples_per_axis, 2));
}

DefiniteReport check_positive_definite(const CorrelationKernel& k, int n, double L) {
  const int d = k.dim();
  if (d > 3) throw Unsupported("lattice check limited to d <= 3");
  if (n < 2 || !(L > 0.0)) throw InvalidArgument("lattice check needs n >= 2 and L > 0");
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
  std::vector<std::complex<double>> F(total), c(total), lam(total);
  std::vector<double> xi(d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int a = d - 1; a >= 0; --a) {
      const long m = static_cast<long>(rem % n);
      rem /= n;
      xi[a] = 2.0 * pi * (m < n / 2 ? m : m - n) / L;
    }
    const double v = k.f_hat(std::span<const double>(xi));
    F[idx] = std::isfinite(v) ? v : 0.0;
  }
  std::vector<int> dims(d, n);
  auto* in = reinterpret_cast<fftw_complex*>(F.data());
  auto* mid = reinterpret_cast<fftw_complex*>(c.data());
  auto* out = reinterpret_cast<fftw_complex*>(lam.data());
  fftw_plan back = fftw_plan_dft(d, dims.data(), in, mid, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(back);
  fftw_destroy_plan(back);
  const double vol = std::pow(L, d);
  for (auto& v : c) v /= vol;
  fftw_plan fwd = fftw_plan_dft(d, dims.data(), mid, out, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);
  DefiniteReport r{true, kInf, -kInf, kInf};
  for (std::size_t i = 0; i < total; ++i) {
    r.min_eigenvalue = std::min(r.min_eigenvalue, lam[i].real());
    r.max_eigenvalue = std::max(r.max_eigenvalue, lam[i].real());
    r.min_covariance = std::min(r.min_covariance, c[i].real());
  }
  r.ok = r.min_eigenvalue >= -1e-8 * std::max(r.max_eigenvalue, 0.0);
  return r;
}

}  // namespace sheq
