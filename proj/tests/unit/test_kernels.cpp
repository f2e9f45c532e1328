#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "approx.hpp"
#include "doctest.h"
#include "oracle_values.hpp"
#include "sheq/errors.hpp"
#include "sheq/kernels.hpp"
#include "sheq/quadrature.hpp"
#include "sheq/spectral.hpp"

using namespace sheq;
constexpr double pi = std::numbers::pi;

namespace {

double fh1(const CorrelationKernel& k, double xi) {
  const std::array<double, 1> x{xi};
  return k.f_hat(x);
}

double f1(const CorrelationKernel& k, double x) {
  const std::array<double, 1> xs{x};
  return k.f(xs);
}

// f(x) = (1/pi) \int_0^inf cos(xi x) f^(xi) d xi for f^ decaying fast.
double invert1(const CorrelationKernel& k, double x, double cut) {
  auto g = [&](double xi) { return std::cos(xi * x) * fh1(k, xi); };
  double acc = 0.0;
  for (double a = 0.0; a < cut; a += 1.0) acc += quad::adaptive(g, a, a + 1.0, {0.0, 1e-13, 400}).value;
  return acc / pi;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("spatial evaluation") {
    CHECK(f1(CorrelationKernel(Riesz{0.5, 1.0}, 1), 4.0) == rel(0.5));
    CHECK(std::isinf(f1(CorrelationKernel(Riesz{0.5, 1.0}, 1), 0.0)));
    const std::array<double, 2> x{1.0, 1.0};
    CHECK(CorrelationKernel(Cauchy{1.0, 1.0}, 2).f(x) == rel(0.25));
    CHECK_THROWS_AS(f1(CorrelationKernel(LogCorrected{1.0, 2.0}, 1), 0.5), Unsupported);
  }

  TEST_CASE("kernels are even") {
    const std::vector<CorrelationKernel> ks{
        CorrelationKernel(Riesz{1.2, 2.0}, 2), CorrelationKernel(OrnsteinUhlenbeck{1.0, 0.7, 2.0}, 2),
        CorrelationKernel(Poisson{1.0, 2.0}, 2), CorrelationKernel(Cauchy{1.5, 0.5}, 2),
        CorrelationKernel(OrnsteinUhlenbeck{1.0, 1.0, 1.0}, 2)};
    const std::array<double, 2> a{0.3, -1.1}, b{-0.3, 1.1};
    for (const auto& k : ks) {
      CHECK(k.f(a) == k.f(b));
      CHECK(k.f_hat(a) == k.f_hat(b));
      CHECK(k.f_hat(a) >= 0.0);
    }
  }

  TEST_CASE("Riesz constant") {
    CHECK(riesz_constant(1, 0.5) == rel(oracle::riesz_C_1_half).epsilon(1e-12));
    CHECK(riesz_constant(1, 0.5) == rel(std::sqrt(2.0 * pi)).epsilon(1e-14));
    CHECK(fh1(CorrelationKernel(Riesz{0.5, 1.0}, 1), 1.0) == rel(std::sqrt(2.0 * pi)));
  }

  TEST_CASE("Riesz scaling is exact") {
    const CorrelationKernel k(Riesz{0.8, 1.0}, 2);
    const std::array<double, 2> xi{0.4, 0.9}, lxi{0.4 * 3.0, 0.9 * 3.0};
    CHECK(k.f_hat(lxi) == rel(std::pow(3.0, -0.8) * k.f_hat(xi)).epsilon(1e-15));
  }

  TEST_CASE("closed-form spectra invert back to the spatial kernels") {
    const std::vector<CorrelationKernel> ks{
        CorrelationKernel(Cauchy{1.3, 0.8}, 1), CorrelationKernel(Poisson{0.9, 1.5}, 1),
        CorrelationKernel(OrnsteinUhlenbeck{1.0, 0.7, 2.0}, 1)};
    for (const auto& k : ks)
      for (double x : {0.0, 0.4, 1.5, 3.0}) CHECK(invert1(k, x, 80.0) == rel(f1(k, x)).epsilon(1e-8));
  }

  TEST_CASE("exponential kernel spectrum by direct cosine transform") {
    for (double alpha : {1.0, 1.5, 0.7}) {
      const CorrelationKernel k(OrnsteinUhlenbeck{1.0, 1.0, alpha}, 1);
      for (double xi : {0.0, 0.5, 2.0}) {
        auto g = [&](double x) { return 2.0 * std::cos(xi * x) * std::exp(-std::pow(x, alpha)); };
        double ref = 0.0;
        const double cut = alpha < 1.0 ? 4000.0 : 60.0;
        for (double a = 0.0; a < cut; a += (a < 40.0 ? 1.0 : 40.0))
          ref += quad::adaptive(g, a, a + (a < 40.0 ? 1.0 : 40.0), {0.0, 1e-12, 2000}).value;
        CHECK(fh1(k, xi) == rel(ref).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("Poisson spectrum in d = 3 by radial inversion") {
    const CorrelationKernel k(Poisson{1.0, 1.0}, 3);
    for (double r : {0.5, 1.0, 2.0}) {
      auto g = [&](double rho) {
        return rho * rho * spectral::spherical_kernel(3, rho * r) * k.f_hat_axis(rho);
      };
      double acc = 0.0;
      for (double a = 0.0; a < 60.0; a += 1.0) acc += quad::adaptive(g, a, a + 1.0, {0.0, 1e-13, 400}).value;
      const double f = 4.0 * pi * acc / std::pow(2.0 * pi, 3);
      CHECK(f == rel(k.f_radial(r)).epsilon(1e-8));
    }
  }

  TEST_CASE("lattice transform of the Gaussian kernel matches its spectrum") {
    const CorrelationKernel k(OrnsteinUhlenbeck{1.0, 0.5, 2.0}, 1);
    const int n = 256;
    const double L = 32.0, h = L / n;
    for (int m : {0, 3, 10, 25}) {
      const double xi = 2.0 * pi * m / L;
      std::complex<double> s = 0.0;
      for (int j = 0; j < n; ++j) {
        const double x = (j - n / 2) * h;
        s += f1(k, x) * std::exp(std::complex<double>(0.0, xi * x));
      }
      const double direct = h * s.real();
      CHECK(std::abs(direct - fh1(k, xi)) / fh1(k, xi) < 1e-6);
    }
  }

  TEST_CASE("log-corrected spectrum: positivity and bracket") {
    for (double q : {0.5, 1.5, 3.0}) {
      const CorrelationKernel k(LogCorrected{1.0, q}, 3);
      double lo = 1e300, hi = 0.0;
      for (double r = 3.0; r < 1e4; r *= 1.3) {
        const double ratio = k.f_hat_axis(r) * r * std::pow(std::log(r), q);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      CHECK(lo > 0.0);
      CHECK(hi < 1e3);
      for (double r : {1e-6, 0.1, 1.0, 1e8}) CHECK(k.f_hat_axis(r) > 0.0);
    }
  }

  TEST_CASE("positive definiteness") {
    CHECK(check_positive_definite(CorrelationKernel(OrnsteinUhlenbeck{1.0, 1.0, 2.0}, 1), 64, 16.0).ok);
    const std::vector<CorrelationKernel> ks{
        CorrelationKernel(Riesz{0.5, 1.0}, 1), CorrelationKernel(Cauchy{1.0, 1.0}, 2),
        CorrelationKernel(Poisson{1.0, 1.0}, 2), CorrelationKernel(OrnsteinUhlenbeck{1.0, 1.0, 1.0}, 1),
        CorrelationKernel(LogCorrected{1.0, 2.0}, 3)};
    for (const auto& k : ks) CHECK(check_positive_definite(k, 16, 8.0).ok);
    CustomSpectral lobe;
    lobe.f_hat = [](std::span<const double> xi) {
      const double r = std::abs(xi[0]);
      return std::exp(-r * r) - 0.5 * std::exp(-(r - 2.0) * (r - 2.0));
    };
    const DefiniteReport bad = check_positive_definite(CorrelationKernel(lobe, 1), 64, 16.0);
    CHECK_FALSE(bad.ok);
    CHECK(bad.min_eigenvalue < 0.0);
  }

  TEST_CASE("monotonicity condition") {
    CHECK(check_condition2(CorrelationKernel(Riesz{0.5, 1.0}, 1)));
    CHECK(check_condition2(CorrelationKernel(Riesz{1.5, 1.0}, 3)));
    CHECK(check_condition2(CorrelationKernel(Cauchy{1.0, 2.0}, 2)));
    CustomSpectral shifted;
    shifted.f_hat = [](std::span<const double> xi) { return std::exp(-(xi[0] - 1.0) * (xi[0] - 1.0)); };
    CHECK_FALSE(check_condition2(CorrelationKernel(shifted, 1)));
  }

  TEST_CASE("declared spectral exponents") {
    CHECK(CorrelationKernel(Riesz{0.7, 1.0}, 1).decay().power == rel(-0.7));
    CHECK(CorrelationKernel(Riesz{0.7, 1.0}, 1).origin().power == rel(-0.7));
    CHECK(CorrelationKernel(Cauchy{1.0, 1.0}, 1).decay().rapid);
    const PowerLog lc = CorrelationKernel(LogCorrected{1.0, 2.0}, 3).decay();
    CHECK(lc.power == rel(-1.0));
    CHECK(lc.log_power == rel(-2.0));
  }
}
