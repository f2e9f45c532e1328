#pragma once

// Radial reduction helpers shared by every (2 pi)^{-d} \int ... d xi formula.

#include <array>
#include <cmath>
#include <numbers>
#include <span>

#include "sheq/errors.hpp"
#include "sheq/quadrature.hpp"

namespace sheq::spectral {

/// (2 pi)^{-d}.
double fourier_norm(int d);

/// Surface area of the unit sphere in R^d, 2 pi^{d/2} / Gamma(d/2).
double sphere_area(int d);

/// Average of cos(z theta_1) over the unit sphere, Gamma(d/2) (2/z)^nu J_nu(z)
/// with nu = d/2 - 1: cos in d = 1, J_0 in d = 2, sin z / z in d = 3.
double spherical_kernel(int d, double z);

/// 1 - spherical_kernel, without cancellation for small z.
double one_minus_spherical_kernel(int d, double z);

/// k-th positive zero (k >= 1) of spherical_kernel(d, .).
double spherical_kernel_zero(int d, int k);

/// Average over the unit sphere of F(rho theta), for F even in every
/// coordinate. d <= 3; d = 1 is exact.
template <class F>
double angular_average(int d, F&& full, double rho, double rel = 1e-9) {
  constexpr double h = std::numbers::pi / 2;
  if (d == 1) {
    const std::array<double, 1> xi{rho};
    return full(std::span<const double>(xi));
  }
  if (d == 2) {
    auto g = [&](double phi) {
      const std::array<double, 2> xi{rho * std::cos(phi), rho * std::sin(phi)};
      return full(std::span<const double>(xi));
    };
    return quad::adaptive(g, 0.0, h, {0.0, rel, 200}).value / h;
  }
  if (d == 3) {
    auto outer = [&](double th) {
      const double s = std::sin(th), c = std::cos(th);
      auto inner = [&](double phi) {
        const std::array<double, 3> xi{rho * s * std::cos(phi), rho * s * std::sin(phi), rho * c};
        return full(std::span<const double>(xi));
      };
      return s * quad::adaptive(inner, 0.0, h, {0.0, rel, 200}).value;
    };
    return quad::adaptive(outer, 0.0, h, {0.0, rel, 200}).value / h;
  }
  throw Unsupported("angular average of a non-radial integrand needs d <= 3");
}

}  // namespace sheq::spectral
