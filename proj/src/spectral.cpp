#include "sheq/spectral.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

namespace sheq::spectral {

using std::numbers::pi;

double fourier_norm(int d) { return std::pow(2.0 * pi, -d); }

double sphere_area(int d) { return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d); }

double spherical_kernel(int d, double z) {
  z = std::abs(z);
  switch (d) {
    case 1:
      return std::cos(z);
    case 2:
      return std::cyl_bessel_j(0.0, z);
    case 3:
      return z < 1e-4 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
    default: {
      const double nu = 0.5 * d - 1.0;
      if (z < 1e-4) return 1.0 - z * z / (2.0 * d);
      return std::tgamma(0.5 * d) * std::pow(2.0 / z, nu) * std::cyl_bessel_j(nu, z);
    }
  }
}

double one_minus_spherical_kernel(int d, double z) {
  z = std::abs(z);
  if (d == 1) {
    const double s = std::sin(0.5 * z);
    return 2.0 * s * s;
  }
  // Series 1 - K = z^2/(2d) - z^4/(8d(d+2)) + z^6/(48 d(d+2)(d+4)).
  if (z < 0.05) {
    const double z2 = z * z;
    return z2 / (2.0 * d) - z2 * z2 / (8.0 * d * (d + 2)) +
           z2 * z2 * z2 / (48.0 * d * (d + 2) * (d + 4));
  }
  return 1.0 - spherical_kernel(d, z);
}

double spherical_kernel_zero(int d, int k) {
  if (d == 1) return (k - 0.5) * pi;
  if (d == 3) return k * pi;
  return boost::math::cyl_bessel_j_zero(0.5 * d - 1.0, k);
}

}  // namespace sheq::spectral
