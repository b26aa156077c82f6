#include "nullstream/sphere_marginal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nullstream/errors.hpp"

namespace nullstream {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Integral of cos^{d-2} over [a, b] within [-pi/2, pi/2].
double cos_power_integral(std::size_t d, double a, double b) {
  if (b <= a) return 0.0;
  const double power = static_cast<double>(d) - 2.0;
  auto f = [power](double phi) {
    const double c = std::cos(phi);
    return c <= 0.0 ? (power == 0.0 ? 1.0 : 0.0) : std::pow(c, power);
  };
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-14,
                                                                       &error);
}

void require_dim(std::size_t d) {
  if (d < 2) throw InvalidArgument("sphere coordinate law needs d >= 2");
}

}  // namespace

double sphere_coordinate_tail(std::size_t d, double c) {
  require_dim(d);
  if (c <= -1.0) return 1.0;
  if (c >= 1.0) return 0.0;
  const double lo = std::asin(c);
  // Integrate whichever side is smaller to keep relative accuracy in the tail.
  const double total = cos_power_integral(d, -kHalfPi, kHalfPi);
  if (c >= 0.0) return cos_power_integral(d, lo, kHalfPi) / total;
  return 1.0 - cos_power_integral(d, -kHalfPi, lo) / total;
}

double sphere_coordinate_cdf(std::size_t d, double t) {
  return 1.0 - sphere_coordinate_tail(d, t);
}

double sphere_abs_coordinate_tail(std::size_t d, double c) {
  if (c <= 0.0) return 1.0;
  return std::min(1.0, 2.0 * sphere_coordinate_tail(d, c));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace nullstream
