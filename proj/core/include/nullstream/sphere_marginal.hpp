#pragma once

#include <cstddef>

namespace nullstream {

// Exact law of one coordinate of a uniform point on S^{d-1}: density
// proportional to (1 - t^2)^{(d-3)/2} on [-1, 1]. Evaluated by adaptive
// Gauss-Kronrod quadrature after the substitution t = sin(phi), which turns
// the integrand into cos^{d-2}(phi) and removes the endpoint singularity at
// d = 2.

/// Pr(e_1^T theta <= t).
double sphere_coordinate_cdf(std::size_t d, double t);

/// Pr(e_1^T theta >= c).
double sphere_coordinate_tail(std::size_t d, double c);

/// Pr(|e_1^T theta| >= c) for c >= 0.
double sphere_abs_coordinate_tail(std::size_t d, double c);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace nullstream
