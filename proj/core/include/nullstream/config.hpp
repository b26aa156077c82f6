#pragma once

#include <cmath>

namespace nullstream {

/// The universal constants of the hard-instance constructions. None of them
/// has a prescribed numeric value; the defaults keep desk-scale instances
/// (d up to a few hundred) feasible and leave slack in every reduction chain.
struct Constants {
  double c1 = 0.09;   ///< ANV loss threshold sum (w^T theta_i)^2 <= c1.
  double c2 = 0.05;   ///< Tolerated misclassified fraction.
  double c = 0.2;     ///< Separator-instance scale; D_V shifts points by c/4 along e_1/sqrt(d).
  double c_f = 0.2;   ///< Conditioning level e_1^T ker >= c_f.

  /// LSP perturbation size.
  double c4() const { return std::sqrt(c1); }
};

}  // namespace nullstream
