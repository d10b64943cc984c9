#pragma once

#include <functional>
#include <vector>

namespace qdpi {

/// Nodes and weights of the k-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Computed by Newton iteration on the Legendre polynomial; deterministic.
GaussLegendreRule gauss_legendre(int points);

struct QuadratureResult {
  double value = 0.0;
  /// |value at 2x panels - value at 1x panels|; `value` is the finer one.
  double error_estimate = 0.0;
};

/// Composite Gauss-Legendre integration of f over (0, 1) with `panels` equal
/// panels of `nodes` points each.  The returned value uses doubled panels and
/// the difference to the single-resolution result is the error estimate.
QuadratureResult integrate_unit_interval(const std::function<double(double)>& f, int panels,
                                         int nodes);

}  // namespace qdpi
