#include "qdpi/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "qdpi/errors.hpp"

namespace qdpi {

GaussLegendreRule gauss_legendre(int points) {
  if (points < 1) throw ValidationError("bad_quadrature", "need at least one node");
  GaussLegendreRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const int half = (points + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < points; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = points * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[points - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[points - 1 - i] = w;
  }
  return rule;
}

namespace {

double composite(const std::function<double(double)>& f, int panels,
                 const GaussLegendreRule& rule) {
  const double h = 1.0 / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    double panel = 0.0;
    for (size_t k = 0; k < rule.nodes.size(); ++k) {
      const double u = a + 0.5 * h * (rule.nodes[k] + 1.0);
      panel += rule.weights[k] * f(u);
    }
    total += 0.5 * h * panel;
  }
  return total;
}

}  // namespace

QuadratureResult integrate_unit_interval(const std::function<double(double)>& f, int panels,
                                         int nodes) {
  const GaussLegendreRule rule = gauss_legendre(nodes);
  const double coarse = composite(f, panels, rule);
  const double fine = composite(f, 2 * panels, rule);
  return {fine, std::abs(fine - coarse)};
}

}  // namespace qdpi
