#pragma once

#include <functional>

namespace pflow {

struct QuadratureTolerance {
  double rel = 1e-10;
  double abs = 1e-14;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Throws QuadratureError carrying the achieved error estimate when the
/// requested tolerance cannot be met or the integrand is not finite.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           QuadratureTolerance tol = {});

/// Integral of f(s) ds over [a, b] with a, b > 0, evaluated in u = log(s).
/// Tames integrable singularities at s -> 0 and spreads decades evenly.
QuadratureResult integrate_log(const std::function<double(double)>& f, double a, double b,
                               QuadratureTolerance tol = {});

}  // namespace pflow
