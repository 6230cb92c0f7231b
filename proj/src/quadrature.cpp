#include "pflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pflow/error.hpp"

namespace pflow {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

constexpr std::size_t kMaxPanels = 4000;

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// 15-point Kronrod value with the embedded 7-point Gauss rule as error
// estimate. Boost stores the nonnegative nodes; Gauss node j is Kronrod
// node 2j.
template <typename F>
Panel panel(F&& f, double a, double b) {
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double f0 = f(mid);
  double kron = wk[0] * f0;
  double gauss = wg[0] * f0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double pair = f(mid - half * xk[i]) + f(mid + half * xk[i]);
    kron += wk[i] * pair;
    if (i % 2 == 0) gauss += wg[i / 2] * pair;
  }
  return {a, b, kron * half, std::abs(kron - gauss) * std::abs(half)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           QuadratureTolerance tol) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgument("integrate: non-finite integration limits");
  }
  if (a == b) return {};

  // Global adaptive bisection: always split the panel with the largest error.
  std::priority_queue<Panel> panels;
  panels.push(panel(f, a, b));
  double value = panels.top().value;
  double error = panels.top().error;
  auto converged = [&] { return error <= std::max(tol.rel * std::abs(value), tol.abs); };

  while (!converged() && std::isfinite(value) && panels.size() < kMaxPanels) {
    const Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) break;  // no room left to split
    panels.pop();
    const Panel left = panel(f, worst.a, mid);
    const Panel right = panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  for (; !panels.empty(); panels.pop()) {
    value += panels.top().value;
    error += panels.top().error;
  }

  if (!std::isfinite(value) || !std::isfinite(error)) {
    throw QuadratureError("integrate: integrand produced non-finite values", error);
  }
  if (!converged()) {
    std::ostringstream msg;
    msg << "integrate: no convergence on [" << a << ", " << b << "], achieved error " << error
        << " vs target " << std::max(tol.rel * std::abs(value), tol.abs);
    throw QuadratureError(msg.str(), error);
  }
  return {value, error};
}

QuadratureResult integrate_log(const std::function<double(double)>& f, double a, double b,
                               QuadratureTolerance tol) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw InvalidArgument("integrate_log: limits must be positive");
  }
  auto g = [&f](double u) {
    const double s = std::exp(u);
    return f(s) * s;
  };
  return integrate(g, std::log(a), std::log(b), tol);
}

}  // namespace pflow
