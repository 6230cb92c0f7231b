#pragma once

#include <cmath>
#include <cstddef>

// Reference integrators kept deliberately naive so they share no code with
// the library's adaptive quadrature.
namespace oracle {

template <typename F>
double simpson(F&& f, double a, double b, std::size_t panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) {
    sum += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  }
  return sum * h / 3.0;
}

// Simpson in u = log s, for integrands spanning many decades.
template <typename F>
double simpson_log(F&& f, double a, double b, std::size_t panels) {
  return simpson([&](double u) {
    const double s = std::exp(u);
    return f(s) * s;
  }, std::log(a), std::log(b), panels);
}

template <typename F>
double central_difference(F&& f, double x, double rel_step = 1e-5) {
  const double h = rel_step * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline bool close(double a, double b, double rel, double abs = 0.0) {
  return std::abs(a - b) <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

}  // namespace oracle
