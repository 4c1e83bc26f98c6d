#pragma once

#include <cmath>
#include <numbers>

#include "cutwave/assembly.hpp"

namespace cutwave::problems {

/// A solution u with its gradient and the source f = u_tt - Lap u.
struct Manufactured {
  ScalarField u;
  GradientField grad_u;
  ScalarField f;
};

/// u = (1 - 4 r^2) cos(omega t) on the disc r < 0.5 (zero on the circle).
inline Manufactured disc_wave(double omega = 2.0 * std::numbers::pi) {
  Manufactured m;
  m.u = [omega](Point2 p, double t) { return (1.0 - 4.0 * (p.x * p.x + p.y * p.y)) * std::cos(omega * t); };
  m.grad_u = [omega](Point2 p, double t) {
    const double c = -8.0 * std::cos(omega * t);
    return Point2{c * p.x, c * p.y};
  };
  m.f = [omega](Point2 p, double t) {
    const double r2 = p.x * p.x + p.y * p.y;
    return (4.0 * omega * omega * r2 - omega * omega + 16.0) * std::cos(omega * t);
  };
  return m;
}

/// u = 1 - 4 r^2, f = -Lap u = 16.
inline Manufactured disc_poisson() {
  Manufactured m;
  m.u = [](Point2 p, double) { return 1.0 - 4.0 * (p.x * p.x + p.y * p.y); };
  m.grad_u = [](Point2 p, double) { return Point2{-8.0 * p.x, -8.0 * p.y}; };
  m.f = [](Point2, double) { return 16.0; };
  return m;
}

/// 1 + cos(pi r / r0) for r < r0, else 0.
inline ScalarField radial_pulse(double r0 = 0.2) {
  return [r0](Point2 p, double) {
    const double r = std::hypot(p.x, p.y);
    return r < r0 ? 1.0 + std::cos(std::numbers::pi * r / r0) : 0.0;
  };
}

/// 1 + cos(pi |x - center| / d0) for |x - center| < d0, else 0.
inline ScalarField plane_pulse(double d0, double center = -0.01) {
  return [d0, center](Point2 p, double) {
    const double s = std::abs(p.x - center);
    return s < d0 ? 1.0 + std::cos(std::numbers::pi * s / d0) : 0.0;
  };
}

}  // namespace cutwave::problems
