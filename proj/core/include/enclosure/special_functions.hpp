#pragma once

namespace enclosure::special {

/// phi(s) = s cosh s - sinh s.
double phi(double s);
/// Psi(s) = (s^2 + 2) cosh s - 2 s sinh s - 2.
double Psi(double s);
/// s phi(s) - Psi(s) = s sinh s - 2 cosh s + 2, the radial profile factor
/// of the stationary potential v0.
double source_factor(double s);

// e^{-s} times the functions above; finite for every s >= 0.
double phi_scaled(double s);
double Psi_scaled(double s);
double source_factor_scaled(double s);

}  // namespace enclosure::special
