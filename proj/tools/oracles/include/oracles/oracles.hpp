#pragma once

// Reference computations that share no code with the core library. Every
// value here comes from direct numerical integration or differencing of
// the defining formulas, never from the closed forms under test.

#include <functional>
#include <vector>

#include "enclosure/vec3.hpp"

namespace oracles {

using enclosure::Vec3;
using Fn = std::function<double(double)>;

/// Adaptive Gauss–Kronrod (7, 15) with relative tolerance `rel_tol`.
double integrate(const Fn& f, double a, double b, double rel_tol = 1e-12);
/// Same, split at interior breakpoints (ignored when outside (a, b)).
double integrate(const Fn& f, double a, double b, std::vector<double> breaks, double rel_tol = 1e-12);

/// Fourth-order central difference.
double derivative(const Fn& f, double x, double step);

/// Free-space wave from a radially symmetric initial velocity psi(|x - p|)
/// and zero displacement: the spherical-mean (Kirchhoff) formula
///   v(r, t) = 1/(2r) int_{|r-t|}^{r+t} s psi(s) ds.
class RadialWave {
public:
    RadialWave(Fn psi, double support, std::vector<double> kinks = {});

    double v(double r, double t) const;
    double dv_dr(double r, double t) const;
    double dv_dt(double r, double t) const;
    /// int_0^T e^{-tau t} v(r, t) dt.
    double laplace(double r, double tau, double T) const;
    double dr_laplace(double r, double tau, double T) const;

private:
    Fn psi_;
    double support_;
    std::vector<double> kinks_;
};

/// Pulse psi(s) = amplitude (eta - s) on s < eta.
RadialWave probe_wave(double eta, double amplitude = 1.0);

/// int over the ball B(p, eta) of g(|y - p|) e^{-tau|x-y|}/|x-y| dy in
/// spherical coordinates about p (x outside the closed ball).
double ball_integral(const Vec3& x, const Vec3& p, double eta, double tau, const Fn& g, double rel_tol = 1e-11);

/// The stationary potential of the pulse by volume integration:
/// v0(x) = 1/(4 pi) int_B e^{-tau|x-y|}/|x-y| psi(y) dy.
double v0_by_ball(const Vec3& x, const Vec3& p, double eta, double tau, double amplitude = 1.0);

/// Distance between point clouds sampled on two sets, brute force.
double cloud_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);
std::vector<Vec3> sphere_cloud(const Vec3& c, double r, int n);
std::vector<Vec3> box_surface_cloud(const Vec3& lo, const Vec3& hi, int n);

}  // namespace oracles
