#pragma once

#include "enclosure/scene.hpp"
#include "enclosure/vec3.hpp"

namespace enclosure {

struct BoundCertificate {
    double lhs;     ///< v0(x)
    double rhs;     ///< C tau^-3 e^{-tau(|x-p|-eta)} / |x-p|
    double margin;  ///< log(lhs / rhs)
    bool claimed;   ///< tau * eta >= 10; the bound is asymptotic in tau
};

/// Closed-form fields generated by the initial velocity
/// Psi_B(x) = amplitude * (eta - |x - p|) on the ball B(p, eta).
///
/// The free-space wave is evaluated through the radial reduction
///   r v(r, t) = (H(r + t) - H(r - t)) / 2,   H' = G,  G(s) = s (eta - |s|) on |s| < eta,
/// which makes v piecewise cubic in (r, t) with breakpoints at
/// t = |r - eta|, r, r + eta.
class ProbePulse {
public:
    ProbePulse(Vec3 center, double radius, double amplitude = 1.0);
    explicit ProbePulse(const ProbeBall& ball, double amplitude = 1.0)
        : ProbePulse(ball.center, ball.radius, amplitude) {}

    const Vec3& center() const { return center_; }
    double radius() const { return eta_; }
    double amplitude() const { return amplitude_; }

    double psi_B(const Vec3& x) const;

    // Free-space wave v_B as a function of r = |x - p| and t.
    double v(double r, double t) const;
    double dv_dr(double r, double t) const;
    double dv_dt(double r, double t) const;

    double v_at(const Vec3& x, double t) const { return v(distance(x, center_), t); }
    Vec3 grad_v(const Vec3& x, double t) const;
    /// f_B = d v_B / d n at x; DomainError inside the closed ball.
    double f_B(const Vec3& x, const Vec3& n, double t) const;

    /// Stationary potential v0 solving (Delta - tau^2) v + Psi_B = 0;
    /// DomainError for x in the closed ball.
    double v0(const Vec3& x, double tau) const;
    Vec3 grad_v0(const Vec3& x, double tau) const;

    /// int_B e^{-tau|x-y|}/|x-y| |y-p| dy (independent of amplitude).
    double ball_potential_weighted(const Vec3& x, double tau) const;
    /// int_B e^{-tau|x-y|}/|x-y| dy (independent of amplitude).
    double ball_potential_char(const Vec3& x, double tau) const;

    /// Lower bound v0 >= C tau^-3 e^{-tau(|x-p|-eta)}/|x-p| with
    /// C = amplitude * eta / 4.
    BoundCertificate bound_certificate(const Vec3& x, double tau) const;

    /// Truncated Laplace transform int_0^T e^{-tau t} v_B(x, t) dt.
    double w0_truncated(const Vec3& x, double tau, double T) const;
    Vec3 grad_w0_truncated(const Vec3& x, double tau, double T) const;
    double dn_w0_truncated(const Vec3& x, const Vec3& n, double tau, double T) const;

    // Radial forms of the above (r = |x - p|).
    double w0_truncated_radial(double r, double tau, double T) const;
    double dr_w0_truncated_radial(double r, double tau, double T) const;
    double v0_radial(double r, double tau) const;
    double dr_v0_radial(double r, double tau) const;

private:
    double H(double s) const;
    double G(double s) const;
    template <typename F>
    double laplace_in_time(double r, double tau, double T, F&& integrand) const;

    Vec3 center_;
    double eta_;
    double amplitude_;
};

}  // namespace enclosure
