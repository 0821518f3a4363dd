#include "enclosure/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "enclosure/errors.hpp"
#include "enclosure/quadrature.hpp"
#include "enclosure/special_functions.hpp"

namespace enclosure {
namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

// Radii below this (relative to eta) use the r -> 0 limit of the radial
// reduction.
constexpr double kTinyRadius = 1e-12;

}  // namespace

ProbePulse::ProbePulse(Vec3 center, double radius, double amplitude)
    : center_(center), eta_(radius), amplitude_(amplitude) {
    if (!(radius > 0)) throw DomainError("probe radius must be positive");
}

double ProbePulse::G(double s) const {
    const double a = std::abs(s);
    return a < eta_ ? s * (eta_ - a) : 0.0;
}

double ProbePulse::H(double s) const {
    const double a = std::abs(s);
    if (a >= eta_) return eta_ * eta_ * eta_ / 6.0;
    return a * a * (eta_ / 2.0 - a / 3.0);
}

double ProbePulse::psi_B(const Vec3& x) const {
    const double r = distance(x, center_);
    return r < eta_ ? amplitude_ * (eta_ - r) : 0.0;
}

double ProbePulse::v(double r, double t) const {
    if (r < 0 || t < 0) throw DomainError("v_B needs r >= 0 and t >= 0");
    if (r < kTinyRadius * eta_) return amplitude_ * (t < eta_ ? t * (eta_ - t) : 0.0);
    if (t <= r - eta_ || t >= r + eta_) return 0.0;
    return amplitude_ * (H(r + t) - H(r - t)) / (2.0 * r);
}

double ProbePulse::dv_dr(double r, double t) const {
    if (r < 0 || t < 0) throw DomainError("v_B needs r >= 0 and t >= 0");
    if (r < kTinyRadius * eta_) return 0.0;
    if (t <= r - eta_ || t >= r + eta_) return 0.0;
    const double g = (G(r + t) - G(r - t)) / (2.0 * r);
    const double h = (H(r + t) - H(r - t)) / (2.0 * r * r);
    return amplitude_ * (g - h);
}

double ProbePulse::dv_dt(double r, double t) const {
    if (r < 0 || t < 0) throw DomainError("v_B needs r >= 0 and t >= 0");
    if (r < kTinyRadius * eta_) return amplitude_ * (t < eta_ ? eta_ - 2.0 * t : 0.0);
    if (t <= r - eta_ || t >= r + eta_) return 0.0;
    return amplitude_ * (G(r + t) + G(r - t)) / (2.0 * r);
}

Vec3 ProbePulse::grad_v(const Vec3& x, double t) const {
    const Vec3 d = x - center_;
    const double r = norm(d);
    if (r < kTinyRadius * eta_) return {};
    return d * (dv_dr(r, t) / r);
}

double ProbePulse::f_B(const Vec3& x, const Vec3& n, double t) const {
    const Vec3 d = x - center_;
    const double r = norm(d);
    if (r <= eta_) throw DomainError("f_B is defined outside the closed probe ball");
    return dv_dr(r, t) * dot(d, n) / r;
}

double ProbePulse::v0_radial(double r, double tau) const {
    if (r <= eta_) throw DomainError("v0 closed form needs |x - p| > eta");
    if (!(tau > 0)) throw DomainError("v0 needs tau > 0");
    const double t2 = tau * tau;
    return amplitude_ * special::source_factor_scaled(tau * eta_) * std::exp(-tau * (r - eta_)) /
           (t2 * t2 * r);
}

double ProbePulse::dr_v0_radial(double r, double tau) const {
    // d/dr [e^{-tau r}/r] = -e^{-tau r} (tau r + 1) / r^2
    return -v0_radial(r, tau) * (tau * r + 1.0) / r;
}

double ProbePulse::v0(const Vec3& x, double tau) const { return v0_radial(distance(x, center_), tau); }

Vec3 ProbePulse::grad_v0(const Vec3& x, double tau) const {
    const Vec3 d = x - center_;
    const double r = norm(d);
    return d * (dr_v0_radial(r, tau) / r);
}

double ProbePulse::ball_potential_weighted(const Vec3& x, double tau) const {
    const double r = distance(x, center_);
    if (r <= eta_) throw DomainError("ball potential closed form needs |x - p| > eta");
    const double t2 = tau * tau;
    return kFourPi / (t2 * t2) * std::exp(-tau * (r - eta_)) / r * special::Psi_scaled(tau * eta_);
}

double ProbePulse::ball_potential_char(const Vec3& x, double tau) const {
    const double r = distance(x, center_);
    if (r <= eta_) throw DomainError("ball potential closed form needs |x - p| > eta");
    return kFourPi / (tau * tau * tau) * std::exp(-tau * (r - eta_)) / r * special::phi_scaled(tau * eta_);
}

BoundCertificate ProbePulse::bound_certificate(const Vec3& x, double tau) const {
    const double r = distance(x, center_);
    const double c = amplitude_ * eta_ / 4.0;
    BoundCertificate cert{};
    cert.lhs = v0_radial(r, tau);
    cert.rhs = c / (tau * tau * tau) * std::exp(-tau * (r - eta_)) / r;
    cert.margin = std::log(cert.lhs / cert.rhs);
    cert.claimed = tau * eta_ >= 10.0;
    return cert;
}

template <typename F>
double ProbePulse::laplace_in_time(double r, double tau, double T, F&& integrand) const {
    const double start = std::max(0.0, r - eta_);
    const double stop = std::min(T, r + eta_);
    if (!(stop > start)) return 0.0;

    std::array<double, 5> cuts{start, std::abs(r - eta_), r, r + eta_, stop};
    std::sort(cuts.begin(), cuts.end());
    const GaussLegendre& rule = GaussLegendre::order32();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = std::max(cuts[i], start);
        const double b = std::min(cuts[i + 1], stop);
        if (!(b > a)) continue;
        total += rule.integrate([&](double t) { return std::exp(-tau * t) * integrand(t); }, a, b);
    }
    return total;
}

double ProbePulse::w0_truncated_radial(double r, double tau, double T) const {
    return laplace_in_time(r, tau, T, [&](double t) { return v(r, t); });
}

double ProbePulse::dr_w0_truncated_radial(double r, double tau, double T) const {
    return laplace_in_time(r, tau, T, [&](double t) { return dv_dr(r, t); });
}

double ProbePulse::w0_truncated(const Vec3& x, double tau, double T) const {
    return w0_truncated_radial(distance(x, center_), tau, T);
}

Vec3 ProbePulse::grad_w0_truncated(const Vec3& x, double tau, double T) const {
    const Vec3 d = x - center_;
    const double r = norm(d);
    if (r < kTinyRadius * eta_) return {};
    return d * (dr_w0_truncated_radial(r, tau, T) / r);
}

double ProbePulse::dn_w0_truncated(const Vec3& x, const Vec3& n, double tau, double T) const {
    return dot(grad_w0_truncated(x, tau, T), n);
}

}  // namespace enclosure
