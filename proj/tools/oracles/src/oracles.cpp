#include "oracles/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace oracles {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

std::pair<double, double> kronrod(const Fn& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kr = kWgk[7] * fc;
    double g = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double s = f(c - h * kXgk[i]) + f(c + h * kXgk[i]);
        kr += kWgk[i] * s;
        if (i % 2 == 1) g += kWg[i / 2] * s;
    }
    return {kr * h, std::abs((kr - g) * h)};
}

double adapt(const Fn& f, double a, double b, double abs_tol, int depth) {
    const auto [val, err] = kronrod(f, a, b);
    if (err <= abs_tol || depth == 0 || b - a < 1e-14 * (std::abs(a) + std::abs(b))) return val;
    const double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * abs_tol, depth - 1) + adapt(f, m, b, 0.5 * abs_tol, depth - 1);
}

}  // namespace

double integrate(const Fn& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    if (b < a) return -integrate(f, b, a, rel_tol);
    const auto [rough, err] = kronrod(f, a, b);
    (void)err;
    const double scale = std::max(std::abs(rough), std::numeric_limits<double>::min());
    return adapt(f, a, b, rel_tol * scale, 40);
}

double integrate(const Fn& f, double a, double b, std::vector<double> breaks, double rel_tol) {
    std::vector<double> pts = {a};
    std::sort(breaks.begin(), breaks.end());
    for (double x : breaks) {
        if (x > a && x < b) pts.push_back(x);
    }
    pts.push_back(b);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) sum += integrate(f, pts[i], pts[i + 1], rel_tol);
    return sum;
}

double derivative(const Fn& f, double x, double step) {
    return (f(x - 2 * step) - 8 * f(x - step) + 8 * f(x + step) - f(x + 2 * step)) / (12 * step);
}

RadialWave::RadialWave(Fn psi, double support, std::vector<double> kinks)
    : psi_(std::move(psi)), support_(support), kinks_(std::move(kinks)) {}

double RadialWave::v(double r, double t) const {
    if (t <= 0.0) return 0.0;
    if (r < 1e-12) return t < support_ ? t * psi_(t) : 0.0;
    const double lo = std::abs(r - t);
    const double hi = std::min(r + t, support_);
    if (lo >= hi) return 0.0;
    const auto& psi = psi_;
    return integrate([&](double s) { return s * psi(s); }, lo, hi, kinks_, 1e-14) / (2.0 * r);
}

double RadialWave::dv_dr(double r, double t) const {
    return derivative([&](double rr) { return v(rr, t); }, r, 1e-4 * std::max(r, 0.01));
}

double RadialWave::dv_dt(double r, double t) const {
    return derivative([&](double tt) { return v(r, tt); }, t, 1e-4 * std::max(t, 0.01));
}

double RadialWave::laplace(double r, double tau, double T) const {
    const double lo = std::max(0.0, r - support_);
    const double hi = std::min(T, r + support_);
    if (lo >= hi) return 0.0;
    std::vector<double> breaks = {r};
    for (double k : kinks_) {
        breaks.push_back(std::abs(r - k));
        breaks.push_back(r + k);
    }
    return integrate([&](double t) { return std::exp(-tau * t) * v(r, t); }, lo, hi, breaks, 1e-13);
}

double RadialWave::dr_laplace(double r, double tau, double T) const {
    return derivative([&](double rr) { return laplace(rr, tau, T); }, r, 1e-4 * std::max(r, 0.01));
}

RadialWave probe_wave(double eta, double amplitude) {
    return RadialWave([eta, amplitude](double s) { return s < eta ? amplitude * (eta - s) : 0.0; }, eta, {eta});
}

double ball_integral(const Vec3& x, const Vec3& p, double eta, double tau, const Fn& g, double rel_tol) {
    const double pi = std::numbers::pi;
    auto kernel = [&](double rho, double theta, double phi) {
        const Vec3 y{p.x + rho * std::sin(theta) * std::cos(phi), p.y + rho * std::sin(theta) * std::sin(phi),
                     p.z + rho * std::cos(theta)};
        const double d = enclosure::distance(x, y);
        return std::exp(-tau * d) / d * g(rho) * rho * rho * std::sin(theta);
    };
    return integrate(
        [&](double rho) {
            return integrate(
                [&](double theta) {
                    return integrate([&](double phi) { return kernel(rho, theta, phi); }, 0.0, 2.0 * pi,
                                     0.1 * rel_tol);
                },
                0.0, pi, 0.1 * rel_tol);
        },
        0.0, eta, rel_tol);
}

double v0_by_ball(const Vec3& x, const Vec3& p, double eta, double tau, double amplitude) {
    return ball_integral(x, p, eta, tau, [&](double rho) { return amplitude * (eta - rho); }) /
           (4.0 * std::numbers::pi);
}

double cloud_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& u : a) {
        for (const auto& w : b) best = std::min(best, enclosure::distance(u, w));
    }
    return best;
}

std::vector<Vec3> sphere_cloud(const Vec3& c, double r, int n) {
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(n));
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n;
        const double s = std::sqrt(1.0 - z * z);
        const double a = golden * i;
        pts.push_back({c.x + r * s * std::cos(a), c.y + r * s * std::sin(a), c.z + r * z});
    }
    return pts;
}

std::vector<Vec3> box_surface_cloud(const Vec3& lo, const Vec3& hi, int n) {
    std::vector<Vec3> pts;
    for (int axis = 0; axis < 3; ++axis) {
        const int u = (axis + 1) % 3;
        const int w = (axis + 2) % 3;
        for (double side : {lo[axis], hi[axis]}) {
            for (int i = 0; i <= n; ++i) {
                for (int j = 0; j <= n; ++j) {
                    Vec3 q;
                    q[axis] = side;
                    q[u] = lo[u] + (hi[u] - lo[u]) * i / n;
                    q[w] = lo[w] + (hi[w] - lo[w]) * j / n;
                    pts.push_back(q);
                }
            }
        }
    }
    return pts;
}

}  // namespace oracles
