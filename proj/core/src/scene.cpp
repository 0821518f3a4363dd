#include "enclosure/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "enclosure/errors.hpp"

namespace enclosure {

bool Box::contains(const Vec3& x) const {
    for (int i = 0; i < 3; ++i) {
        if (x[i] < min[i] || x[i] > max[i]) return false;
    }
    return true;
}

double Box::distance_to(const Vec3& x) const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double d = std::max({min[i] - x[i], 0.0, x[i] - max[i]});
        s += d * d;
    }
    return std::sqrt(s);
}

double Box::depth_of(const Vec3& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) d = std::min({d, x[i] - min[i], max[i] - x[i]});
    return d;
}

double Sphere::volume() const { return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius; }

std::vector<double> TauGridSpec::expand() const {
    std::vector<double> taus;
    if (count <= 0) return taus;
    if (count == 1) return {min};
    taus.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        taus.push_back(spacing == TauSpacing::log ? min * std::pow(max / min, f)
                                                  : min + (max - min) * f);
    }
    taus.back() = max;
    return taus;
}

std::vector<Violation> check(const SceneConfig& c) {
    std::vector<Violation> out;
    auto add = [&out](ViolationKind k, std::string m) { out.push_back({k, std::move(m)}); };

    const Vec3 ext = c.omega.extent();
    if (ext.x <= 0 || ext.y <= 0 || ext.z <= 0) add(ViolationKind::config, "omega_box has non-positive extent");
    if (!(c.probe.radius > 0)) add(ViolationKind::config, "probe radius must be positive");
    if (!(c.T > 0)) add(ViolationKind::config, "time horizon T must be positive");
    if (!(c.h > 0)) add(ViolationKind::config, "grid spacing h must be positive");
    if (!(c.dt > 0)) add(ViolationKind::config, "time step dt must be positive");
    if (c.localization_M && !(*c.localization_M > 0)) add(ViolationKind::config, "M must be positive");

    if (c.h > 0 && ext.x > 0 && ext.y > 0 && ext.z > 0) {
        for (int i = 0; i < 3; ++i) {
            const double cells = ext[i] / c.h;
            if (std::abs(cells - std::round(cells)) > 1e-6 * std::max(1.0, cells)) {
                add(ViolationKind::config, "omega_box extent is not a multiple of h");
                break;
            }
        }
    }

    if (c.probe.radius > 0 && c.omega.distance_to(c.probe.center) <= c.probe.radius) {
        add(ViolationKind::overlap, "closure of the probe ball meets the closure of omega");
    }
    for (std::size_t i = 0; i < c.obstacles.size(); ++i) {
        const Sphere& s = c.obstacles[i];
        if (!(s.radius > 0)) {
            add(ViolationKind::config, "obstacle " + std::to_string(i) + " has non-positive radius");
            continue;
        }
        if (!c.omega.contains(s.center) || c.omega.depth_of(s.center) <= s.radius) {
            add(ViolationKind::overlap, "obstacle " + std::to_string(i) + " is not strictly inside omega");
        }
        for (std::size_t j = i + 1; j < c.obstacles.size(); ++j) {
            const Sphere& o = c.obstacles[j];
            if (distance(s.center, o.center) <= s.radius + o.radius) {
                add(ViolationKind::overlap,
                    "obstacles " + std::to_string(i) + " and " + std::to_string(j) + " touch");
            }
        }
    }

    if (c.h > 0 && c.dt > c.h / std::sqrt(3.0)) {
        add(ViolationKind::stability, "dt exceeds the explicit stability bound h/sqrt(3)");
    }

    if (c.tau_grid.empty()) {
        add(ViolationKind::empty_tau_grid, "tau grid is empty");
    } else {
        for (std::size_t i = 0; i < c.tau_grid.size(); ++i) {
            if (!(c.tau_grid[i] > 0) || (i > 0 && !(c.tau_grid[i] > c.tau_grid[i - 1]))) {
                add(ViolationKind::empty_tau_grid, "tau grid must be positive and strictly increasing");
                break;
            }
        }
    }
    return out;
}

ValidatedScene ValidatedScene::validate(SceneConfig config) {
    const auto violations = check(config);
    if (violations.empty()) return ValidatedScene(std::move(config));

    std::ostringstream msg;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) msg << "; ";
        msg << violations[i].message;
    }
    switch (violations.front().kind) {
        case ViolationKind::overlap: throw OverlapError(msg.str());
        case ViolationKind::stability: throw StabilityError(msg.str());
        case ViolationKind::empty_tau_grid: throw EmptyTauGrid(msg.str());
        case ViolationKind::config: break;
    }
    throw ConfigError(msg.str());
}

ValidatedScene ValidatedScene::without_obstacles() const {
    SceneConfig c = config_;
    c.obstacles.clear();
    return ValidatedScene(std::move(c));
}

ValidatedScene ValidatedScene::with_probe(const ProbeBall& probe) const {
    SceneConfig c = config_;
    c.probe = probe;
    return validate(std::move(c));
}

GeometryReport geometry_report(const ValidatedScene& scene) {
    const ProbeBall& b = scene.probe();
    double d_surface = std::numeric_limits<double>::infinity();
    for (const Sphere& s : scene.obstacles()) {
        d_surface = std::min(d_surface, distance(b.center, s.center) - s.radius);
    }
    GeometryReport r{};
    r.dist_Omega_B = scene.omega().distance_to(b.center) - b.radius;
    r.d_partialD_p = d_surface;
    r.dist_D_B = d_surface - b.radius;
    r.T_threshold_thm = 2.0 * r.dist_D_B - r.dist_Omega_B;
    r.T_threshold_dichotomy = 2.0 * r.dist_D_B;
    return r;
}

Vec3 nearest_obstacle_point(const std::vector<Sphere>& obstacles, const Vec3& x) {
    Vec3 best{};
    double best_d = std::numeric_limits<double>::infinity();
    for (const Sphere& s : obstacles) {
        const double c = distance(x, s.center);
        if (c - s.radius < best_d) {
            best_d = c - s.radius;
            best = s.center + (x - s.center) * (s.radius / c);
        }
    }
    return best;
}

SceneConfig reference_scene(double h) {
    SceneConfig c;
    c.omega = {{0, 0, 0}, {1, 1, 1}};
    c.obstacles = {{{0.5, 0.5, 0.5}, 0.15}};
    c.probe = {{-0.5, 0.5, 0.5}, 0.1};
    c.T = 1.6;
    c.h = h;
    c.dt = 0.4 * h;
    c.tau_spec = {4.0, 20.0, 24, TauSpacing::log};
    c.tau_grid = c.tau_spec.expand();
    return c;
}

}  // namespace enclosure
