#pragma once

#include <optional>
#include <string>
#include <vector>

#include "enclosure/vec3.hpp"

namespace enclosure {

/// Axis-aligned box [min, max].
struct Box {
    Vec3 min;
    Vec3 max;

    Vec3 extent() const { return max - min; }
    bool contains(const Vec3& x) const;
    /// Euclidean distance from x to the closed box (0 inside).
    double distance_to(const Vec3& x) const;
    /// Distance from an interior point to the nearest face.
    double depth_of(const Vec3& x) const;
};

struct Sphere {
    Vec3 center;
    double radius = 0.0;

    double volume() const;
};

/// Exterior probe ball B(p, eta).
struct ProbeBall {
    Vec3 center;
    double radius = 0.0;
};

enum class TauSpacing { linear, log };

struct TauGridSpec {
    double min = 4.0;
    double max = 20.0;
    int count = 24;
    TauSpacing spacing = TauSpacing::log;

    std::vector<double> expand() const;
};

struct SceneConfig {
    Box omega{{0, 0, 0}, {1, 1, 1}};
    std::vector<Sphere> obstacles;
    ProbeBall probe;
    double T = 1.0;
    double h = 1.0 / 32.0;
    double dt = 0.4 / 32.0;
    TauGridSpec tau_spec;
    std::vector<double> tau_grid;
    std::optional<double> localization_M;
};

enum class ViolationKind { overlap, stability, empty_tau_grid, config };

struct Violation {
    ViolationKind kind;
    std::string message;
};

/// Every standing hypothesis the configuration breaks; empty when valid.
std::vector<Violation> check(const SceneConfig& config);

/// Immutable scene that passed `check`.
class ValidatedScene {
public:
    /// Throws the error type of the first violation (OverlapError,
    /// StabilityError, EmptyTauGrid or ConfigError); the message lists all.
    static ValidatedScene validate(SceneConfig config);

    const SceneConfig& config() const { return config_; }
    const Box& omega() const { return config_.omega; }
    const std::vector<Sphere>& obstacles() const { return config_.obstacles; }
    const ProbeBall& probe() const { return config_.probe; }
    const std::vector<double>& tau_grid() const { return config_.tau_grid; }

    /// Same scene with the obstacles removed (null run).
    ValidatedScene without_obstacles() const;
    /// Same scene with a different probe; revalidated.
    ValidatedScene with_probe(const ProbeBall& probe) const;

private:
    explicit ValidatedScene(SceneConfig config) : config_(std::move(config)) {}
    SceneConfig config_;
};

struct GeometryReport {
    double dist_D_B;
    double dist_Omega_B;
    double d_partialD_p;
    double T_threshold_thm;
    double T_threshold_dichotomy;
};

/// Closed-form distances for spheres in a box. With no obstacle the
/// obstacle distances are +inf.
GeometryReport geometry_report(const ValidatedScene& scene);

/// Point of the obstacle surface nearest to x (x outside every obstacle).
Vec3 nearest_obstacle_point(const std::vector<Sphere>& obstacles, const Vec3& x);

/// The reference configuration: unit box, one sphere of radius 0.15 at
/// the centre, probe (-0.5, 0.5, 0.5) with radius 0.1, grid spacing h.
SceneConfig reference_scene(double h = 1.0 / 96.0);

}  // namespace enclosure
