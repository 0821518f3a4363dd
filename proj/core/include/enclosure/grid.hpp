#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "enclosure/scene.hpp"
#include "enclosure/vec3.hpp"

namespace enclosure {

/// Uniform cell-centred lattice with one layer of padding on every side.
/// Cell (i, j, k), 0 <= i < nx, has centre origin + (i + 1/2, j + 1/2, k + 1/2) h.
struct Lattice {
    int nx = 0;
    int ny = 0;
    int nz = 0;
    double h = 0.0;
    Vec3 origin;

    static Lattice covering(const Box& box, double h);

    std::size_t stride_y() const { return static_cast<std::size_t>(nx + 2); }
    std::size_t stride_z() const { return stride_y() * static_cast<std::size_t>(ny + 2); }
    std::size_t padded_size() const { return stride_z() * static_cast<std::size_t>(nz + 2); }
    std::size_t cell_count() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
    }
    /// Padded linear index; i, j, k may be -1 or n (padding).
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k + 1) * static_cast<std::size_t>(ny + 2) + static_cast<std::size_t>(j + 1)) *
                   stride_y() +
               static_cast<std::size_t>(i + 1);
    }
    Vec3 cell_center(int i, int j, int k) const {
        return origin + Vec3{(i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h};
    }
    double cell_volume() const { return h * h * h; }
};

enum class CellKind : std::uint8_t { exterior = 0, fluid = 1, obstacle = 2 };

/// Cell classification; obstacle cells are those whose centre lies inside
/// an obstacle sphere (staircase approximation of D).
struct FluidMask {
    Lattice lattice;
    std::vector<CellKind> kind;

    static FluidMask build(const Lattice& lattice, const std::vector<Sphere>& obstacles);

    bool is_fluid(std::size_t idx) const { return kind[idx] == CellKind::fluid; }
    std::size_t count(CellKind k) const;
};

/// Scalar field on a lattice (padding included, padding values are zero).
struct GridField {
    Lattice lattice;
    std::vector<double> values;

    GridField() = default;
    explicit GridField(const Lattice& l) : lattice(l), values(l.padded_size(), 0.0) {}

    double& at(int i, int j, int k) { return values[lattice.index(i, j, k)]; }
    double at(int i, int j, int k) const { return values[lattice.index(i, j, k)]; }
    /// Trilinear interpolation between cell centres.
    double sample(const Vec3& x) const;
};

/// A lattice face on the boundary of the fluid region; the normal points
/// out of the fluid.
struct BoundaryFace {
    Vec3 center;
    Vec3 normal;
    double area = 0.0;
    std::size_t cell = 0;  ///< padded index of the adjacent fluid cell
};

/// Faces of the fluid region lying on the outer box, ordered by side
/// (-x, +x, -y, +y, -z, +z) then lattice order.
std::vector<BoundaryFace> outer_faces(const FluidMask& mask);
/// Staircase faces between fluid and obstacle cells.
std::vector<BoundaryFace> obstacle_faces(const FluidMask& mask);

}  // namespace enclosure
