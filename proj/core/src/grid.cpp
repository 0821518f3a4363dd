#include "enclosure/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "enclosure/errors.hpp"

namespace enclosure {

Lattice Lattice::covering(const Box& box, double h) {
    const Vec3 ext = box.extent();
    Lattice l;
    l.nx = static_cast<int>(std::lround(ext.x / h));
    l.ny = static_cast<int>(std::lround(ext.y / h));
    l.nz = static_cast<int>(std::lround(ext.z / h));
    l.h = h;
    l.origin = box.min;
    if (l.nx < 2 || l.ny < 2 || l.nz < 2) throw ConfigError("lattice needs at least two cells per axis");
    return l;
}

FluidMask FluidMask::build(const Lattice& lattice, const std::vector<Sphere>& obstacles) {
    FluidMask m{lattice, std::vector<CellKind>(lattice.padded_size(), CellKind::exterior)};
    for (int k = 0; k < lattice.nz; ++k) {
        for (int j = 0; j < lattice.ny; ++j) {
            for (int i = 0; i < lattice.nx; ++i) {
                const Vec3 c = lattice.cell_center(i, j, k);
                const bool inside = std::any_of(obstacles.begin(), obstacles.end(), [&](const Sphere& s) {
                    return distance(c, s.center) < s.radius;
                });
                m.kind[lattice.index(i, j, k)] = inside ? CellKind::obstacle : CellKind::fluid;
            }
        }
    }
    return m;
}

std::size_t FluidMask::count(CellKind k) const { return static_cast<std::size_t>(std::count(kind.begin(), kind.end(), k)); }

double GridField::sample(const Vec3& x) const {
    const Lattice& l = lattice;
    const double fx = (x.x - l.origin.x) / l.h - 0.5;
    const double fy = (x.y - l.origin.y) / l.h - 0.5;
    const double fz = (x.z - l.origin.z) / l.h - 0.5;
    const int i0 = std::clamp(static_cast<int>(std::floor(fx)), 0, l.nx - 2);
    const int j0 = std::clamp(static_cast<int>(std::floor(fy)), 0, l.ny - 2);
    const int k0 = std::clamp(static_cast<int>(std::floor(fz)), 0, l.nz - 2);
    const double tx = fx - i0, ty = fy - j0, tz = fz - k0;
    double s = 0.0;
    for (int dk = 0; dk < 2; ++dk) {
        for (int dj = 0; dj < 2; ++dj) {
            for (int di = 0; di < 2; ++di) {
                const double w = (di ? tx : 1 - tx) * (dj ? ty : 1 - ty) * (dk ? tz : 1 - tz);
                s += w * at(i0 + di, j0 + dj, k0 + dk);
            }
        }
    }
    return s;
}

std::vector<BoundaryFace> outer_faces(const FluidMask& mask) {
    const Lattice& l = mask.lattice;
    const double h = l.h;
    std::vector<BoundaryFace> faces;
    const std::array<int, 3> n{l.nx, l.ny, l.nz};
    for (int axis = 0; axis < 3; ++axis) {
        const int a1 = (axis + 1) % 3;
        const int a2 = (axis + 2) % 3;
        const int lo = std::min(a1, a2), hi = std::max(a1, a2);
        for (int side = 0; side < 2; ++side) {
            for (int q = 0; q < n[static_cast<std::size_t>(hi)]; ++q) {
                for (int r = 0; r < n[static_cast<std::size_t>(lo)]; ++r) {
                    std::array<int, 3> ijk{};
                    ijk[static_cast<std::size_t>(axis)] = side ? n[static_cast<std::size_t>(axis)] - 1 : 0;
                    ijk[static_cast<std::size_t>(lo)] = r;
                    ijk[static_cast<std::size_t>(hi)] = q;
                    const std::size_t idx = l.index(ijk[0], ijk[1], ijk[2]);
                    if (!mask.is_fluid(idx)) continue;
                    BoundaryFace f;
                    f.center = l.cell_center(ijk[0], ijk[1], ijk[2]);
                    f.center[axis] += side ? 0.5 * h : -0.5 * h;
                    f.normal[axis] = side ? 1.0 : -1.0;
                    f.area = h * h;
                    f.cell = idx;
                    faces.push_back(f);
                }
            }
        }
    }
    return faces;
}

std::vector<BoundaryFace> obstacle_faces(const FluidMask& mask) {
    const Lattice& l = mask.lattice;
    const double h = l.h;
    const std::array<std::ptrdiff_t, 3> stride{1, static_cast<std::ptrdiff_t>(l.stride_y()),
                                               static_cast<std::ptrdiff_t>(l.stride_z())};
    std::vector<BoundaryFace> faces;
    for (int k = 0; k < l.nz; ++k) {
        for (int j = 0; j < l.ny; ++j) {
            for (int i = 0; i < l.nx; ++i) {
                const std::size_t idx = l.index(i, j, k);
                if (!mask.is_fluid(idx)) continue;
                for (int axis = 0; axis < 3; ++axis) {
                    for (int sgn = -1; sgn <= 1; sgn += 2) {
                        const auto nb = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) +
                                                                 sgn * stride[static_cast<std::size_t>(axis)]);
                        if (mask.kind[nb] != CellKind::obstacle) continue;
                        BoundaryFace f;
                        f.center = l.cell_center(i, j, k);
                        f.center[axis] += 0.5 * h * sgn;
                        f.normal[axis] = sgn;
                        f.area = h * h;
                        f.cell = idx;
                        faces.push_back(f);
                    }
                }
            }
        }
    }
    return faces;
}

}  // namespace enclosure
