#include "enclosure/solver.hpp"

#include <algorithm>
#include <cmath>

#include "enclosure/errors.hpp"

namespace enclosure {

LeapfrogLattice::LeapfrogLattice(FluidMask mask)
    : mask_(std::move(mask)),
      fluid_(mask_.lattice.padded_size(), 0.0),
      neighbours_(mask_.lattice.padded_size(), 0.0),
      prev_(mask_.lattice),
      curr_(mask_.lattice) {
    const Lattice& l = mask_.lattice;
    const std::size_t sy = l.stride_y(), sz = l.stride_z();
    for (int k = 0; k < l.nz; ++k) {
        for (int j = 0; j < l.ny; ++j) {
            for (int i = 0; i < l.nx; ++i) {
                const std::size_t c = l.index(i, j, k);
                if (!mask_.is_fluid(c)) continue;
                fluid_[c] = 1.0;
                neighbours_[c] = mask_.is_fluid(c - 1) + mask_.is_fluid(c + 1) + mask_.is_fluid(c - sy) +
                                 mask_.is_fluid(c + sy) + mask_.is_fluid(c - sz) + mask_.is_fluid(c + sz);
            }
        }
    }
}

void LeapfrogLattice::laplacian(const GridField& u, GridField& out) const {
    const Lattice& l = mask_.lattice;
    const std::size_t sy = l.stride_y(), sz = l.stride_z();
    const double inv_h2 = 1.0 / (l.h * l.h);
    const double* a = u.values.data();
    double* o = out.values.data();
#pragma omp parallel for schedule(static)
    for (int k = 0; k < l.nz; ++k) {
        for (int j = 0; j < l.ny; ++j) {
            const std::size_t row = l.index(0, j, k);
            for (std::size_t c = row; c < row + static_cast<std::size_t>(l.nx); ++c) {
                const double sum = a[c - 1] + a[c + 1] + a[c - sy] + a[c + sy] + a[c - sz] + a[c + sz];
                o[c] = fluid_[c] * (sum - neighbours_[c] * a[c]) * inv_h2;
            }
        }
    }
}

void LeapfrogLattice::step(double dt, std::span<const BoundaryFace> faces, std::span<const double> flux) {
    const Lattice& l = mask_.lattice;
    const std::size_t sy = l.stride_y(), sz = l.stride_z();
    const double lambda = dt * dt / (l.h * l.h);
    const double* a = curr_.values.data();
    double* b = prev_.values.data();
    const double* m = fluid_.data();
    const double* nn = neighbours_.data();
#pragma omp parallel for schedule(static)
    for (int k = 0; k < l.nz; ++k) {
        for (int j = 0; j < l.ny; ++j) {
            const std::size_t row = l.index(0, j, k);
            for (std::size_t c = row; c < row + static_cast<std::size_t>(l.nx); ++c) {
                const double sum = a[c - 1] + a[c + 1] + a[c - sy] + a[c + sy] + a[c - sz] + a[c + sz];
                b[c] = m[c] * (2.0 * a[c] - b[c] + lambda * (sum - nn[c] * a[c]));
            }
        }
    }
    const double coef = dt * dt / l.h;
    for (std::size_t f = 0; f < flux.size(); ++f) b[faces[f].cell] += coef * flux[f];
    std::swap(prev_, curr_);
}

void LeapfrogLattice::start_from_rest(double dt, std::span<const BoundaryFace> faces, std::span<const double> flux) {
    std::fill(prev_.values.begin(), prev_.values.end(), 0.0);
    std::fill(curr_.values.begin(), curr_.values.end(), 0.0);
    const double coef = 0.5 * dt * dt / lattice().h;
    GridField next(lattice());
    for (std::size_t f = 0; f < flux.size(); ++f) next.values[faces[f].cell] += coef * flux[f];
    curr_ = std::move(next);
}

void LeapfrogLattice::start_with_velocity(double dt, const GridField& velocity) {
    std::fill(prev_.values.begin(), prev_.values.end(), 0.0);
    for (std::size_t c = 0; c < curr_.values.size(); ++c) curr_.values[c] = fluid_[c] * dt * velocity.values[c];
}

void LeapfrogLattice::start_with_data(double dt, const GridField& displacement, const GridField& velocity) {
    GridField lap(lattice());
    laplacian(displacement, lap);
    for (std::size_t c = 0; c < curr_.values.size(); ++c) {
        prev_.values[c] = fluid_[c] * displacement.values[c];
        curr_.values[c] =
            fluid_[c] * (displacement.values[c] + dt * velocity.values[c] + 0.5 * dt * dt * lap.values[c]);
    }
}

double LeapfrogLattice::max_abs() const {
    double m = 0.0;
    for (double v : curr_.values) {
        if (!std::isfinite(v)) return v;
        m = std::max(m, std::abs(v));
    }
    return m;
}

double LeapfrogLattice::staggered_energy(const GridField& a, const GridField& b, double dt) const {
    const Lattice& l = mask_.lattice;
    const std::size_t strides[3] = {1, l.stride_y(), l.stride_z()};
    double kinetic = 0.0, potential = 0.0;
    for (int k = 0; k < l.nz; ++k) {
        for (int j = 0; j < l.ny; ++j) {
            for (int i = 0; i < l.nx; ++i) {
                const std::size_t c = l.index(i, j, k);
                if (!mask_.is_fluid(c)) continue;
                const double v = (a.values[c] - b.values[c]) / dt;
                kinetic += v * v;
                for (std::size_t s : strides) {
                    if (!mask_.is_fluid(c + s)) continue;
                    potential += (a.values[c + s] - a.values[c]) * (b.values[c + s] - b.values[c]);
                }
            }
        }
    }
    return (kinetic + potential / (l.h * l.h)) * l.cell_volume();
}

namespace {

// Radial data of a face relative to the probe centre.
struct FaceGeometry {
    double r;
    double cos_angle;
};

std::vector<FaceGeometry> face_geometry(const std::vector<BoundaryFace>& faces, const Vec3& p) {
    std::vector<FaceGeometry> g(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Vec3 d = faces[f].center - p;
        g[f].r = norm(d);
        g[f].cos_angle = dot(d, faces[f].normal) / g[f].r;
    }
    return g;
}

void normal_derivative(const ProbePulse& pulse, const std::vector<FaceGeometry>& geo, double t, double sign,
                       std::vector<double>& out) {
    out.resize(geo.size());
#pragma omp parallel for schedule(static)
    for (std::size_t f = 0; f < geo.size(); ++f) out[f] = sign * pulse.dv_dr(geo[f].r, t) * geo[f].cos_angle;
}

double trapezoid_weight(std::size_t n, std::size_t last, double dt) {
    return (n == 0 || n == last) ? 0.5 * dt : dt;
}

}  // namespace

ForwardRun solve_ibvp(const ValidatedScene& scene, const SolveOptions& opt) {
    const SceneConfig& cfg = scene.config();
    if (opt.record.volume_laplace && opt.taus.empty()) {
        throw ConfigError("volume Laplace accumulators requested without any tau");
    }
    if (!(opt.T_max > 0)) throw ConfigError("T_max must be positive");

    const ProbePulse pulse(cfg.probe, opt.amplitude);
    const Lattice lattice = Lattice::covering(cfg.omega, cfg.h);
    LeapfrogLattice core(FluidMask::build(lattice, cfg.obstacles));
    const double dt = cfg.dt;
    const double h = lattice.h;
    const auto steps = static_cast<std::size_t>(std::floor(opt.T_max / dt + 1e-9));
    const bool scattered = opt.formulation == Formulation::scattered_field;

    ForwardRun run{core.mask(), opt.formulation, pulse, {}, std::nullopt, std::nullopt};
    const std::vector<BoundaryFace> outer = outer_faces(core.mask());
    const std::vector<BoundaryFace> inner = obstacle_faces(core.mask());
    const std::vector<BoundaryFace>& driven = scattered ? inner : outer;
    const std::vector<FaceGeometry> outer_geo = face_geometry(outer, pulse.center());
    const std::vector<FaceGeometry> driven_geo = face_geometry(driven, pulse.center());
    const double flux_sign = scattered ? -1.0 : 1.0;

    BoundaryTrace& trace = run.trace;
    trace.faces = outer;
    trace.dt = dt;
    trace.steps = steps;
    if (opt.record.trace) trace.samples.assign((steps + 1) * outer.size(), 0.0);

    const std::size_t ntau = opt.taus.size();
    if (ntau > 0) {
        LaplaceAccumulator acc;
        acc.taus = opt.taus;
        acc.T = static_cast<double>(steps) * dt;
        acc.boundary.assign(ntau, std::vector<double>(outer.size(), 0.0));
        if (opt.record.volume_laplace) acc.volume.assign(ntau, GridField(lattice));
        run.laplace = std::move(acc);
    }

    const double source_scale = std::abs(opt.amplitude) * pulse.radius() * pulse.radius() / 4.0;
    std::vector<double> flux;
    std::vector<double> outer_flux;
    std::vector<double> face_values(outer.size());

    auto record = [&](std::size_t n) {
        const double t = static_cast<double>(n) * dt;
        const double* u = core.current().values.data();
        if (scattered) {
            for (std::size_t f = 0; f < outer.size(); ++f) face_values[f] = pulse.v(outer_geo[f].r, t) + u[outer[f].cell];
        } else {
            // Face value from the cell and its ghost u + h g.
            normal_derivative(pulse, outer_geo, t, 1.0, outer_flux);
            for (std::size_t f = 0; f < outer.size(); ++f) face_values[f] = u[outer[f].cell] + 0.5 * h * outer_flux[f];
        }
        if (opt.record.trace) std::copy(face_values.begin(), face_values.end(), trace.samples.begin() + n * outer.size());
        if (!run.laplace) return;
        for (std::size_t q = 0; q < ntau; ++q) {
            const double w = trapezoid_weight(n, steps, dt) * std::exp(-opt.taus[q] * t);
            std::vector<double>& b = run.laplace->boundary[q];
            for (std::size_t f = 0; f < outer.size(); ++f) b[f] += w * face_values[f];
            if (opt.record.volume_laplace) {
                std::vector<double>& vol = run.laplace->volume[q].values;
                const std::vector<double>& cur = core.current().values;
#pragma omp parallel for schedule(static)
                for (std::size_t c = 0; c < vol.size(); ++c) vol[c] += w * cur[c];
            }
        }
    };

    normal_derivative(pulse, driven_geo, 0.0, flux_sign, flux);
    record(0);
    core.start_from_rest(dt, driven, flux);
    GridField before_last(lattice);
    for (std::size_t n = 1; n <= steps; ++n) {
        record(n);
        if (n % 32 == 0 || n == steps) {
            const double m = core.max_abs();
            if (!std::isfinite(m) || m > 1e6 * source_scale) {
                throw StabilityError("solution blew up at t = " + std::to_string(static_cast<double>(n) * dt));
            }
        }
        if (n == steps && !opt.record.final_state) break;
        if (n == steps) before_last = core.previous();
        normal_derivative(pulse, driven_geo, static_cast<double>(n) * dt, flux_sign, flux);
        core.step(dt, driven, flux);
    }

    if (opt.record.final_state) {
        FinalState fs{static_cast<double>(steps) * dt, core.previous(), GridField(lattice)};
        for (std::size_t c = 0; c < fs.u_t.values.size(); ++c) {
            fs.u_t.values[c] = (core.current().values[c] - before_last.values[c]) / (2.0 * dt);
        }
        run.final_state = std::move(fs);
    }
    return run;
}

std::vector<double> trace_laplace(const BoundaryTrace& trace, double tau, std::size_t last_step) {
    std::vector<double> w(trace.face_count(), 0.0);
    for (std::size_t n = 0; n <= last_step; ++n) {
        const double weight = trapezoid_weight(n, last_step, trace.dt) * std::exp(-tau * trace.time(n));
        const double* row = trace.samples.data() + n * trace.face_count();
        for (std::size_t f = 0; f < w.size(); ++f) w[f] += weight * row[f];
    }
    return w;
}

FreeSpaceRun solve_free_space(const ProbePulse& pulse, const Box& box, double h, double dt, double T_max,
                              const std::vector<Vec3>& points) {
    if (!box.contains(pulse.center()) || box.depth_of(pulse.center()) - pulse.radius() <= T_max) {
        throw BoxTooSmall("free-space box must keep the pulse support farther than T_max from its walls");
    }
    if (dt > h / std::sqrt(3.0)) throw StabilityError("dt exceeds the explicit stability bound h/sqrt(3)");
    const Lattice lattice = Lattice::covering(box, h);
    LeapfrogLattice core(FluidMask::build(lattice, {}));

    GridField velocity(lattice);
    for (int k = 0; k < lattice.nz; ++k) {
        for (int j = 0; j < lattice.ny; ++j) {
            for (int i = 0; i < lattice.nx; ++i) velocity.at(i, j, k) = pulse.psi_B(lattice.cell_center(i, j, k));
        }
    }

    FreeSpaceRun run;
    run.lattice = lattice;
    run.dt = dt;
    run.steps = static_cast<std::size_t>(std::floor(T_max / dt + 1e-9));
    run.points = points;
    run.series.assign(points.size(), std::vector<double>(run.steps + 1, 0.0));

    core.start_with_velocity(dt, velocity);
    for (std::size_t n = 1; n <= run.steps; ++n) {
        for (std::size_t i = 0; i < points.size(); ++i) run.series[i][n] = core.current().sample(points[i]);
        if (n < run.steps) core.step(dt, {}, {});
    }
    run.final_u = core.current();
    return run;
}

}  // namespace enclosure
