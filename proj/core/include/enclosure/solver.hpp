#pragma once

#include <optional>
#include <span>
#include <vector>

#include "enclosure/grid.hpp"
#include "enclosure/kernels.hpp"
#include "enclosure/scene.hpp"

namespace enclosure {

/// Which field the lattice carries.
///
/// total_field: u itself, with the flux f_B imposed by ghost values on the
///   outer box and zero flux on the obstacle staircase.
/// scattered_field: u - v_B, with zero flux on the outer box and flux
///   -d v_B / d n on the obstacle staircase; v_B is added back analytically
///   when the boundary trace is sampled. Both describe the same u; the
///   scattered form carries no discretisation error for the direct wave.
enum class Formulation { scattered_field, total_field };

/// Explicit leapfrog core: u^{n+1} = 2u^n - u^{n-1} + dt^2 (Delta_h u^n + flux/h)
/// on fluid cells, 7-point Laplacian, mirror ghosts on every non-fluid
/// neighbour plus the face flux g (outward one-sided derivative).
class LeapfrogLattice {
public:
    explicit LeapfrogLattice(FluidMask mask);

    const FluidMask& mask() const { return mask_; }
    const Lattice& lattice() const { return mask_.lattice; }

    GridField& previous() { return prev_; }
    GridField& current() { return curr_; }
    const GridField& previous() const { return prev_; }
    const GridField& current() const { return curr_; }

    /// Advance one level; `flux` holds g for each face in `faces` (may be empty).
    void step(double dt, std::span<const BoundaryFace> faces, std::span<const double> flux);

    /// u^0 = 0, u^1 = dt^2/2 (flux/h) from the fluxes at t = 0.
    void start_from_rest(double dt, std::span<const BoundaryFace> faces, std::span<const double> flux);
    /// u^0 = 0, u^1 = dt * velocity.
    void start_with_velocity(double dt, const GridField& velocity);
    /// u^0 = displacement, u^1 = u^0 + dt u_t + dt^2/2 Delta_h u^0.
    void start_with_data(double dt, const GridField& displacement, const GridField& velocity);

    /// Delta_h u (homogeneous Neumann on every non-fluid neighbour).
    void laplacian(const GridField& u, GridField& out) const;
    double max_abs() const;

    /// Leapfrog energy between two consecutive levels:
    ///   sum_c ((a - b)/dt)^2 h^3 + sum_{fluid faces} (D a)(D b) h^3,
    /// exactly conserved by the scheme with zero flux.
    double staggered_energy(const GridField& a, const GridField& b, double dt) const;

private:
    FluidMask mask_;
    std::vector<double> fluid_;      // 1 on fluid cells, else 0
    std::vector<double> neighbours_; // number of fluid neighbours
    GridField prev_;
    GridField curr_;
};

struct RecordFlags {
    bool trace = true;
    bool volume_laplace = false;
    bool final_state = false;
};

struct SolveOptions {
    double T_max = 0.0;
    std::vector<double> taus;
    RecordFlags record;
    Formulation formulation = Formulation::scattered_field;
    double amplitude = 1.0;
};

/// Sampled Dirichlet data on the outer faces: samples[n * faces + f] is
/// the face value at t = n dt, n = 0..steps.
struct BoundaryTrace {
    std::vector<BoundaryFace> faces;
    double dt = 0.0;
    std::size_t steps = 0;
    std::vector<double> samples;

    double duration() const { return static_cast<double>(steps) * dt; }
    std::size_t face_count() const { return faces.size(); }
    double at(std::size_t n, std::size_t f) const { return samples[n * faces.size() + f]; }
    double time(std::size_t n) const { return static_cast<double>(n) * dt; }
};

/// Trapezoid Laplace sums accumulated during the run.
struct LaplaceAccumulator {
    std::vector<double> taus;
    double T = 0.0;
    /// boundary[q][f]: transform of the (total) trace on face f.
    std::vector<std::vector<double>> boundary;
    /// volume[q]: transform of the lattice field (the formulation's field).
    std::vector<GridField> volume;
};

/// Lattice field at the final time and its central time derivative.
struct FinalState {
    double T = 0.0;
    GridField u;
    GridField u_t;
};

struct ForwardRun {
    FluidMask mask;
    Formulation formulation = Formulation::scattered_field;
    ProbePulse pulse;
    BoundaryTrace trace;
    std::optional<LaplaceAccumulator> laplace;
    std::optional<FinalState> final_state;
};

/// Solves the interior problem on omega minus the obstacles with Neumann
/// data f_B on the outer boundary, zero flux on the obstacle and zero
/// initial data, up to the largest n dt <= T_max.
ForwardRun solve_ibvp(const ValidatedScene& scene, const SolveOptions& options);

/// Trapezoid Laplace transform of a recorded trace, one value per face.
std::vector<double> trace_laplace(const BoundaryTrace& trace, double tau, std::size_t last_step);

struct FreeSpaceRun {
    Lattice lattice;
    double dt = 0.0;
    std::size_t steps = 0;
    std::vector<Vec3> points;
    /// series[i][n]: trilinear sample at points[i], t = n dt.
    std::vector<std::vector<double>> series;
    GridField final_u;
};

/// Free-space validation run of the probe wave on a box large enough that
/// no signal reaches its walls before T_max (BoxTooSmall otherwise).
FreeSpaceRun solve_free_space(const ProbePulse& pulse, const Box& box, double h, double dt, double T_max,
                              const std::vector<Vec3>& points);

}  // namespace enclosure
