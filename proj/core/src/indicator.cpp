#include "enclosure/indicator.hpp"

#include <algorithm>
#include <cmath>

#include "enclosure/errors.hpp"

namespace enclosure {

std::string to_string(IndicatorVariant v) {
    switch (v) {
        case IndicatorVariant::full: return "full";
        case IndicatorVariant::simple: return "simple";
        case IndicatorVariant::localized: return "localized";
    }
    return "full";
}

IndicatorVariant variant_from_string(const std::string& s) {
    if (s == "full") return IndicatorVariant::full;
    if (s == "simple") return IndicatorVariant::simple;
    if (s == "localized") return IndicatorVariant::localized;
    throw ConfigError("unknown indicator variant '" + s + "'");
}

const std::vector<double>& IndicatorCurve::values(IndicatorVariant v) const {
    switch (v) {
        case IndicatorVariant::full: return full;
        case IndicatorVariant::simple: return simple;
        case IndicatorVariant::localized: return localized;
    }
    return full;
}

std::size_t snap_to_samples(const BoundaryTrace& trace, double T) {
    if (!(T > 0)) throw TimeWindowError("T must be positive");
    if (T > trace.duration() * (1.0 + 1e-12) + 1e-12) {
        throw TimeWindowError("T = " + std::to_string(T) + " exceeds the recorded duration " +
                              std::to_string(trace.duration()));
    }
    const auto n = static_cast<std::size_t>(std::floor(T / trace.dt + 1e-9));
    return std::min(n, trace.steps);
}

namespace {

double trapezoid_weight(std::size_t n, std::size_t last, double dt) {
    return (n == 0 || n == last) ? 0.5 * dt : dt;
}

}  // namespace

TraceTransform laplace_trace(const BoundaryTrace& trace, double tau, double T) {
    TraceTransform out;
    out.T_requested = T;
    out.last_step = snap_to_samples(trace, T);
    out.T_used = trace.time(out.last_step);
    out.values = trace_laplace(trace, tau, out.last_step);
    return out;
}

IndicatorAssembler::IndicatorAssembler(const BoundaryTrace& trace, const ProbePulse& pulse,
                                       ReferenceQuadrature reference)
    : trace_(trace), pulse_(pulse), reference_(reference) {
    const std::size_t nf = trace.face_count();
    radius_.resize(nf);
    cos_angle_.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        const Vec3 d = trace.faces[f].center - pulse.center();
        radius_[f] = norm(d);
        cos_angle_[f] = dot(d, trace.faces[f].normal) / radius_[f];
    }
    if (reference_ == ReferenceQuadrature::matched) {
        residual_.resize(trace.samples.size());
        for (std::size_t n = 0; n <= trace.steps; ++n) {
            const double t = trace.time(n);
            for (std::size_t f = 0; f < nf; ++f) {
                const std::size_t i = n * nf + f;
                residual_[i] = trace.samples[i] - pulse.v(radius_[f], t);
            }
        }
    }
}

std::vector<double> IndicatorAssembler::residual_transform(double tau, std::size_t last_step) const {
    const std::size_t nf = trace_.face_count();
    std::vector<double> w(nf, 0.0);
    for (std::size_t n = 0; n <= last_step; ++n) {
        const double weight = trapezoid_weight(n, last_step, trace_.dt) * std::exp(-tau * trace_.time(n));
        const double* row = residual_.data() + n * nf;
        for (std::size_t f = 0; f < nf; ++f) w[f] += weight * row[f];
    }
    return w;
}

std::vector<double> IndicatorAssembler::difference(double tau, double T) const {
    const std::size_t last = snap_to_samples(trace_, T);
    if (reference_ == ReferenceQuadrature::matched) return residual_transform(tau, last);

    const double T_used = trace_.time(last);
    std::vector<double> w = trace_laplace(trace_, tau, last);
    for (std::size_t f = 0; f < w.size(); ++f) w[f] -= pulse_.w0_truncated_radial(radius_[f], tau, T_used);
    return w;
}

double IndicatorAssembler::full(double tau, double T) const {
    const std::vector<double> diff = difference(tau, T);
    const double T_used = trace_.time(snap_to_samples(trace_, T));
    double sum = 0.0;
    for (std::size_t f = 0; f < diff.size(); ++f) {
        if (diff[f] == 0.0) continue;
        sum += trace_.faces[f].area * diff[f] * pulse_.dr_w0_truncated_radial(radius_[f], tau, T_used) * cos_angle_[f];
    }
    return sum;
}

double IndicatorAssembler::simple(double tau, double T) const {
    const std::vector<double> diff = difference(tau, T);
    double sum = 0.0;
    for (std::size_t f = 0; f < diff.size(); ++f) {
        sum += trace_.faces[f].area * diff[f] * pulse_.dr_v0_radial(radius_[f], tau) * cos_angle_[f];
    }
    return sum;
}

std::size_t IndicatorAssembler::patch_size(double M) const {
    const double eta = pulse_.radius();
    return static_cast<std::size_t>(
        std::count_if(radius_.begin(), radius_.end(), [&](double r) { return r - eta < M; }));
}

double IndicatorAssembler::localized(double tau, double T, double M) const {
    if (patch_size(M) == 0) throw EmptyPatch("no boundary face lies within distance M of the probe ball");
    const std::vector<double> diff = difference(tau, T);
    const double eta = pulse_.radius();
    double sum = 0.0;
    for (std::size_t f = 0; f < diff.size(); ++f) {
        if (!(radius_[f] - eta < M)) continue;
        sum += trace_.faces[f].area * diff[f] * pulse_.dr_v0_radial(radius_[f], tau) * cos_angle_[f];
    }
    return sum;
}

IndicatorCurve IndicatorAssembler::curve(const std::vector<double>& taus, double T, std::optional<double> M) const {
    IndicatorCurve c;
    c.taus = taus;
    c.T_requested = T;
    c.T_used = trace_.time(snap_to_samples(trace_, T));
    c.M = M;
    c.probe_center = pulse_.center();
    c.probe_radius = pulse_.radius();
    const bool with_patch = M && patch_size(*M) > 0;
    const double eta = pulse_.radius();
    c.full.resize(taus.size());
    c.simple.resize(taus.size());
    if (with_patch) c.localized.resize(taus.size());

#pragma omp parallel for schedule(dynamic)
    for (std::size_t q = 0; q < taus.size(); ++q) {
        const double tau = taus[q];
        const std::vector<double> diff = difference(tau, T);
        double full = 0.0, simple = 0.0, local = 0.0;
        for (std::size_t f = 0; f < diff.size(); ++f) {
            const double weight = trace_.faces[f].area * diff[f] * cos_angle_[f];
            if (weight == 0.0) continue;
            full += weight * pulse_.dr_w0_truncated_radial(radius_[f], tau, c.T_used);
            const double s = weight * pulse_.dr_v0_radial(radius_[f], tau);
            simple += s;
            if (with_patch && radius_[f] - eta < *M) local += s;
        }
        c.full[q] = full;
        c.simple[q] = simple;
        if (with_patch) c.localized[q] = local;
    }
    return c;
}

double indicator_full(const BoundaryTrace& trace, const ProbePulse& pulse, double tau, double T,
                      ReferenceQuadrature reference) {
    return IndicatorAssembler(trace, pulse, reference).full(tau, T);
}

double indicator_simple(const BoundaryTrace& trace, const ProbePulse& pulse, double tau, double T,
                        ReferenceQuadrature reference) {
    return IndicatorAssembler(trace, pulse, reference).simple(tau, T);
}

double indicator_localized(const BoundaryTrace& trace, const ProbePulse& pulse, double tau, double T, double M,
                           ReferenceQuadrature reference) {
    return IndicatorAssembler(trace, pulse, reference).localized(tau, T, M);
}

DecompositionReport decomposition_diagnostics(const ForwardRun& run, const std::vector<double>& taus) {
    if (!run.laplace || run.laplace->volume.empty()) throw MissingAccumulator("run has no volume accumulators");
    if (!run.final_state) throw MissingAccumulator("run has no final state");
    const LaplaceAccumulator& acc = *run.laplace;
    const FinalState& fs = *run.final_state;
    const Lattice& l = run.mask.lattice;
    const ProbePulse& pulse = run.pulse;
    const double T = fs.T;
    const double vol = l.cell_volume();
    const bool scattered = run.formulation == Formulation::scattered_field;
    const IndicatorAssembler assembler(run.trace, pulse);
    const std::vector<BoundaryFace> wall = obstacle_faces(run.mask);

    DecompositionReport report;
    report.T = T;
    for (double tau : taus) {
        const auto it = std::find_if(acc.taus.begin(), acc.taus.end(),
                                     [&](double t) { return std::abs(t - tau) <= 1e-12 * tau; });
        if (it == acc.taus.end()) throw MissingAccumulator("no volume accumulator for tau = " + std::to_string(tau));
        const GridField& acc_field = acc.volume[static_cast<std::size_t>(it - acc.taus.begin())];

        GridField R(l);
        double J = 0.0, remainder_D = 0.0, remainder_fluid = 0.0, mass = 0.0;
        for (int k = 0; k < l.nz; ++k) {
            for (int j = 0; j < l.ny; ++j) {
                for (int i = 0; i < l.nx; ++i) {
                    const std::size_t c = l.index(i, j, k);
                    const Vec3 x = l.cell_center(i, j, k);
                    const Vec3 d = x - pulse.center();
                    const double r = norm(d);
                    const double w0 = pulse.w0_truncated_radial(r, tau, T);
                    const double F0 = pulse.dv_dt(r, T) + tau * pulse.v(r, T);
                    if (run.mask.kind[c] == CellKind::obstacle) {
                        const double dw0 = pulse.dr_w0_truncated_radial(r, tau, T);
                        J += (dw0 * dw0 + tau * tau * w0 * w0) * vol;
                        remainder_D += F0 * w0 * vol;
                    } else if (run.mask.kind[c] == CellKind::fluid) {
                        const double Rc = scattered ? acc_field.values[c] : acc_field.values[c] - w0;
                        R.values[c] = Rc;
                        const double Fl = fs.u_t.values[c] + tau * fs.u.values[c];
                        const double F = scattered ? F0 + Fl : Fl;
                        remainder_fluid += (F * Rc + (F0 - F) * w0) * vol;
                        mass += tau * tau * Rc * Rc * vol;
                    }
                }
            }
        }

        double grad = 0.0;
        const std::size_t strides[3] = {1, l.stride_y(), l.stride_z()};
        for (int k = 0; k < l.nz; ++k) {
            for (int j = 0; j < l.ny; ++j) {
                for (int i = 0; i < l.nx; ++i) {
                    const std::size_t c = l.index(i, j, k);
                    if (!run.mask.is_fluid(c)) continue;
                    for (std::size_t s : strides) {
                        if (!run.mask.is_fluid(c + s)) continue;
                        const double g = (R.values[c + s] - R.values[c]) / l.h;
                        grad += g * g * vol;
                    }
                }
            }
        }

        // Half cells between wall cells and obstacle faces carry the Neumann
        // data of R, which the cell-to-cell differences do not see.
        for (const BoundaryFace& f : wall) {
            const double g = pulse.dn_w0_truncated(f.center, f.normal, tau, T);
            grad += g * g * 0.5 * l.h * f.area;
        }

        DecompositionTerm term{};
        term.tau = tau;
        term.I = assembler.full(tau, T);
        term.J = J;
        term.E = grad + mass;
        term.R_exact = std::exp(-tau * T) * (remainder_D + remainder_fluid);
        term.residual = term.I - (term.J + term.E + term.R_exact);
        report.terms.push_back(term);
    }
    return report;
}

}  // namespace enclosure
