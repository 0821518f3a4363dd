#pragma once

#include <optional>
#include <string>
#include <vector>

#include "enclosure/kernels.hpp"
#include "enclosure/solver.hpp"

namespace enclosure {

/// How w_B - w_B^0 is formed on each face.
///
/// matched: the Laplace transform of the residual trace u - v_B with the
///   same trapezoid rule as w_B, so quadrature errors of the direct wave
///   cancel instead of swamping the exponentially small echo.
/// exact: trapezoid w_B minus the Gauss–Legendre w_B^0 from the kernels.
enum class ReferenceQuadrature { matched, exact };

enum class IndicatorVariant { full, simple, localized };

std::string to_string(IndicatorVariant v);
IndicatorVariant variant_from_string(const std::string& s);

/// Trapezoid transform of a trace truncated at T (floored to the sample grid).
struct TraceTransform {
    double T_requested = 0.0;
    double T_used = 0.0;
    std::size_t last_step = 0;
    std::vector<double> values;  ///< one per face
};

/// TimeWindowError when T exceeds the recorded duration.
TraceTransform laplace_trace(const BoundaryTrace& trace, double tau, double T);

/// Index of the last sample at or below T; TimeWindowError past the end.
std::size_t snap_to_samples(const BoundaryTrace& trace, double T);

struct IndicatorCurve {
    std::vector<double> taus;
    std::vector<double> full;
    std::vector<double> simple;
    std::vector<double> localized;  ///< empty when no M was requested or the patch was empty
    double T_requested = 0.0;
    double T_used = 0.0;
    std::optional<double> M;
    std::string probe_id;
    Vec3 probe_center;
    double probe_radius = 0.0;

    const std::vector<double>& values(IndicatorVariant v) const;
};

/// Indicator functions assembled from one boundary trace. The trace must
/// outlive the assembler.
class IndicatorAssembler {
public:
    IndicatorAssembler(const BoundaryTrace& trace, const ProbePulse& pulse,
                       ReferenceQuadrature reference = ReferenceQuadrature::matched);

    /// w_B - w_B^0 on every face.
    std::vector<double> difference(double tau, double T) const;

    /// sum over faces of area (w_B - w_B^0) d w_B^0 / d nu.
    double full(double tau, double T) const;
    /// sum over faces of area (w_B - w_B^0) d v0 / d nu.
    double simple(double tau, double T) const;
    /// `simple` restricted to faces with |x - p| - eta < M; EmptyPatch if none.
    double localized(double tau, double T, double M) const;

    /// Every variant on a tau grid; a localized column only when M is given
    /// and the patch is non-empty.
    IndicatorCurve curve(const std::vector<double>& taus, double T, std::optional<double> M = std::nullopt) const;

    std::size_t patch_size(double M) const;
    const BoundaryTrace& trace() const { return trace_; }
    const ProbePulse& pulse() const { return pulse_; }

private:
    std::vector<double> residual_transform(double tau, std::size_t last_step) const;

    const BoundaryTrace& trace_;
    ProbePulse pulse_;
    ReferenceQuadrature reference_;
    std::vector<double> radius_;     // |x_f - p|
    std::vector<double> cos_angle_;  // (x_f - p)/|x_f - p| . n_f
    std::vector<double> residual_;   // u - v_B at every sample (matched only)
};

double indicator_full(const BoundaryTrace& trace, const ProbePulse& pulse, double tau, double T,
                      ReferenceQuadrature reference = ReferenceQuadrature::matched);
double indicator_simple(const BoundaryTrace& trace, const ProbePulse& pulse, double tau, double T,
                        ReferenceQuadrature reference = ReferenceQuadrature::matched);
double indicator_localized(const BoundaryTrace& trace, const ProbePulse& pulse, double tau, double T, double M,
                           ReferenceQuadrature reference = ReferenceQuadrature::matched);

struct DecompositionTerm {
    double tau;
    double I;
    double J;
    double E;
    double R_exact;
    double residual;  ///< I - (J + E + R_exact)
};

struct DecompositionReport {
    double T = 0.0;
    std::vector<DecompositionTerm> terms;
};

/// J over the obstacle cells with the analytic w0, E over fluid cells from
/// the volume accumulator, the final-time remainder, and the identity
/// residual. The run must carry volume accumulators for every tau
/// (MissingAccumulator otherwise) and the final state.
DecompositionReport decomposition_diagnostics(const ForwardRun& run, const std::vector<double>& taus);

}  // namespace enclosure
