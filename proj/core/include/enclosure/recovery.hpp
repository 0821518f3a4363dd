#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "enclosure/grid.hpp"
#include "enclosure/indicator.hpp"

namespace enclosure {

/// Regression used to read the exponential rate b off a curve.
///
/// exponential:        log I = a + b tau
/// power_exponential:  log I = a + b tau + c log tau
/// asymptotic:         log(I / A(tau)^2) = a + b tau + c / tau, where
///                     A(tau) = e^{-tau eta} (s phi - Psi)(tau eta) / tau^4 is the
///                     probe's own source factor (A = 1 when eta = 0).
enum class FitModel { exponential, power_exponential, asymptotic };

std::string to_string(FitModel m);
FitModel fit_model_from_string(const std::string& s);

struct FitOptions {
    FitModel model = FitModel::asymptotic;
    double r2_target = 0.999;
    double r2_poor = 0.99;
    std::size_t min_points = 8;
    /// |I| of a run without obstacles at the same taus; entries below
    /// floor_ratio times it are excluded.
    std::vector<double> null_magnitude;
    double floor_ratio = 1e-3;
    double machine_floor = 1e-280;
};

struct FitResult {
    FitModel model = FitModel::asymptotic;
    double dist_estimate = 0.0;  ///< -rate / 2
    double rate = 0.0;           ///< coefficient of tau
    std::vector<double> coefficients;
    std::size_t first = 0;  ///< window as indices into the curve
    std::size_t last = 0;
    double tau_lo = 0.0;
    double tau_hi = 0.0;
    double r2 = 0.0;
    bool poor_fit = false;

    /// Fitted log I at tau (the model curve, normalisation undone).
    double predict_log(double tau, double eta) const;
};

/// Window selection and regression on raw (tau, I) pairs. NoWindow when
/// fewer than min_points entries qualify or no run is long enough.
FitResult fit_distance(const std::vector<double>& taus, const std::vector<double>& values, double eta,
                       const FitOptions& options = {});
FitResult fit_distance(const IndicatorCurve& curve, IndicatorVariant variant, const FitOptions& options = {});

enum class Verdict { blow_up, decay, indeterminate };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct DichotomyResult {
    double T = 0.0;
    Verdict verdict = Verdict::indeterminate;
    double slope = 0.0;  ///< mean slope of tau T + log I
    std::optional<FitResult> fit;
    bool no_signal = false;  ///< every entry at or below the floor: e^{tau T} I is identically 0
};

/// Verdict on e^{tau T} I from a curve truncated at T (curve.T_used).
DichotomyResult dichotomy(const IndicatorCurve& curve, IndicatorVariant variant, const FitOptions& options = {},
                          double eps_slope = 0.05);

/// True when the verdicts, ordered by T, read decay* then blow_up* with at
/// most one indeterminate between them.
bool verdicts_monotone(std::vector<DichotomyResult> results);

using CurveAtT = std::function<IndicatorCurve(double T)>;

struct SupTResult {
    double supT_estimate = 0.0;
    double dist_estimate = 0.0;  ///< supT / 2
    std::vector<DichotomyResult> visits;
    bool stopped_indeterminate = false;
    bool consistent = true;
};

/// Bisection over (0, T_max): decay raises the lower end, blow-up lowers
/// the upper end, indeterminate stops.
SupTResult sup_T_characterization(const CurveAtT& curve_at, double T_max, IndicatorVariant variant,
                                  const FitOptions& options = {}, double eps_slope = 0.05, int iterations = 10);
SupTResult sup_T_characterization(const IndicatorAssembler& assembler, const std::vector<double>& taus, double T_max,
                                  IndicatorVariant variant, const FitOptions& options = {}, double eps_slope = 0.05,
                                  int iterations = 10, std::optional<double> M = std::nullopt);

struct TimedVerdict {
    double T;
    Verdict verdict;
};

struct ProbeResult {
    std::string probe_id;
    Vec3 center;
    double eta = 0.0;
    double dist_estimate = 0.0;
    double d_partialD_estimate = 0.0;  ///< dist_estimate + eta
    double tau_lo = 0.0;
    double tau_hi = 0.0;
    double fit_r2 = 0.0;
    bool poor_fit = false;
    FitModel model = FitModel::asymptotic;
    IndicatorVariant variant = IndicatorVariant::full;
    std::vector<TimedVerdict> verdicts;
    std::optional<double> supT_estimate;
};

ProbeResult make_probe_result(const IndicatorCurve& curve, IndicatorVariant variant, const FitResult& fit);

/// Ball centred at the probe with radius d_partialD_estimate.
Sphere probe_sphere(const ProbeResult& result);

struct EnclosureEnvelope {
    std::vector<Sphere> exclusion;
    Lattice query;
    std::vector<std::uint8_t> admissible;  ///< one per query cell, x fastest
    std::size_t admissible_count = 0;
    double admissible_volume = 0.0;

    bool is_admissible(const Vec3& x) const;
    /// Query cells whose centre lies in one of `spheres` but that the
    /// envelope excludes.
    std::size_t excluded_inside(const std::vector<Sphere>& spheres) const;
};

/// Query cells are excluded iff |x - p_i| < d_i for some probe.
EnclosureEnvelope enclosure_envelope(const std::vector<ProbeResult>& results, const Lattice& query);

}  // namespace enclosure
