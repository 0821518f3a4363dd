#include "enclosure/recovery.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "enclosure/errors.hpp"
#include "enclosure/special_functions.hpp"

namespace enclosure {

std::string to_string(FitModel m) {
    switch (m) {
        case FitModel::exponential: return "exponential";
        case FitModel::power_exponential: return "power_exponential";
        case FitModel::asymptotic: return "asymptotic";
    }
    return "asymptotic";
}

FitModel fit_model_from_string(const std::string& s) {
    if (s == "exponential") return FitModel::exponential;
    if (s == "power_exponential") return FitModel::power_exponential;
    if (s == "asymptotic") return FitModel::asymptotic;
    throw ConfigError("unknown fit model '" + s + "'");
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::blow_up: return "BlowUp";
        case Verdict::decay: return "Decay";
        case Verdict::indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "BlowUp") return Verdict::blow_up;
    if (s == "Decay") return Verdict::decay;
    if (s == "Indeterminate") return Verdict::indeterminate;
    throw FormatError("unknown verdict '" + s + "'");
}

namespace {

constexpr std::size_t kMaxColumns = 3;

std::size_t column_count(FitModel m) { return m == FitModel::exponential ? 2 : 3; }

std::array<double, kMaxColumns> regressors(FitModel m, double tau) {
    switch (m) {
        case FitModel::exponential: return {1.0, tau, 0.0};
        case FitModel::power_exponential: return {1.0, tau, std::log(tau)};
        case FitModel::asymptotic: return {1.0, tau, 1.0 / tau};
    }
    return {1.0, tau, 0.0};
}

double log_source_factor(double tau, double eta) {
    if (eta <= 0.0) return 0.0;
    return std::log(special::source_factor_scaled(tau * eta)) - 4.0 * std::log(tau);
}

struct Regression {
    std::array<double, kMaxColumns> coef{};
    double r2 = 0.0;
};

// Householder least squares on at most three columns.
Regression least_squares(FitModel model, const std::vector<double>& taus, const std::vector<double>& y,
                         std::size_t first, std::size_t last) {
    const std::size_t m = last - first + 1;
    const std::size_t n = column_count(model);
    std::vector<std::array<double, kMaxColumns>> a(m);
    std::vector<double> b(m);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] = regressors(model, taus[first + i]);
        b[i] = y[first + i];
    }
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += a[i][k] * a[i][k];
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const double alpha = a[k][k] > 0 ? -norm : norm;
        std::vector<double> v(m, 0.0);
        for (std::size_t i = k; i < m; ++i) v[i] = a[i][k];
        v[k] -= alpha;
        double vv = 0.0;
        for (std::size_t i = k; i < m; ++i) vv += v[i] * v[i];
        if (vv == 0.0) continue;
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += v[i] * a[i][j];
            s = 2.0 * s / vv;
            for (std::size_t i = k; i < m; ++i) a[i][j] -= s * v[i];
        }
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += v[i] * b[i];
        s = 2.0 * s / vv;
        for (std::size_t i = k; i < m; ++i) b[i] -= s * v[i];
    }
    Regression r;
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * r.coef[j];
        r.coef[k] = a[k][k] != 0.0 ? s / a[k][k] : 0.0;
    }

    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += y[first + i];
    mean /= static_cast<double>(m);
    double ss_tot = 0.0;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto x = regressors(model, taus[first + i]);
        double pred = 0.0;
        for (std::size_t j = 0; j < n; ++j) pred += r.coef[j] * x[j];
        ss_res += (y[first + i] - pred) * (y[first + i] - pred);
        ss_tot += (y[first + i] - mean) * (y[first + i] - mean);
    }
    r.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return r;
}

std::vector<bool> qualifying(const std::vector<double>& values, const FitOptions& options) {
    std::vector<bool> ok(values.size(), false);
    for (std::size_t q = 0; q < values.size(); ++q) {
        double floor = options.machine_floor;
        if (q < options.null_magnitude.size()) floor = std::max(floor, options.floor_ratio * std::abs(options.null_magnitude[q]));
        ok[q] = std::isfinite(values[q]) && values[q] > floor;
    }
    return ok;
}

}  // namespace

double FitResult::predict_log(double tau, double eta) const {
    const auto x = regressors(model, tau);
    double v = 0.0;
    for (std::size_t j = 0; j < coefficients.size(); ++j) v += coefficients[j] * x[j];
    if (model == FitModel::asymptotic) v += 2.0 * log_source_factor(tau, eta);
    return v;
}

FitResult fit_distance(const std::vector<double>& taus, const std::vector<double>& values, double eta,
                       const FitOptions& options) {
    if (taus.size() != values.size()) throw ConfigError("tau grid and curve differ in length");
    const std::size_t n_cols = column_count(options.model);
    const std::size_t min_len = std::max(options.min_points, n_cols + 2);

    const auto ok = qualifying(values, options);
    const auto n_ok = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), true));
    if (n_ok < min_len) {
        throw NoWindow(std::to_string(n_ok) + " positive entries above the floor, need " + std::to_string(min_len));
    }

    std::vector<double> y(values.size(), 0.0);
    for (std::size_t q = 0; q < values.size(); ++q) {
        if (!ok[q]) continue;
        y[q] = std::log(values[q]);
        if (options.model == FitModel::asymptotic) y[q] -= 2.0 * log_source_factor(taus[q], eta);
    }

    struct Candidate {
        std::size_t first, last;
        Regression fit;
    };
    std::optional<Candidate> best;      // longest window reaching r2_target
    std::optional<Candidate> fallback;  // highest r2 overall
    auto better_window = [](const Candidate& c, const Candidate& than) {
        const auto lc = c.last - c.first, lt = than.last - than.first;
        if (lc != lt) return lc > lt;
        if (c.last != than.last) return c.last > than.last;
        return c.fit.r2 > than.fit.r2;
    };

    std::size_t q = 0;
    while (q < values.size()) {
        if (!ok[q]) {
            ++q;
            continue;
        }
        std::size_t end = q;
        while (end + 1 < values.size() && ok[end + 1]) ++end;
        const std::size_t run = end - q + 1;
        for (std::size_t len = run; len >= min_len && len <= run; --len) {
            if (best && len - 1 < best->last - best->first) break;
            for (std::size_t first = q + run - len + 1; first-- > q;) {
                Candidate c{first, first + len - 1, least_squares(options.model, taus, y, first, first + len - 1)};
                if (!fallback || c.fit.r2 > fallback->fit.r2) fallback = c;
                if (c.fit.r2 >= options.r2_target && (!best || better_window(c, *best))) best = c;
            }
        }
        q = end + 1;
    }
    if (!fallback) throw NoWindow("no contiguous run of " + std::to_string(min_len) + " qualifying entries");

    const Candidate& pick = best ? *best : *fallback;
    FitResult r;
    r.model = options.model;
    r.coefficients.assign(pick.fit.coef.begin(), pick.fit.coef.begin() + static_cast<std::ptrdiff_t>(n_cols));
    r.rate = pick.fit.coef[1];
    r.dist_estimate = -0.5 * r.rate;
    r.first = pick.first;
    r.last = pick.last;
    r.tau_lo = taus[pick.first];
    r.tau_hi = taus[pick.last];
    r.r2 = pick.fit.r2;
    r.poor_fit = pick.fit.r2 < options.r2_poor;
    return r;
}

FitResult fit_distance(const IndicatorCurve& curve, IndicatorVariant variant, const FitOptions& options) {
    const auto& v = curve.values(variant);
    if (v.empty()) throw NoWindow("curve has no " + to_string(variant) + " column");
    return fit_distance(curve.taus, v, curve.probe_radius, options);
}

DichotomyResult dichotomy(const IndicatorCurve& curve, IndicatorVariant variant, const FitOptions& options,
                          double eps_slope) {
    DichotomyResult r;
    r.T = curve.T_used;
    const auto& v = curve.values(variant);
    bool any_signal = false;
    for (std::size_t q = 0; q < v.size(); ++q) {
        double floor = options.machine_floor;
        if (q < options.null_magnitude.size()) floor = std::max(floor, options.floor_ratio * std::abs(options.null_magnitude[q]));
        if (!(std::abs(v[q]) <= floor)) any_signal = true;
    }
    if (!v.empty() && !any_signal) {
        r.verdict = Verdict::decay;
        r.no_signal = true;
        r.slope = -std::numeric_limits<double>::infinity();
        return r;
    }
    r.fit = fit_distance(curve, variant, options);
    r.slope = curve.T_used + r.fit->rate;
    if (r.slope >= eps_slope) {
        r.verdict = Verdict::blow_up;
    } else if (r.slope <= -eps_slope) {
        r.verdict = Verdict::decay;
    } else {
        r.verdict = Verdict::indeterminate;
    }
    return r;
}

bool verdicts_monotone(std::vector<DichotomyResult> results) {
    std::stable_sort(results.begin(), results.end(),
                     [](const DichotomyResult& a, const DichotomyResult& b) { return a.T < b.T; });
    int phase = 0;  // 0 decay, 1 one indeterminate seen, 2 blow-up
    for (const auto& r : results) {
        switch (r.verdict) {
            case Verdict::decay:
                if (phase != 0) return false;
                break;
            case Verdict::indeterminate:
                if (phase != 0) return false;
                phase = 1;
                break;
            case Verdict::blow_up: phase = 2; break;
        }
    }
    return true;
}

SupTResult sup_T_characterization(const CurveAtT& curve_at, double T_max, IndicatorVariant variant,
                                  const FitOptions& options, double eps_slope, int iterations) {
    if (!(T_max > 0)) throw ConfigError("T_max must be positive");
    SupTResult out;
    double lo = 0.0;
    double hi = T_max;
    for (int it = 0; it < iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        DichotomyResult d;
        try {
            d = dichotomy(curve_at(mid), variant, options, eps_slope);
        } catch (const NoWindow&) {
            d.T = mid;
            d.verdict = Verdict::indeterminate;
        }
        out.visits.push_back(d);
        if (d.verdict == Verdict::decay) {
            lo = mid;
        } else if (d.verdict == Verdict::blow_up) {
            hi = mid;
        } else {
            out.stopped_indeterminate = true;
            lo = hi = mid;
            break;
        }
    }
    out.supT_estimate = 0.5 * (lo + hi);
    out.dist_estimate = 0.5 * out.supT_estimate;
    out.consistent = verdicts_monotone(out.visits);
    return out;
}

SupTResult sup_T_characterization(const IndicatorAssembler& assembler, const std::vector<double>& taus, double T_max,
                                  IndicatorVariant variant, const FitOptions& options, double eps_slope,
                                  int iterations, std::optional<double> M) {
    const double limit = std::min(T_max, assembler.trace().duration());
    return sup_T_characterization([&](double T) { return assembler.curve(taus, T, M); }, limit, variant, options,
                                  eps_slope, iterations);
}

ProbeResult make_probe_result(const IndicatorCurve& curve, IndicatorVariant variant, const FitResult& fit) {
    ProbeResult r;
    r.probe_id = curve.probe_id;
    r.center = curve.probe_center;
    r.eta = curve.probe_radius;
    r.dist_estimate = fit.dist_estimate;
    r.d_partialD_estimate = fit.dist_estimate + curve.probe_radius;
    r.tau_lo = fit.tau_lo;
    r.tau_hi = fit.tau_hi;
    r.fit_r2 = fit.r2;
    r.poor_fit = fit.poor_fit;
    r.model = fit.model;
    r.variant = variant;
    return r;
}

Sphere probe_sphere(const ProbeResult& result) { return Sphere{result.center, result.d_partialD_estimate}; }

bool EnclosureEnvelope::is_admissible(const Vec3& x) const {
    return std::none_of(exclusion.begin(), exclusion.end(),
                        [&](const Sphere& s) { return distance(x, s.center) < s.radius; });
}

std::size_t EnclosureEnvelope::excluded_inside(const std::vector<Sphere>& spheres) const {
    std::size_t n = 0;
    std::size_t idx = 0;
    for (int k = 0; k < query.nz; ++k) {
        for (int j = 0; j < query.ny; ++j) {
            for (int i = 0; i < query.nx; ++i, ++idx) {
                if (admissible[idx]) continue;
                const Vec3 x = query.cell_center(i, j, k);
                if (std::any_of(spheres.begin(), spheres.end(),
                                [&](const Sphere& s) { return distance(x, s.center) < s.radius; })) {
                    ++n;
                }
            }
        }
    }
    return n;
}

EnclosureEnvelope enclosure_envelope(const std::vector<ProbeResult>& results, const Lattice& query) {
    if (results.empty()) throw ConfigError("an envelope needs at least one probe result");
    EnclosureEnvelope env;
    env.query = query;
    for (const auto& r : results) env.exclusion.push_back(probe_sphere(r));
    env.admissible.assign(query.cell_count(), 0);
    std::size_t idx = 0;
    for (int k = 0; k < query.nz; ++k) {
        for (int j = 0; j < query.ny; ++j) {
            for (int i = 0; i < query.nx; ++i, ++idx) {
                if (env.is_admissible(query.cell_center(i, j, k))) {
                    env.admissible[idx] = 1;
                    ++env.admissible_count;
                }
            }
        }
    }
    env.admissible_volume = static_cast<double>(env.admissible_count) * query.cell_volume();
    return env;
}

}  // namespace enclosure
