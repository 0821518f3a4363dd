#include <gtest/gtest.h>

#include <cmath>

#include "enclosure/errors.hpp"
#include "enclosure/recovery.hpp"
#include "enclosure/special_functions.hpp"

using namespace enclosure;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
    return v;
}

IndicatorCurve synthetic_curve(const std::vector<double>& taus, double T, double (*f)(double)) {
    IndicatorCurve c;
    c.taus = taus;
    for (double t : taus) c.full.push_back(f(t));
    c.simple = c.full;
    c.T_requested = c.T_used = T;
    c.probe_id = "synthetic";
    return c;
}

FitOptions with_model(FitModel m) {
    FitOptions o;
    o.model = m;
    return o;
}

ProbeResult exact_result(const std::string& id, Vec3 p, double eta, double dist) {
    ProbeResult r;
    r.probe_id = id;
    r.center = p;
    r.eta = eta;
    r.dist_estimate = dist;
    r.d_partialD_estimate = dist + eta;
    return r;
}

const Sphere kObstacle{{0.5, 0.5, 0.5}, 0.15};

std::vector<ProbeResult> six_exact_probes() {
    std::vector<ProbeResult> out;
    const Vec3 c = kObstacle.center;
    const Vec3 dirs[] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
    for (int i = 0; i < 6; ++i) out.push_back(exact_result("p" + std::to_string(i), c + dirs[i], 0.1, 0.75));
    return out;
}

}  // namespace

TEST(Fit, PureExponentialIsExact) {
    const auto taus = linspace(4, 20, 24);
    std::vector<double> I;
    for (double t : taus) I.push_back(std::exp(-3 * t));
    const auto fit = fit_distance(taus, I, 0.0, with_model(FitModel::exponential));
    EXPECT_NEAR(fit.dist_estimate, 1.5, 1e-13);
    EXPECT_NEAR(fit.r2, 1.0, 1e-13);
    EXPECT_FALSE(fit.poor_fit);
    EXPECT_EQ(fit.first, 0u);
    EXPECT_EQ(fit.last, taus.size() - 1);
    EXPECT_NEAR(fit.predict_log(7.0, 0.0), -21.0, 1e-10);
}

TEST(Fit, CubicPrefactorWithLogTauRegressor) {
    const auto taus = linspace(8, 16, 17);
    std::vector<double> I;
    for (double t : taus) I.push_back(t * t * t * std::exp(-1.5 * t));
    const auto fit = fit_distance(taus, I, 0.0, with_model(FitModel::power_exponential));
    EXPECT_GE(fit.dist_estimate, 0.74);
    EXPECT_LE(fit.dist_estimate, 0.76);
}

TEST(Fit, CubicPrefactorBiasesPlainRegression) {
    const auto taus = linspace(8, 16, 17);
    std::vector<double> I;
    for (double t : taus) I.push_back(t * t * t * std::exp(-1.5 * t));
    const auto fit = fit_distance(taus, I, 0.0, with_model(FitModel::exponential));
    // Slope of 3 log tau over [8, 16] is about 3 / 11.5; half of it is the bias.
    EXPECT_NEAR(fit.dist_estimate, 0.75 - 0.13, 0.02);
}

TEST(Fit, AsymptoticModelRemovesTheSourceFactor) {
    const double eta = 0.1;
    const auto taus = linspace(4, 20, 24);
    std::vector<double> I;
    for (double t : taus) {
        const double A = special::source_factor_scaled(t * eta) / std::pow(t, 4);
        I.push_back(A * A * std::exp(-1.5 * t + 0.7 / t + 2.0));
    }
    const auto fit = fit_distance(taus, I, eta);
    EXPECT_EQ(fit.model, FitModel::asymptotic);
    EXPECT_NEAR(fit.dist_estimate, 0.75, 1e-10);
    const double A10 = special::source_factor_scaled(10.0 * eta) / 1e4;
    EXPECT_NEAR(fit.predict_log(10.0, eta), std::log(A10 * A10) - 15.0 + 0.07 + 2.0, 1e-8);
}

TEST(Fit, TooFewPositiveEntriesIsNoWindow) {
    const auto taus = linspace(4, 20, 10);
    std::vector<double> I(10, -1.0);
    I[2] = I[3] = 1e-3;
    EXPECT_THROW(fit_distance(taus, I, 0.0), NoWindow);
    EXPECT_THROW(fit_distance(taus, std::vector<double>(10, 0.0), 0.0), NoWindow);
}

TEST(Fit, WindowSkipsNegativeAndFlooredEntries) {
    const auto taus = linspace(2, 24, 23);
    std::vector<double> I, null;
    for (double t : taus) {
        I.push_back(std::exp(-2 * t));
        null.push_back(std::exp(-2 * 12.0) * 10.0);
    }
    I[1] = -1e-3;
    FitOptions o = with_model(FitModel::exponential);
    auto fit = fit_distance(taus, I, 0.0, o);
    EXPECT_GE(fit.first, 2u);
    EXPECT_NEAR(fit.dist_estimate, 1.0, 1e-12);

    o.null_magnitude = null;
    fit = fit_distance(taus, I, 0.0, o);
    // Entries below 1e-3 of the null magnitude (tau > 15.45) are excluded.
    EXPECT_LT(fit.tau_hi, 15.5);
    EXPECT_NEAR(fit.dist_estimate, 1.0, 1e-12);
}

TEST(Fit, NoisyCurveIsFlaggedPoor) {
    const auto taus = linspace(4, 20, 24);
    std::vector<double> I;
    for (std::size_t i = 0; i < taus.size(); ++i) I.push_back(std::exp(-taus[i] * 0.5 + (i % 2 ? 3.0 : -3.0)));
    const auto fit = fit_distance(taus, I, 0.0, with_model(FitModel::exponential));
    EXPECT_TRUE(fit.poor_fit);
    EXPECT_LT(fit.r2, 0.99);
}

TEST(Fit, ModelNamesRoundTrip) {
    for (auto m : {FitModel::exponential, FitModel::power_exponential, FitModel::asymptotic})
        EXPECT_EQ(fit_model_from_string(to_string(m)), m);
    for (auto v : {Verdict::blow_up, Verdict::decay, Verdict::indeterminate})
        EXPECT_EQ(verdict_from_string(to_string(v)), v);
    EXPECT_EQ(to_string(Verdict::blow_up), "BlowUp");
    EXPECT_THROW(fit_model_from_string("cubic"), ConfigError);
}

TEST(Dichotomy, SyntheticExponential) {
    const auto taus = linspace(4, 20, 24);
    auto I = [](double t) { return std::exp(-1.5 * t); };
    const FitOptions o = with_model(FitModel::exponential);
    EXPECT_EQ(dichotomy(synthetic_curve(taus, 1.2, I), IndicatorVariant::full, o).verdict, Verdict::decay);
    EXPECT_EQ(dichotomy(synthetic_curve(taus, 1.8, I), IndicatorVariant::full, o).verdict, Verdict::blow_up);
    const auto mid = dichotomy(synthetic_curve(taus, 1.5, I), IndicatorVariant::full, o);
    EXPECT_EQ(mid.verdict, Verdict::indeterminate);
    EXPECT_NEAR(mid.slope, 0.0, 1e-12);
}

TEST(Dichotomy, VanishingCurveDecays) {
    const auto taus = linspace(4, 20, 24);
    const auto d = dichotomy(synthetic_curve(taus, 0.5, [](double) { return 0.0; }), IndicatorVariant::full);
    EXPECT_EQ(d.verdict, Verdict::decay);
    EXPECT_TRUE(d.no_signal);
}

TEST(Dichotomy, MonotoneVerdicts) {
    auto make = [](std::vector<std::pair<double, Verdict>> v) {
        std::vector<DichotomyResult> out;
        for (auto [T, verdict] : v) {
            DichotomyResult d;
            d.T = T;
            d.verdict = verdict;
            out.push_back(d);
        }
        return out;
    };
    using V = Verdict;
    EXPECT_TRUE(verdicts_monotone(make({{1.0, V::decay}, {1.5, V::indeterminate}, {2.0, V::blow_up}})));
    EXPECT_TRUE(verdicts_monotone(make({{2.0, V::blow_up}, {1.0, V::decay}, {1.2, V::decay}})));
    EXPECT_FALSE(verdicts_monotone(make({{1.0, V::blow_up}, {2.0, V::decay}})));
    EXPECT_FALSE(verdicts_monotone(
        make({{1.0, V::decay}, {1.4, V::indeterminate}, {1.5, V::indeterminate}, {2.0, V::blow_up}})));
}

TEST(SupT, BisectionFindsExactSwitch) {
    const auto taus = linspace(4, 20, 24);
    const double T_max = 3.1;
    const CurveAtT curve_at = [&](double T) {
        return synthetic_curve(taus, T, [](double t) { return std::exp(-1.5 * t); });
    };
    const auto r = sup_T_characterization(curve_at, T_max, IndicatorVariant::full, with_model(FitModel::exponential),
                                          1e-9, 10);
    EXPECT_FALSE(r.stopped_indeterminate);
    EXPECT_TRUE(r.consistent);
    EXPECT_EQ(r.visits.size(), 10u);
    EXPECT_NEAR(r.supT_estimate, 1.5, T_max * std::pow(2.0, -10));
    EXPECT_DOUBLE_EQ(r.dist_estimate, r.supT_estimate / 2);
}

TEST(SupT, StopsOnIndeterminate) {
    const auto taus = linspace(4, 20, 24);
    const CurveAtT curve_at = [&](double T) {
        return synthetic_curve(taus, T, [](double t) { return std::exp(-1.6 * t); });
    };
    const auto r = sup_T_characterization(curve_at, 2.4, IndicatorVariant::full, with_model(FitModel::exponential));
    // Visits 1.2 (decay), 1.8 (blow-up), 1.5 (decay), 1.65 (|slope| 0.05).
    EXPECT_TRUE(r.stopped_indeterminate);
    EXPECT_NEAR(r.supT_estimate, 1.6, 0.1);
}

TEST(ProbeSphere, RadiusIsDistancePlusEta) {
    const auto r = exact_result("a", {-0.5, 0.5, 0.5}, 0.1, 0.75);
    const Sphere s = probe_sphere(r);
    EXPECT_DOUBLE_EQ(s.radius, 0.85);
    // The sphere touches the obstacle at its near pole (0.35, 0.5, 0.5).
    EXPECT_NEAR(distance(s.center, {0.35, 0.5, 0.5}), s.radius, 1e-15);
    EXPECT_DOUBLE_EQ(probe_sphere(exact_result("b", {0, 0, 0}, 0.0, 0.6)).radius, 0.6);
}

TEST(ProbeSphere, FromCurveAndFit) {
    IndicatorCurve c;
    c.probe_id = "x";
    c.probe_center = {1.5, 0.5, 0.5};
    c.probe_radius = 0.1;
    FitResult f;
    f.dist_estimate = 0.74;
    f.tau_lo = 6;
    f.tau_hi = 18;
    const auto r = make_probe_result(c, IndicatorVariant::simple, f);
    EXPECT_EQ(r.d_partialD_estimate, 0.74 + 0.1);
    EXPECT_EQ(r.variant, IndicatorVariant::simple);
    EXPECT_EQ(r.probe_id, "x");
}

TEST(Envelope, SingleProbeExcludesOneBall) {
    const Lattice q = Lattice::covering({{0, 0, 0}, {1, 1, 1}}, 1.0 / 40.0);
    const auto env = enclosure_envelope({exact_result("a", {-0.5, 0.5, 0.5}, 0.1, 0.75)}, q);
    std::size_t expect = 0;
    for (int k = 0; k < q.nz; ++k)
        for (int j = 0; j < q.ny; ++j)
            for (int i = 0; i < q.nx; ++i) expect += distance(q.cell_center(i, j, k), {-0.5, 0.5, 0.5}) >= 0.85;
    EXPECT_EQ(env.admissible_count, expect);
    EXPECT_FALSE(env.is_admissible({0.2, 0.5, 0.5}));
    EXPECT_TRUE(env.is_admissible({0.5, 0.5, 0.5}));
    EXPECT_THROW(enclosure_envelope({}, q), ConfigError);
}

TEST(Envelope, AddingProbesNeverGrowsTheRegion) {
    const Lattice q = Lattice::covering({{0, 0, 0}, {1, 1, 1}}, 1.0 / 48.0);
    const auto all = six_exact_probes();
    std::vector<ProbeResult> some;
    EnclosureEnvelope prev;
    for (std::size_t i = 0; i < all.size(); ++i) {
        some.push_back(all[i]);
        const auto env = enclosure_envelope(some, q);
        if (i > 0) {
            EXPECT_LE(env.admissible_count, prev.admissible_count);
            for (std::size_t c = 0; c < env.admissible.size(); ++c) EXPECT_LE(env.admissible[c], prev.admissible[c]);
        }
        prev = env;
    }
}

TEST(Envelope, ExactDistancesBoundTheObstacle) {
    const Lattice q = Lattice::covering({{0, 0, 0}, {1, 1, 1}}, 1.0 / 96.0);
    const auto env = enclosure_envelope(six_exact_probes(), q);
    EXPECT_EQ(env.excluded_inside({kObstacle}), 0u);
    EXPECT_LE(env.admissible_volume, 2.5 * kObstacle.volume());
}
