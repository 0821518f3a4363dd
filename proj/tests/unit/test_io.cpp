#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <random>

#include "enclosure/errors.hpp"
#include "enclosure/io.hpp"
#include "test_scenes.hpp"

using namespace enclosure;
namespace fs = std::filesystem;

namespace {

const char* kSceneJson = R"({
  "omega_box": {"min": [0, 0, 0], "max": [1, 1, 1]},
  "obstacles": [{"center": [0.5, 0.5, 0.5], "radius": 0.15}],
  "probe": {"center": [-0.5, 0.5, 0.5], "radius": 0.1},
  "T": 1.6,
  "grid": {"h": 0.03125, "dt": 0.0125},
  "tau_grid": {"min": 4, "max": 20, "count": 24, "spacing": "log"},
  "M": 0.9
})";

void expect_same_scene(const SceneConfig& a, const SceneConfig& b) {
    EXPECT_EQ(a.omega.min, b.omega.min);
    EXPECT_EQ(a.omega.max, b.omega.max);
    ASSERT_EQ(a.obstacles.size(), b.obstacles.size());
    for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
        EXPECT_EQ(a.obstacles[i].center, b.obstacles[i].center);
        EXPECT_EQ(a.obstacles[i].radius, b.obstacles[i].radius);
    }
    EXPECT_EQ(a.probe.center, b.probe.center);
    EXPECT_EQ(a.probe.radius, b.probe.radius);
    EXPECT_EQ(a.T, b.T);
    EXPECT_EQ(a.h, b.h);
    EXPECT_EQ(a.dt, b.dt);
    EXPECT_EQ(a.tau_grid, b.tau_grid);
    EXPECT_EQ(a.localization_M, b.localization_M);
}

BoundaryTrace small_trace() {
    const auto scene = ValidatedScene::validate(testing_support::coarse_scene(1.0 / 8.0));
    SolveOptions o;
    o.T_max = 1.0;
    o.taus = {4.0, 9.0};
    return solve_ibvp(scene, o).trace;
}

}  // namespace

TEST(SceneFile, ParsesTheDocumentedKeys) {
    const SceneConfig c = io::parse_scene(kSceneJson);
    EXPECT_EQ(c.probe.center, (Vec3{-0.5, 0.5, 0.5}));
    EXPECT_EQ(c.tau_grid.size(), 24u);
    ASSERT_TRUE(c.localization_M);
    EXPECT_EQ(*c.localization_M, 0.9);
    EXPECT_NO_THROW(ValidatedScene::validate(c));
}

TEST(SceneFile, RoundTrip) {
    SceneConfig c = io::parse_scene(kSceneJson);
    expect_same_scene(io::parse_scene(io::scene_to_json(c)), c);
    EXPECT_EQ(io::scene_hash(io::parse_scene(io::scene_to_json(c))), io::scene_hash(c));

    SceneConfig r = reference_scene();
    r.obstacles.push_back({{0.2, 0.2, 0.2}, 0.05});
    r.tau_spec.spacing = TauSpacing::linear;
    r.tau_grid = r.tau_spec.expand();
    expect_same_scene(io::parse_scene(io::scene_to_json(r)), r);
}

TEST(SceneFile, HashDependsOnContent) {
    SceneConfig a = io::parse_scene(kSceneJson);
    SceneConfig b = a;
    b.probe.radius = 0.11;
    EXPECT_NE(io::scene_hash(a), io::scene_hash(b));
    EXPECT_EQ(io::scene_hash(a).size(), 16u);
}

TEST(SceneFile, RejectsUnknownKeys) {
    std::string top = kSceneJson;
    top.insert(1, "\"colour\": 1,");
    EXPECT_THROW(io::parse_scene(top), ConfigError);
    std::string nested = kSceneJson;
    nested.replace(nested.find("\"h\""), 3, "\"hh\"");
    EXPECT_THROW(io::parse_scene(nested), ConfigError);
    std::string probe = kSceneJson;
    probe.replace(probe.find("\"radius\": 0.1"), 13, "\"radius\": 0.1, \"shape\": \"ball\"");
    EXPECT_THROW(io::parse_scene(probe), ConfigError);
}

TEST(SceneFile, RejectsMalformedValues) {
    EXPECT_THROW(io::parse_scene("{not json"), ConfigError);
    std::string bad = kSceneJson;
    bad.replace(bad.find("\"log\""), 5, "\"cubic\"");
    EXPECT_THROW(io::parse_scene(bad), ConfigError);
    std::string vec = kSceneJson;
    vec.replace(vec.find("[-0.5, 0.5, 0.5]"), 16, "[-0.5, 0.5]");
    EXPECT_THROW(io::parse_scene(vec), ConfigError);
    EXPECT_THROW(io::read_scene("/nonexistent/scene.json"), ConfigError);
}

TEST(Format, DoublesRoundTripExactly) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 600) - 300);
        EXPECT_EQ(io::parse_double(io::format_double(v)), v);
    }
    EXPECT_EQ(io::format_double(0.75), "0.75");
    EXPECT_THROW(io::parse_double("1.5x"), FormatError);
}

TEST(TraceFile, RoundTrip) {
    const auto dir = testing_support::scratch_dir("trace");
    const BoundaryTrace t = small_trace();
    io::TraceMeta meta{"0123456789abcdef", Formulation::scattered_field, {-0.5, 0.5, 0.5}, 0.1, 1.0};
    io::write_trace(dir / "trace.csv.gz", t, meta);
    io::TraceMeta back_meta;
    const BoundaryTrace back = io::read_trace(dir / "trace.csv.gz", &back_meta);
    EXPECT_EQ(back.samples, t.samples);
    EXPECT_EQ(back.steps, t.steps);
    EXPECT_EQ(back.dt, t.dt);
    ASSERT_EQ(back.faces.size(), t.faces.size());
    for (std::size_t f = 0; f < t.faces.size(); ++f) {
        EXPECT_EQ(back.faces[f].center, t.faces[f].center);
        EXPECT_EQ(back.faces[f].normal, t.faces[f].normal);
        EXPECT_EQ(back.faces[f].area, t.faces[f].area);
    }
    EXPECT_EQ(back_meta.scene_hash, meta.scene_hash);
    EXPECT_EQ(back_meta.probe_center, meta.probe_center);
    EXPECT_EQ(io::embedded_hash(dir / "trace.csv.gz"), meta.scene_hash);
}

TEST(AccumulatorFile, RoundTrip) {
    const auto dir = testing_support::scratch_dir("acc");
    const auto scene = ValidatedScene::validate(testing_support::coarse_scene(1.0 / 8.0));
    SolveOptions o;
    o.T_max = 0.8;
    o.taus = {4.0, 9.0};
    const auto run = solve_ibvp(scene, o);
    io::write_accumulators(dir / "acc.csv", *run.laplace, "feedfacefeedface");
    const auto back = io::read_accumulators(dir / "acc.csv");
    EXPECT_EQ(back.taus, run.laplace->taus);
    EXPECT_EQ(back.boundary, run.laplace->boundary);
    EXPECT_EQ(back.T, run.laplace->T);
}

TEST(SnapshotFile, RoundTrip) {
    const auto dir = testing_support::scratch_dir("snap");
    const Lattice l = Lattice::covering({{0, 0, 0}, {1, 0.5, 0.25}}, 0.125);
    GridField f(l);
    for (int k = 0; k < l.nz; ++k)
        for (int j = 0; j < l.ny; ++j)
            for (int i = 0; i < l.nx; ++i) f.at(i, j, k) = i + 10 * j + 100 * k + 0.5;
    io::write_snapshot(dir / "s.bin", f, 1.25, "00000000deadbeef");
    double t = 0;
    std::string hash;
    const GridField back = io::read_snapshot(dir / "s.bin", &t, &hash);
    EXPECT_EQ(back.values, f.values);
    EXPECT_EQ(back.lattice.nx, 8);
    EXPECT_EQ(t, 1.25);
    EXPECT_EQ(hash, "00000000deadbeef");
    EXPECT_EQ(io::embedded_hash(dir / "s.bin"), "00000000deadbeef");
    EXPECT_EQ(fs::file_size(dir / "s.bin"), 8u + 16u + 12u + 8u * 5u + 8u * 64u);
}

TEST(CurveFile, RoundTrip) {
    const auto dir = testing_support::scratch_dir("curve");
    IndicatorCurve c;
    c.taus = {4.0, 8.0, 16.0};
    c.full = {1e-3, -2e-9, 3e-250};
    c.simple = {1.1e-3, 2e-9, 0.0};
    c.localized = {0.9e-3, 1e-9, 1e-251};
    c.T_requested = 1.41;
    c.T_used = 1.4;
    c.M = 0.9;
    c.probe_id = "p0";
    c.probe_center = {-0.5, 0.5, 0.5};
    c.probe_radius = 0.1;
    io::write_curve(dir / "c.csv", c, "abcdefabcdefabcd");
    io::Header h;
    const auto back = io::read_curve(dir / "c.csv", &h);
    EXPECT_EQ(back.taus, c.taus);
    EXPECT_EQ(back.full, c.full);
    EXPECT_EQ(back.simple, c.simple);
    EXPECT_EQ(back.localized, c.localized);
    EXPECT_EQ(back.T_used, c.T_used);
    EXPECT_EQ(back.T_requested, c.T_requested);
    EXPECT_EQ(back.M, c.M);
    EXPECT_EQ(back.probe_id, "p0");
    EXPECT_EQ(back.probe_center, c.probe_center);
    EXPECT_EQ(h.get("scene_hash"), "abcdefabcdefabcd");
    EXPECT_THROW(h.get("nope"), FormatError);

    c.localized.clear();
    c.M.reset();
    io::write_curve(dir / "d.csv", c, "abcdefabcdefabcd");
    const auto plain = io::read_curve(dir / "d.csv");
    EXPECT_TRUE(plain.localized.empty());
    EXPECT_FALSE(plain.M);
}

TEST(ResultFile, RoundTrip) {
    ProbeResult r;
    r.probe_id = "xm";
    r.center = {-0.5, 0.5, 0.5};
    r.eta = 0.1;
    r.dist_estimate = 0.7436;
    r.d_partialD_estimate = 0.8436;
    r.tau_lo = 4;
    r.tau_hi = 20;
    r.fit_r2 = 0.99999;
    r.model = FitModel::asymptotic;
    r.variant = IndicatorVariant::localized;
    r.verdicts = {{1.2, Verdict::decay}, {1.8, Verdict::blow_up}};
    r.supT_estimate = 1.4625;
    const auto back = io::probe_result_from_json(io::probe_result_to_json(r, "h"));
    EXPECT_EQ(back.probe_id, r.probe_id);
    EXPECT_EQ(back.center, r.center);
    EXPECT_EQ(back.dist_estimate, r.dist_estimate);
    EXPECT_EQ(back.d_partialD_estimate, r.d_partialD_estimate);
    EXPECT_EQ(back.variant, r.variant);
    ASSERT_EQ(back.verdicts.size(), 2u);
    EXPECT_EQ(back.verdicts[1].verdict, Verdict::blow_up);
    EXPECT_EQ(back.supT_estimate, r.supT_estimate);
    r.supT_estimate.reset();
    EXPECT_FALSE(io::probe_result_from_json(io::probe_result_to_json(r, "h")).supT_estimate);
}

TEST(Manifest, RoundTripAndVerification) {
    const auto dir = testing_support::scratch_dir("manifest");
    const std::string hash = "0011223344556677";
    IndicatorCurve c;
    c.taus = {4.0};
    c.full = c.simple = {1.0};
    io::write_curve(dir / "a.csv", c, hash);
    io::write_text(dir / "b.json", "{\n  \"scene_hash\": \"" + hash + "\"\n}\n");

    io::RunManifest m;
    m.scene_hash = hash;
    m.command = "indicator";
    m.parameters = {{"T", "1.6"}};
    m.tool_version = "test";
    m.started = io::utc_timestamp();
    m.finished = io::utc_timestamp();
    m.add_output(dir, "a.csv");
    m.add_output(dir, "b.json");
    m.stage_seconds = {{"assemble", 0.5}};
    io::write_manifest(dir / "manifest.test.json", m);

    const auto back = io::read_manifest(dir / "manifest.test.json");
    EXPECT_EQ(back.outputs.size(), 2u);
    EXPECT_EQ(back.outputs[0].checksum, m.outputs[0].checksum);
    EXPECT_EQ(back.parameters, m.parameters);
    EXPECT_TRUE(io::verify_manifest(dir / "manifest.test.json").empty());

    // Tampering and deletion are both reported.
    io::write_text(dir / "b.json", "{\n  \"scene_hash\": \"ffffffffffffffff\"\n}\n");
    EXPECT_FALSE(io::verify_manifest(dir / "manifest.test.json").empty());
    io::write_text(dir / "b.json", "{\n  \"scene_hash\": \"" + hash + "\"\n}\n");
    EXPECT_TRUE(io::verify_manifest(dir / "manifest.test.json").empty());
    fs::remove(dir / "a.csv");
    EXPECT_FALSE(io::verify_manifest(dir / "manifest.test.json").empty());
}
