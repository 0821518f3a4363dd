#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cli/commands.hpp"
#include "enclosure/io.hpp"
#include "test_scenes.hpp"

using namespace enclosure;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s, char skip = '#') {
    std::istringstream in(s);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != skip) ++n;
    return n;
}

fs::path write_coarse_scene(const fs::path& dir, double h = 1.0 / 16.0) {
    SceneConfig c = testing_support::coarse_scene(h);
    c.T = 1.8;
    io::write_scene(dir / "scene.json", c);
    return dir / "scene.json";
}

}  // namespace

TEST(Cli, ValidateKernelsDefaultPasses) {
    const auto r = run_cli({"validate-kernels"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_GE(count_lines(r.out) - 1, 12u);
    EXPECT_EQ(r.out.find(",false"), std::string::npos);
}

TEST(Cli, ValidateKernelsTightToleranceFails) {
    const auto dir = testing_support::scratch_dir("vk");
    const auto r = run_cli({"validate-kernels", "--tolerance", "1e-15", "--report", (dir / "k.csv").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(io::read_text(dir / "k.csv").find(",false"), std::string::npos);
}

TEST(Cli, NegativeProbeRadiusIsInputError) {
    const auto dir = testing_support::scratch_dir("eta");
    SceneConfig c = testing_support::coarse_scene();
    c.probe.radius = -1.0;
    io::write_scene(dir / "bad.json", c);
    EXPECT_EQ(run_cli({"validate-kernels", "--scene", (dir / "bad.json").string()}).code, 3);
    EXPECT_EQ(run_cli({"forward", "--scene", (dir / "bad.json").string(), "--out", (dir / "o").string()}).code, 3);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli({}).code, 3);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 3);
    EXPECT_EQ(run_cli({"forward", "--scene", "/nonexistent.json", "--out", "/tmp/x"}).code, 3);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, ForwardIndicatorRecoverPipeline) {
    const auto dir = testing_support::scratch_dir("pipeline");
    const auto scene = write_coarse_scene(dir);
    const auto run = dir / "run";

    auto r = run_cli({"forward", "--scene", scene.string(), "--out", run.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto manifest = io::read_manifest(run / "manifest.forward.json");
    EXPECT_GE(manifest.outputs.size(), 3u);
    EXPECT_GT(fs::file_size(run / "trace.csv.gz"), 0u);
    EXPECT_EQ(run_cli({"verify-manifest", run.string()}).code, 0);

    r = run_cli({"indicator", "--run", run.string(), "--T", "1.6,1.2", "--M", "0.9"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto curve = io::read_curve(run / "curve_T1.6_M0.9.csv");
    EXPECT_EQ(curve.full.size(), 24u);
    EXPECT_EQ(curve.localized.size(), 24u);

    r = run_cli({"indicator", "--run", run.string(), "--T", "1.6", "--M", "0.3"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_TRUE(io::read_curve(run / "curve_T1.6_M0.3.csv").localized.empty());

    EXPECT_EQ(run_cli({"indicator", "--run", run.string(), "--T", "2.5"}).code, 4);

    const auto rec = dir / "rec";
    r = run_cli({"recover", "--mode", "fit", "--curves", (run / "curve_T1.6_M0.9.csv").string(), "--out", rec.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_TRUE(fs::exists(rec / "result_p0_T1.6.json"));
    const auto result = io::probe_result_from_json(io::read_text(rec / "result_p0_T1.6.json"));
    EXPECT_GT(result.dist_estimate, 0.5);
    EXPECT_LT(result.dist_estimate, 1.0);

    r = run_cli({"recover", "--mode", "dichotomy", "--curves", (run / "curve_T1.2_M0.9.csv").string(),
                 (run / "curve_T1.6_M0.9.csv").string(), "--out", rec.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(run_cli({"verify-manifest", rec.string()}).code, 0);

    // Determinism: a second indicator pass writes identical bytes.
    const std::string first = io::read_text(run / "curve_T1.6_M0.9.csv");
    ASSERT_EQ(run_cli({"indicator", "--run", run.string(), "--T", "1.6", "--M", "0.9"}).code, 0);
    EXPECT_EQ(io::read_text(run / "curve_T1.6_M0.9.csv"), first);

    fs::remove(run / "accumulators.csv");
    EXPECT_EQ(run_cli({"verify-manifest", (run / "manifest.forward.json").string()}).code, 2);
}

TEST(Cli, ForwardIsDeterministic) {
    const auto dir = testing_support::scratch_dir("determinism");
    const auto scene = write_coarse_scene(dir);
    ASSERT_EQ(run_cli({"forward", "--scene", scene.string(), "--out", (dir / "a").string()}).code, 0);
    ASSERT_EQ(run_cli({"forward", "--scene", scene.string(), "--out", (dir / "b").string()}).code, 0);
    for (const char* f : {"trace.csv.gz", "accumulators.csv", "final_u.bin"})
        EXPECT_EQ(io::read_text(dir / "a" / f), io::read_text(dir / "b" / f)) << f;
}

TEST(Cli, SyntheticExponentialCurveRecoveredExactly) {
    const auto dir = testing_support::scratch_dir("synthetic");
    IndicatorCurve c;
    for (int i = 0; i < 20; ++i) {
        const double t = 4.0 + i;
        c.taus.push_back(t);
        c.full.push_back(std::exp(-3.0 * t));
    }
    c.simple = c.full;
    c.T_requested = c.T_used = 1.6;
    c.probe_id = "syn";
    c.probe_center = {-0.5, 0.5, 0.5};
    c.probe_radius = 0.1;
    io::write_curve(dir / "c.csv", c, "0000000000000000");
    const auto r = run_cli({"recover", "--mode", "fit", "--model", "exponential", "--curves", (dir / "c.csv").string(),
                            "--out", (dir / "rec").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto res = io::probe_result_from_json(io::read_text(dir / "rec" / "result_syn_T1.6.json"));
    EXPECT_NEAR(res.dist_estimate, 1.5, 1e-12);
    EXPECT_TRUE(fs::exists(dir / "rec" / "fit_syn_T1.6.csv"));
}

TEST(Cli, UnfittableCurveIsRecoveryFailure) {
    const auto dir = testing_support::scratch_dir("nowindow");
    IndicatorCurve c;
    c.taus = {4, 5, 6, 7, 8, 9, 10, 11, 12};
    c.full.assign(9, -1.0);
    c.simple = c.full;
    c.probe_id = "neg";
    io::write_curve(dir / "c.csv", c, "0000000000000000");
    EXPECT_EQ(run_cli({"recover", "--curves", (dir / "c.csv").string(), "--out", (dir / "rec").string()}).code, 5);
}

TEST(Cli, EnvelopeFromTwoResults) {
    const auto dir = testing_support::scratch_dir("envelope");
    const auto scene = write_coarse_scene(dir);
    std::vector<std::string> args = {"recover", "--mode", "envelope", "--scene", scene.string(), "--out",
                                     (dir / "env").string(), "--results"};
    int i = 0;
    for (Vec3 p : {Vec3{-0.5, 0.5, 0.5}, Vec3{1.5, 0.5, 0.5}}) {
        ProbeResult r;
        r.probe_id = "p" + std::to_string(i);
        r.center = p;
        r.eta = 0.1;
        r.dist_estimate = 0.75;
        r.d_partialD_estimate = 0.85;
        const auto path = dir / (r.probe_id + ".json");
        io::write_text(path, io::probe_result_to_json(r, io::scene_hash(io::read_scene(scene))));
        args.push_back(path.string());
        ++i;
    }
    const auto r = run_cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string env = io::read_text(dir / "env" / "envelope.json");
    EXPECT_NE(env.find("cumulative_volumes"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "env" / "occupancy.bin"));
    EXPECT_EQ(run_cli({"verify-manifest", (dir / "env").string()}).code, 0);
}

TEST(Cli, SweepRejectsDuplicateIds) {
    const auto dir = testing_support::scratch_dir("dupes");
    const auto scene = write_coarse_scene(dir);
    io::write_text(dir / "probes.json", R"({"probes": [
      {"id": "a", "center": [-0.5, 0.5, 0.5], "radius": 0.1},
      {"id": "a", "center": [1.5, 0.5, 0.5], "radius": 0.1}]})");
    EXPECT_EQ(run_cli({"sweep", "--scene", scene.string(), "--probes", (dir / "probes.json").string(), "--out",
                       (dir / "out").string()})
                  .code,
              3);
}

TEST(Cli, SingleProbeSweep) {
    const auto dir = testing_support::scratch_dir("sweep1");
    const auto scene = write_coarse_scene(dir);
    io::write_text(dir / "probes.json", R"({"probes": [{"id": "a", "center": [-0.5, 0.5, 0.5], "radius": 0.1}]})");
    const auto r = run_cli({"sweep", "--scene", scene.string(), "--probes", (dir / "probes.json").string(), "--out",
                            (dir / "out").string(), "--T", "1.6", "--jobs", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string env = io::read_text(dir / "out" / "envelope.json");
    EXPECT_NE(env.find("\"exclusion\""), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "out" / "a" / "result.json"));
    EXPECT_TRUE(fs::exists(dir / "out" / "summary.csv"));
    EXPECT_EQ(run_cli({"verify-manifest", (dir / "out").string()}).code, 0);
}
