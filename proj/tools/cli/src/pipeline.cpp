#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cli/commands.hpp"
#include "enclosure/errors.hpp"
#include "enclosure/indicator.hpp"
#include "enclosure/io.hpp"
#include "enclosure/recovery.hpp"
#include "enclosure/solver.hpp"

namespace enclosure::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string number_tag(double v) { return io::format_double(v); }

std::string join_numbers(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + io::format_double(v[i]);
    return s;
}

void set_solver_threads(int n) {
#ifdef _OPENMP
    omp_set_num_threads(std::max(1, n));
#else
    (void)n;
#endif
}

io::RunManifest start_manifest(const std::string& command, const std::string& hash) {
    io::RunManifest m;
    m.command = command;
    m.scene_hash = hash;
    m.tool_version = kToolVersion;
    m.started = io::utc_timestamp();
    return m;
}

void finish_manifest(io::RunManifest& m, const fs::path& path) {
    m.finished = io::utc_timestamp();
    io::write_manifest(path, m);
}

FitOptions fit_options(const std::string& model, const std::optional<IndicatorCurve>& null_curve, IndicatorVariant variant) {
    FitOptions o;
    o.model = fit_model_from_string(model);
    if (null_curve) {
        const auto& v = null_curve->values(variant);
        o.null_magnitude.assign(v.begin(), v.end());
    }
    return o;
}

Formulation formulation_from(const std::string& s) {
    if (s == "scattered") return Formulation::scattered_field;
    if (s == "total") return Formulation::total_field;
    throw ConfigError("unknown formulation '" + s + "'");
}

struct LoadedRun {
    SceneConfig config;
    std::string hash;
    BoundaryTrace trace;
    io::TraceMeta meta;
};

LoadedRun load_run(const fs::path& dir) {
    LoadedRun r;
    if (!fs::exists(dir / "scene.json") || !fs::exists(dir / "trace.csv.gz")) {
        throw ConfigError(dir.string() + " does not hold forward outputs (scene.json, trace.csv.gz)");
    }
    r.config = io::read_scene(dir / "scene.json");
    r.hash = io::scene_hash(r.config);
    r.trace = io::read_trace(dir / "trace.csv.gz", &r.meta);
    if (r.meta.scene_hash != r.hash) throw FormatError("trace scene hash does not match scene.json");
    return r;
}

std::string curve_name(double T, std::optional<double> M) {
    std::string s = "curve_T" + number_tag(T);
    if (M) s += "_M" + number_tag(*M);
    return s + ".csv";
}

std::string result_stem(const std::string& probe_id, double T) { return probe_id + "_T" + number_tag(T); }

}  // namespace

int worker_count() {
    if (const char* env = std::getenv("ENCLOSURE_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// ------------------------------------------------------------------ forward

int cmd_forward(const ForwardArgs& a, std::ostream& out, std::ostream& err) {
    SceneConfig config = io::read_scene(a.scene);
    if (a.no_obstacles) config.obstacles.clear();
    const auto scene = ValidatedScene::validate(config);
    const std::string hash = io::scene_hash(config);

    std::set<std::string> record(a.record.begin(), a.record.end());
    for (const auto& r : record) {
        if (r != "trace" && r != "accumulators" && r != "volume" && r != "final") {
            throw ConfigError("unknown --record item '" + r + "'");
        }
    }
    SolveOptions opt;
    opt.T_max = a.T_max.value_or(config.T);
    opt.taus = a.taus.empty() ? scene.tau_grid() : a.taus;
    opt.formulation = formulation_from(a.formulation);
    opt.record.trace = true;
    opt.record.volume_laplace = record.count("volume") > 0;
    opt.record.final_state = record.count("final") > 0;
    if (!record.count("accumulators") && !opt.record.volume_laplace) opt.taus.clear();

    fs::create_directories(a.out);
    auto manifest = start_manifest("forward", hash);
    manifest.parameters = {{"scene", a.scene.string()},
                           {"T_max", io::format_double(opt.T_max)},
                           {"taus", join_numbers(opt.taus)},
                           {"formulation", a.formulation},
                           {"no_obstacles", a.no_obstacles ? "true" : "false"},
                           {"h", io::format_double(config.h)},
                           {"dt", io::format_double(config.dt)}};

    set_solver_threads(worker_count());
    auto t0 = Clock::now();
    std::optional<ForwardRun> solved;
    try {
        solved = solve_ibvp(scene, opt);
    } catch (const Error& e) {
        err << "solver failed: " << e.what() << "\n";
        return exit_runtime_error;
    }
    const ForwardRun& run = *solved;
    manifest.stage_seconds.emplace_back("solve", seconds_since(t0));

    t0 = Clock::now();
    io::write_scene(a.out / "scene.json", config);
    // scene.json is the input echo; it carries no header, so it is not inventoried.
    if (record.count("trace")) {
        io::TraceMeta meta{hash, run.formulation, run.pulse.center(), run.pulse.radius(), run.pulse.amplitude()};
        io::write_trace(a.out / "trace.csv.gz", run.trace, meta);
        manifest.add_output(a.out, "trace.csv.gz");
    } else {
        err << "note: trace not recorded; downstream indicator runs need it\n";
    }
    if (run.laplace && record.count("accumulators")) {
        io::write_accumulators(a.out / "accumulators.csv", *run.laplace, hash);
        manifest.add_output(a.out, "accumulators.csv");
    }
    if (run.laplace && opt.record.volume_laplace) {
        for (std::size_t q = 0; q < run.laplace->taus.size(); ++q) {
            const auto name = "volume_w_tau" + number_tag(run.laplace->taus[q]) + ".bin";
            io::write_snapshot(a.out / name, run.laplace->volume[q], run.laplace->T, hash);
            manifest.add_output(a.out, name);
        }
    }
    if (run.final_state) {
        io::write_snapshot(a.out / "final_u.bin", run.final_state->u, run.final_state->T, hash);
        io::write_snapshot(a.out / "final_ut.bin", run.final_state->u_t, run.final_state->T, hash);
        manifest.add_output(a.out, "final_u.bin");
        manifest.add_output(a.out, "final_ut.bin");
    }
    manifest.stage_seconds.emplace_back("write", seconds_since(t0));
    finish_manifest(manifest, a.out / "manifest.forward.json");

    out << "forward: " << run.trace.face_count() << " faces, " << run.trace.steps << " steps, T_max "
        << io::format_double(run.trace.duration()) << ", " << manifest.outputs.size() << " outputs in " << a.out.string()
        << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------- indicator

int cmd_indicator(const IndicatorArgs& a, std::ostream& out, std::ostream& err) {
    auto t0 = Clock::now();
    const LoadedRun run = load_run(a.run);
    const fs::path dir = a.out.empty() ? a.run : a.out;
    fs::create_directories(dir);
    auto manifest = start_manifest("indicator", run.hash);
    manifest.stage_seconds.emplace_back("load", seconds_since(t0));

    const auto reference = a.reference == "exact" ? ReferenceQuadrature::exact : ReferenceQuadrature::matched;
    if (a.reference != "exact" && a.reference != "matched") throw ConfigError("unknown reference '" + a.reference + "'");
    const ProbePulse pulse(run.meta.probe_center, run.meta.probe_radius, run.meta.amplitude);
    const IndicatorAssembler assembler(run.trace, pulse, reference);

    std::vector<double> Ts = a.T.empty() ? std::vector<double>{run.config.T} : a.T;
    std::vector<std::optional<double>> Ms;
    for (double M : a.M) Ms.emplace_back(M);
    if (Ms.empty()) Ms.emplace_back(run.config.localization_M);
    manifest.parameters = {{"run", a.run.string()}, {"T", join_numbers(Ts)}, {"M", join_numbers(a.M)},
                           {"reference", a.reference}, {"probe_id", a.probe_id}};

    set_solver_threads(worker_count());
    t0 = Clock::now();
    for (double T : Ts) {
        for (const auto& M : Ms) {
            IndicatorCurve curve;
            try {
                curve = assembler.curve(run.config.tau_grid, T, M);
            } catch (const TimeWindowError& e) {
                err << "indicator: " << e.what() << "\n";
                return exit_runtime_error;
            }
            if (M && curve.localized.empty()) {
                err << "warning: no boundary face within M = " << io::format_double(*M)
                    << " of the probe; localized column omitted\n";
            }
            curve.probe_id = a.probe_id;
            const auto name = curve_name(T, M);
            io::write_curve(dir / name, curve, run.hash);
            manifest.add_output(dir, name);
            out << "indicator: wrote " << (dir / name).string() << " (T_used " << io::format_double(curve.T_used) << ")\n";
        }
    }
    manifest.stage_seconds.emplace_back("assemble", seconds_since(t0));
    finish_manifest(manifest, dir / "manifest.indicator.json");
    return exit_ok;
}

// ------------------------------------------------------------------ recover

namespace {

struct LoadedCurve {
    IndicatorCurve curve;
    std::string hash;
};

LoadedCurve load_curve(const fs::path& p) {
    io::Header h;
    LoadedCurve c{io::read_curve(p, &h), {}};
    c.hash = h.get("scene_hash");
    return c;
}

Lattice query_lattice(const SceneConfig& config, std::optional<double> h) {
    return Lattice::covering(config.omega, h.value_or(config.h));
}

std::vector<double> cumulative_volumes(const std::vector<ProbeResult>& results, const Lattice& query) {
    std::vector<double> v;
    for (std::size_t k = 1; k <= results.size(); ++k) {
        v.push_back(enclosure_envelope({results.begin(), results.begin() + static_cast<std::ptrdiff_t>(k)}, query)
                        .admissible_volume);
    }
    return v;
}

}  // namespace

int cmd_recover(const RecoverArgs& a, std::ostream& out, std::ostream& err) {
    const auto variant = variant_from_string(a.variant);
    fit_model_from_string(a.model);
    fs::create_directories(a.out);
    std::optional<IndicatorCurve> null_curve;
    if (!a.null_curve.empty()) null_curve = load_curve(a.null_curve).curve;
    const FitOptions options = fit_options(a.model, null_curve, variant);

    auto t0 = Clock::now();
    if (a.mode == "fit" || a.mode == "dichotomy") {
        if (a.curves.empty()) throw ConfigError("--mode " + a.mode + " needs --curves");
        std::vector<LoadedCurve> curves;
        for (const auto& p : a.curves) curves.push_back(load_curve(p));
        auto manifest = start_manifest("recover", curves.front().hash);
        manifest.parameters = {{"mode", a.mode}, {"variant", a.variant}, {"model", a.model},
                               {"eps_slope", io::format_double(a.eps_slope)}};

        if (a.mode == "fit") {
            for (const auto& c : curves) {
                FitResult fit;
                try {
                    fit = fit_distance(c.curve, variant, options);
                } catch (const NoWindow& e) {
                    err << "recover: no fit window for probe " << c.curve.probe_id << ": " << e.what() << "\n";
                    return exit_recovery_failure;
                }
                const auto result = make_probe_result(c.curve, variant, fit);
                const auto stem = result_stem(c.curve.probe_id, c.curve.T_used);
                io::write_text(a.out / ("result_" + stem + ".json"), io::probe_result_to_json(result, c.hash));
                io::write_fit_table(a.out / ("fit_" + stem + ".csv"), c.curve, variant, fit, c.hash);
                manifest.add_output(a.out, "result_" + stem + ".json");
                manifest.add_output(a.out, "fit_" + stem + ".csv");
                out << "probe " << c.curve.probe_id << ": dist " << io::format_double(fit.dist_estimate) << ", d_partialD "
                    << io::format_double(result.d_partialD_estimate) << ", window [" << io::format_double(fit.tau_lo)
                    << ", " << io::format_double(fit.tau_hi) << "], r2 " << io::format_double(fit.r2)
                    << (fit.poor_fit ? " (poor fit)" : "") << "\n";
            }
        } else {
            std::sort(curves.begin(), curves.end(),
                      [](const LoadedCurve& x, const LoadedCurve& y) { return x.curve.T_used < y.curve.T_used; });
            std::vector<DichotomyResult> verdicts;
            for (const auto& c : curves) {
                try {
                    verdicts.push_back(dichotomy(c.curve, variant, options, a.eps_slope));
                } catch (const NoWindow& e) {
                    err << "recover: no fit window at T = " << io::format_double(c.curve.T_used) << ": " << e.what() << "\n";
                    return exit_recovery_failure;
                }
                out << "T " << io::format_double(verdicts.back().T) << ": " << to_string(verdicts.back().verdict)
                    << " (slope " << io::format_double(verdicts.back().slope) << ")\n";
            }
            if (!verdicts_monotone(verdicts)) err << "warning: verdicts are not monotone in T\n";
            const auto& last = curves.back();
            ProbeResult result;
            if (verdicts.back().fit) {
                result = make_probe_result(last.curve, variant, *verdicts.back().fit);
            } else {
                result.probe_id = last.curve.probe_id;
                result.center = last.curve.probe_center;
                result.eta = last.curve.probe_radius;
            }
            for (const auto& d : verdicts) result.verdicts.push_back({d.T, d.verdict});
            const auto name = "dichotomy_" + last.curve.probe_id + ".json";
            io::write_text(a.out / name, io::probe_result_to_json(result, last.hash));
            manifest.add_output(a.out, name);
        }
        manifest.stage_seconds.emplace_back(a.mode, seconds_since(t0));
        finish_manifest(manifest, a.out / "manifest.recover.json");
        return exit_ok;
    }

    if (a.mode == "supT") {
        if (a.run.empty()) throw ConfigError("--mode supT needs --run (the trace is re-truncated at each T)");
        const LoadedRun run = load_run(a.run);
        auto manifest = start_manifest("recover", run.hash);
        manifest.parameters = {{"mode", a.mode}, {"variant", a.variant}, {"model", a.model}, {"run", a.run.string()}};
        const ProbePulse pulse(run.meta.probe_center, run.meta.probe_radius, run.meta.amplitude);
        const IndicatorAssembler assembler(run.trace, pulse);
        const double T_max = a.T_max.value_or(run.trace.duration());
        const auto M = a.M ? a.M : run.config.localization_M;
        set_solver_threads(worker_count());
        const auto s = sup_T_characterization(assembler, run.config.tau_grid, T_max, variant, options, a.eps_slope, 10,
                                              variant == IndicatorVariant::localized ? M : std::nullopt);
        auto top = assembler.curve(run.config.tau_grid, std::min(T_max, run.trace.duration()), M);
        ProbeResult result;
        try {
            result = make_probe_result(top, variant, fit_distance(top, variant, options));
        } catch (const NoWindow& e) {
            err << "recover: no fit window at T_max: " << e.what() << "\n";
            return exit_recovery_failure;
        }
        result.probe_id = a.run.filename().empty() ? a.run.parent_path().filename().string() : a.run.filename().string();
        for (const auto& v : s.visits) result.verdicts.push_back({v.T, v.verdict});
        result.supT_estimate = s.supT_estimate;
        io::write_text(a.out / "supT.json", io::probe_result_to_json(result, run.hash));
        manifest.add_output(a.out, "supT.json");
        for (const auto& v : s.visits) out << "T " << io::format_double(v.T) << ": " << to_string(v.verdict) << "\n";
        out << "supT " << io::format_double(s.supT_estimate) << " (dist " << io::format_double(s.dist_estimate) << ")"
            << (s.consistent ? "" : " [inconsistent verdicts]") << "\n";
        manifest.stage_seconds.emplace_back("supT", seconds_since(t0));
        finish_manifest(manifest, a.out / "manifest.recover.json");
        return exit_ok;
    }

    if (a.mode == "envelope") {
        if (a.scene.empty()) throw ConfigError("--mode envelope needs --scene for the query lattice");
        const SceneConfig config = io::read_scene(a.scene);
        std::vector<ProbeResult> results;
        for (const auto& p : a.results) results.push_back(io::probe_result_from_json(io::read_text(p)));
        for (const auto& p : a.curves) {
            const auto c = load_curve(p);
            try {
                results.push_back(make_probe_result(c.curve, variant, fit_distance(c.curve, variant, options)));
            } catch (const NoWindow& e) {
                err << "recover: no fit window for " << p.string() << ": " << e.what() << "\n";
                return exit_recovery_failure;
            }
        }
        if (results.empty()) throw ConfigError("--mode envelope needs --results or --curves");
        const std::string hash = io::scene_hash(config);
        auto manifest = start_manifest("recover", hash);
        manifest.parameters = {{"mode", a.mode}, {"scene", a.scene.string()}};
        const Lattice query = query_lattice(config, a.lattice_h);
        const auto env = enclosure_envelope(results, query);
        io::write_text(a.out / "envelope.json", io::envelope_to_json(env, results, hash, cumulative_volumes(results, query)));
        io::write_occupancy(a.out / "occupancy.bin", env, hash);
        manifest.add_output(a.out, "envelope.json");
        manifest.add_output(a.out, "occupancy.bin");
        out << "envelope: " << results.size() << " probes, admissible volume " << io::format_double(env.admissible_volume)
            << "\n";
        manifest.stage_seconds.emplace_back("envelope", seconds_since(t0));
        finish_manifest(manifest, a.out / "manifest.recover.json");
        return exit_ok;
    }
    throw ConfigError("unknown --mode '" + a.mode + "'");
}

// -------------------------------------------------------------------- sweep

namespace {

struct ProbeSpec {
    std::string id;
    ProbeBall ball;
};

std::vector<ProbeSpec> read_probes(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("probe file not found: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("probe file is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("probes") || !j["probes"].is_array() || j.size() != 1) {
        throw ConfigError("probe file must be {\"probes\": [...]}");
    }
    std::vector<ProbeSpec> out;
    std::set<std::string> ids;
    for (const auto& p : j["probes"]) {
        try {
            if (!p.is_object() || p.size() != 3) throw ConfigError("probe entries need exactly id, center, radius");
            ProbeSpec s;
            s.id = p.at("id").get<std::string>();
            const auto& c = p.at("center");
            if (!c.is_array() || c.size() != 3) throw ConfigError("probe center must have 3 numbers");
            s.ball = {{c[0].get<double>(), c[1].get<double>(), c[2].get<double>()}, p.at("radius").get<double>()};
            if (s.id.empty() || s.id.find_first_of("/\\ ") != std::string::npos) throw ConfigError("bad probe id '" + s.id + "'");
            if (!ids.insert(s.id).second) throw ConfigError("duplicate probe id '" + s.id + "'");
            out.push_back(s);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("probe entry: ") + e.what());
        }
    }
    if (out.empty()) throw ConfigError("probe file lists no probes");
    return out;
}

struct JobOutcome {
    int code = exit_ok;
    std::string message;
};

}  // namespace

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
    const SceneConfig tmpl = io::read_scene(a.scene);
    ValidatedScene::validate(tmpl);
    const auto probes = read_probes(a.probes);
    const auto variant = variant_from_string(a.variant);
    const FitOptions options = fit_options(a.model, std::nullopt, variant);
    std::vector<ValidatedScene> scenes;
    for (const auto& p : probes) {
        SceneConfig c = tmpl;
        c.probe = p.ball;
        scenes.push_back(ValidatedScene::validate(c));
    }

    fs::create_directories(a.out);
    const std::string hash = io::scene_hash(tmpl);
    auto manifest = start_manifest("sweep", hash);
    const int jobs = std::min<int>(a.jobs.value_or(worker_count()), static_cast<int>(probes.size()));
    const int threads_per_job = std::max(1, worker_count() / std::max(1, jobs));
    manifest.parameters = {{"scene", a.scene.string()}, {"probes", a.probes.string()}, {"jobs", std::to_string(jobs)},
                           {"variant", a.variant}, {"model", a.model}};
    const double T_max = a.T_max.value_or(tmpl.T);
    const double T = a.T.value_or(std::min(tmpl.T, T_max));

    std::vector<JobOutcome> outcomes(probes.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&]() {
        set_solver_threads(threads_per_job);
        for (std::size_t i = next++; i < probes.size(); i = next++) {
            const auto& id = probes[i].id;
            const fs::path dir = a.out / id;
            auto& outcome = outcomes[i];
            try {
                fs::create_directories(dir);
                const auto& scene = scenes[i];
                const std::string probe_hash = io::scene_hash(scene.config());
                auto pm = start_manifest("sweep-probe", probe_hash);
                auto t0 = Clock::now();
                SolveOptions opt;
                opt.T_max = T_max;
                const auto run = solve_ibvp(scene, opt);
                pm.stage_seconds.emplace_back("solve", seconds_since(t0));
                io::write_scene(dir / "scene.json", scene.config());
                if (a.keep_traces) {
                    io::write_trace(dir / "trace.csv.gz", run.trace,
                                    {probe_hash, run.formulation, run.pulse.center(), run.pulse.radius(), run.pulse.amplitude()});
                    pm.add_output(dir, "trace.csv.gz");
                }
                t0 = Clock::now();
                const IndicatorAssembler assembler(run.trace, run.pulse);
                auto curve = assembler.curve(scene.tau_grid(), T, scene.config().localization_M);
                curve.probe_id = id;
                io::write_curve(dir / "curve.csv", curve, probe_hash);
                pm.add_output(dir, "curve.csv");
                pm.stage_seconds.emplace_back("indicator", seconds_since(t0));
                FitResult fit;
                try {
                    fit = fit_distance(curve, variant, options);
                } catch (const NoWindow& e) {
                    outcome = {exit_recovery_failure, e.what()};
                    finish_manifest(pm, dir / "manifest.probe.json");
                    continue;
                }
                io::write_text(dir / "result.json", io::probe_result_to_json(make_probe_result(curve, variant, fit), probe_hash));
                io::write_fit_table(dir / "fit.csv", curve, variant, fit, probe_hash);
                pm.add_output(dir, "result.json");
                pm.add_output(dir, "fit.csv");
                finish_manifest(pm, dir / "manifest.probe.json");
                std::lock_guard lock(log_mutex);
                out << "probe " << id << ": dist " << io::format_double(fit.dist_estimate) << "\n";
            } catch (const std::exception& e) {
                outcome = {exit_runtime_error, e.what()};
            }
        }
    };
    auto t0 = Clock::now();
    std::vector<std::thread> pool;
    for (int w = 1; w < jobs; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    manifest.stage_seconds.emplace_back("probes", seconds_since(t0));

    // Merge from the per-probe files.
    std::vector<ProbeResult> results;
    int code = exit_ok;
    std::string summary = "# format: enclosure-sweep/1\n# scene_hash: " + hash +
                          "\n# columns: probe_id,status,dist_estimate,d_partialD_estimate,message\n";
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto& o = outcomes[i];
        if (o.code == exit_ok) {
            const auto r = io::probe_result_from_json(io::read_text(a.out / probes[i].id / "result.json"));
            results.push_back(r);
            summary += probes[i].id + ",ok," + io::format_double(r.dist_estimate) + "," +
                       io::format_double(r.d_partialD_estimate) + ",\n";
        } else {
            code = std::max(code, o.code);
            err << "probe " << probes[i].id << " failed: " << o.message << "\n";
            std::string msg = o.message;
            std::replace(msg.begin(), msg.end(), ',', ';');
            summary += probes[i].id + ",failed,nan,nan," + msg + "\n";
        }
    }
    io::write_text(a.out / "summary.csv", summary);
    manifest.add_output(a.out, "summary.csv");
    if (!results.empty()) {
        t0 = Clock::now();
        const Lattice query = query_lattice(tmpl, a.lattice_h);
        const auto env = enclosure_envelope(results, query);
        io::write_text(a.out / "envelope.json", io::envelope_to_json(env, results, hash, cumulative_volumes(results, query)));
        io::write_occupancy(a.out / "occupancy.bin", env, hash);
        manifest.add_output(a.out, "envelope.json");
        manifest.add_output(a.out, "occupancy.bin");
        manifest.stage_seconds.emplace_back("envelope", seconds_since(t0));
        out << "envelope: " << results.size() << " probes, admissible volume " << io::format_double(env.admissible_volume)
            << "\n";
    }
    finish_manifest(manifest, a.out / "manifest.sweep.json");
    return code;
}

// ---------------------------------------------------------- verify-manifest

int cmd_verify_manifest(const fs::path& path, std::ostream& out, std::ostream& err) {
    std::vector<fs::path> manifests;
    if (fs::is_directory(path)) {
        for (const auto& e : fs::directory_iterator(path)) {
            const auto name = e.path().filename().string();
            if (name.rfind("manifest.", 0) == 0 && e.path().extension() == ".json") manifests.push_back(e.path());
        }
        std::sort(manifests.begin(), manifests.end());
    } else if (fs::exists(path)) {
        manifests.push_back(path);
    }
    if (manifests.empty()) throw ConfigError("no manifest found at " + path.string());
    std::size_t problems = 0;
    for (const auto& m : manifests) {
        const auto found = io::verify_manifest(m);
        for (const auto& p : found) err << m.filename().string() << ": " << p << "\n";
        problems += found.size();
        out << m.filename().string() << ": " << (found.empty() ? "ok" : "FAILED") << "\n";
    }
    return problems ? exit_check_failed : exit_ok;
}

}  // namespace enclosure::cli
