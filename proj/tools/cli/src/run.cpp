#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "enclosure/errors.hpp"

namespace enclosure::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Single-measurement enclosure method: forward solves, indicator curves and distance recovery.",
                 "enclosure"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::filesystem::path vk_scene, vk_report;
    std::optional<double> vk_tol;
    auto* vk = app.add_subcommand("validate-kernels", "Check closed-form kernels against quadrature references");
    vk->add_option("--scene", vk_scene, "Scene JSON (default: reference scene)");
    vk->add_option("--tolerance", vk_tol, "Override every check's relative tolerance");
    vk->add_option("--report", vk_report, "Write the CSV report here instead of stdout");

    ForwardArgs fw;
    auto* fwc = app.add_subcommand("forward", "Solve the forward problem and record the boundary trace");
    fwc->add_option("--scene", fw.scene, "Scene JSON")->required();
    fwc->add_option("--out", fw.out, "Output directory")->required();
    fwc->add_option("--Tmax", fw.T_max, "Final time (default: scene T)");
    fwc->add_option("--taus", fw.taus, "Accumulator taus (default: scene grid)")->delimiter(',');
    fwc->add_option("--record", fw.record, "Subset of trace,accumulators,volume,final")->delimiter(',');
    fwc->add_flag("--no-obstacles", fw.no_obstacles, "Drop the obstacles (null run)");
    fwc->add_option("--formulation", fw.formulation, "scattered or total")->check(CLI::IsMember({"scattered", "total"}));

    IndicatorArgs ind;
    auto* indc = app.add_subcommand("indicator", "Assemble indicator curves from a forward run");
    indc->add_option("--run", ind.run, "Forward output directory")->required();
    indc->add_option("--out", ind.out, "Output directory (default: the run directory)");
    indc->add_option("--T", ind.T, "Truncation times (default: scene T)")->delimiter(',');
    indc->add_option("--M", ind.M, "Localization radii")->delimiter(',');
    indc->add_option("--reference", ind.reference, "matched or exact")->check(CLI::IsMember({"matched", "exact"}));
    indc->add_option("--probe-id", ind.probe_id, "Probe label stored in the curve");

    RecoverArgs rec;
    auto* recc = app.add_subcommand("recover", "Distance, dichotomy, sup-T or envelope from indicator curves");
    recc->add_option("--mode", rec.mode, "fit, dichotomy, supT or envelope")
        ->check(CLI::IsMember({"fit", "dichotomy", "supT", "envelope"}));
    recc->add_option("--curves", rec.curves, "Curve CSV files");
    recc->add_option("--results", rec.results, "Probe result JSON files (envelope)");
    recc->add_option("--run", rec.run, "Forward output directory (supT)");
    recc->add_option("--scene", rec.scene, "Scene JSON giving the query box (envelope)");
    recc->add_option("--null", rec.null_curve, "Curve of a run without obstacles, for the fit floor");
    recc->add_option("--out", rec.out, "Output directory")->required();
    recc->add_option("--variant", rec.variant, "full, simple or localized")
        ->check(CLI::IsMember({"full", "simple", "localized"}));
    recc->add_option("--model", rec.model, "asymptotic, exponential or power_exponential")
        ->check(CLI::IsMember({"asymptotic", "exponential", "power_exponential"}));
    recc->add_option("--eps", rec.eps_slope, "Dichotomy slope threshold");
    recc->add_option("--Tmax", rec.T_max, "Upper end of the sup-T bisection");
    recc->add_option("--M", rec.M, "Localization radius (supT with the localized variant)");
    recc->add_option("--lattice-h", rec.lattice_h, "Query lattice spacing (default: scene h)");

    SweepArgs sw;
    auto* swc = app.add_subcommand("sweep", "Forward, indicator and fit for every probe, merged into an envelope");
    swc->add_option("--scene", sw.scene, "Scene template JSON")->required();
    swc->add_option("--probes", sw.probes, "Probe list JSON")->required();
    swc->add_option("--out", sw.out, "Output directory")->required();
    swc->add_option("--Tmax", sw.T_max, "Final time of each solve (default: scene T)");
    swc->add_option("--T", sw.T, "Truncation time of the curves (default: scene T)");
    swc->add_option("--variant", sw.variant, "full, simple or localized")
        ->check(CLI::IsMember({"full", "simple", "localized"}));
    swc->add_option("--model", sw.model, "asymptotic, exponential or power_exponential")
        ->check(CLI::IsMember({"asymptotic", "exponential", "power_exponential"}));
    swc->add_option("--lattice-h", sw.lattice_h, "Query lattice spacing (default: scene h)");
    swc->add_option("--jobs", sw.jobs, "Concurrent probes (default: ENCLOSURE_THREADS or hardware threads)")
        ->check(CLI::PositiveNumber);
    swc->add_flag("--keep-traces", sw.keep_traces, "Also write each probe's trace");

    std::filesystem::path vm_path;
    auto* vm = app.add_subcommand("verify-manifest", "Check that every file a manifest lists is intact");
    vm->add_option("path", vm_path, "Manifest file or directory of manifest.*.json")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_input_error;
    }

    try {
        if (vk->parsed()) return cmd_validate_kernels(vk_scene, vk_tol, vk_report, out, err);
        if (fwc->parsed()) return cmd_forward(fw, out, err);
        if (indc->parsed()) return cmd_indicator(ind, out, err);
        if (recc->parsed()) return cmd_recover(rec, out, err);
        if (swc->parsed()) return cmd_sweep(sw, out, err);
        if (vm->parsed()) return cmd_verify_manifest(vm_path, out, err);
    } catch (const NoWindow& e) {
        err << "recovery failed: " << e.what() << "\n";
        return exit_recovery_failure;
    } catch (const ConfigError& e) {
        err << "input error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const FormatError& e) {
        err << "input error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const OverlapError& e) {
        err << "input error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const StabilityError& e) {
        err << "input error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const EmptyTauGrid& e) {
        err << "input error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime_error;
    }
    return exit_input_error;
}

}  // namespace enclosure::cli
