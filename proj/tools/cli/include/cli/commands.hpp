#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "enclosure/scene.hpp"

namespace enclosure::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    exit_ok = 0,
    exit_check_failed = 2,
    exit_input_error = 3,
    exit_runtime_error = 4,
    exit_recovery_failure = 5,
};

/// Parses `args` (without the program name) and runs one subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct KernelCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_err = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Closed-form kernels against quadrature and finite-difference
/// references for the probe of `config`.
std::vector<KernelCheck> kernel_checks(const SceneConfig& config, std::optional<double> tolerance = std::nullopt);

struct ForwardArgs {
    std::filesystem::path scene;
    std::filesystem::path out;
    std::optional<double> T_max;
    std::vector<double> taus;
    std::vector<std::string> record = {"trace", "accumulators", "final"};
    bool no_obstacles = false;
    std::string formulation = "scattered";
};

struct IndicatorArgs {
    std::filesystem::path run;
    std::filesystem::path out;
    std::vector<double> T;
    std::vector<double> M;
    std::string reference = "matched";
    std::string probe_id = "p0";
};

struct RecoverArgs {
    std::vector<std::filesystem::path> curves;
    std::vector<std::filesystem::path> results;
    std::filesystem::path run;
    std::filesystem::path scene;
    std::filesystem::path null_curve;
    std::filesystem::path out;
    std::string mode = "fit";
    std::string variant = "full";
    std::string model = "asymptotic";
    double eps_slope = 0.05;
    std::optional<double> T_max;
    std::optional<double> M;
    std::optional<double> lattice_h;
};

struct SweepArgs {
    std::filesystem::path scene;
    std::filesystem::path probes;
    std::filesystem::path out;
    std::optional<double> T_max;
    std::optional<double> T;
    std::string variant = "full";
    std::string model = "asymptotic";
    std::optional<double> lattice_h;
    std::optional<int> jobs;
    bool keep_traces = false;
};

int cmd_validate_kernels(const std::filesystem::path& scene, std::optional<double> tolerance,
                         const std::filesystem::path& report, std::ostream& out, std::ostream& err);
int cmd_forward(const ForwardArgs& a, std::ostream& out, std::ostream& err);
int cmd_indicator(const IndicatorArgs& a, std::ostream& out, std::ostream& err);
int cmd_recover(const RecoverArgs& a, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err);
int cmd_verify_manifest(const std::filesystem::path& path, std::ostream& out, std::ostream& err);

/// Worker count: ENCLOSURE_THREADS when set to a positive integer, else the
/// hardware concurrency.
int worker_count();

}  // namespace enclosure::cli
