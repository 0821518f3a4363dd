#include <cmath>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "enclosure/errors.hpp"
#include "enclosure/io.hpp"
#include "enclosure/kernels.hpp"
#include "oracles/oracles.hpp"

namespace enclosure::cli {

namespace {

KernelCheck compare(std::string name, double lhs, double rhs, double tolerance) {
    KernelCheck c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.rel_err = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
    c.tolerance = tolerance;
    c.pass = c.rel_err <= tolerance;
    return c;
}

}  // namespace

std::vector<KernelCheck> kernel_checks(const SceneConfig& config, std::optional<double> tolerance) {
    const double eta = config.probe.radius;
    const Vec3 p = config.probe.center;
    const ProbePulse pulse(p, eta);
    const auto wave = oracles::probe_wave(eta);
    const Vec3 dir = Vec3{1.0, 0.3, -0.2} * (1.0 / norm(Vec3{1.0, 0.3, -0.2}));
    const Vec3 n = Vec3{0.0, 0.6, 0.8};
    auto tol = [&](double standard) { return tolerance.value_or(standard); };

    struct Pair {
        double r, tau;
    };
    const Pair pairs[] = {{1.5 * eta, 2.0}, {4.0 * eta, 8.0}, {10.0 * eta, 20.0}};

    std::vector<KernelCheck> out;
    for (int i = 0; i < 3; ++i) {
        const Vec3 x = p + pairs[i].r * dir;
        const double tau = pairs[i].tau;
        out.push_back(compare("ball_weighted_" + std::to_string(i + 1), pulse.ball_potential_weighted(x, tau),
                              oracles::ball_integral(x, p, eta, tau, [](double rho) { return rho; }), tol(1e-8)));
    }
    for (int i = 0; i < 3; ++i) {
        const Vec3 x = p + pairs[i].r * dir;
        const double tau = pairs[i].tau;
        out.push_back(compare("ball_char_" + std::to_string(i + 1), pulse.ball_potential_char(x, tau),
                              oracles::ball_integral(x, p, eta, tau, [](double) { return 1.0; }), tol(1e-8)));
    }

    const Vec3 x2 = p + pairs[1].r * dir;
    const Vec3 x3 = p + pairs[2].r * dir;
    out.push_back(compare("v0_volume_integral", pulse.v0(x2, 8.0), oracles::v0_by_ball(x2, p, eta, 8.0), tol(1e-8)));
    out.push_back(compare("v0_time_laplace", pulse.v0(x3, 20.0), wave.laplace(pairs[2].r, 20.0, pairs[2].r + eta),
                          tol(1e-8)));
    out.push_back(compare("huygens_w0_equals_v0", pulse.w0_truncated(x2, 8.0, pairs[1].r + eta + 0.1),
                          pulse.v0(x2, 8.0), tol(1e-10)));

    const double r = 2.0 * eta;
    const double t = 2.5 * eta;
    out.push_back(compare("v_spherical_mean", pulse.v(r, t), wave.v(r, t), tol(1e-10)));
    out.push_back(compare("dv_dr_difference", pulse.dv_dr(r, t), wave.dv_dr(r, t), tol(1e-6)));
    out.push_back(compare("dv_dt_difference", pulse.dv_dt(r, t), wave.dv_dt(r, t), tol(1e-6)));

    const Vec3 xf = p + 2.0 * eta * dir;
    out.push_back(compare("f_B_normal_derivative", pulse.f_B(xf, n, t),
                          oracles::derivative([&](double s) { return wave.v(distance(xf + s * n, p), t); }, 0.0, 1e-5),
                          tol(1e-6)));
    out.push_back(compare("grad_v0_normal", dot(pulse.grad_v0(x2, 8.0), n),
                          oracles::derivative([&](double s) { return oracles::v0_by_ball(x2 + s * n, p, eta, 8.0); }, 0.0, 1e-4),
                          tol(1e-6)));
    const double T_cut = pairs[1].r;
    out.push_back(compare("dn_w0_truncated", pulse.dn_w0_truncated(x2, n, 8.0, T_cut),
                          oracles::derivative([&](double s) { return wave.laplace(distance(x2 + s * n, p), 8.0, T_cut); }, 0.0, 1e-4),
                          tol(1e-6)));
    return out;
}

int cmd_validate_kernels(const std::filesystem::path& scene, std::optional<double> tolerance,
                         const std::filesystem::path& report, std::ostream& out, std::ostream& err) {
    SceneConfig config = reference_scene();
    if (!scene.empty()) config = io::read_scene(scene);
    ValidatedScene::validate(config);
    if (tolerance && !(*tolerance > 0)) throw ConfigError("tolerance must be positive");

    const auto checks = kernel_checks(config, tolerance);
    std::ostringstream csv;
    csv << "# format: enclosure-kernel-checks/1\n# scene_hash: " << io::scene_hash(config)
        << "\n# columns: check_name,lhs,rhs,rel_err,pass\n";
    std::size_t failed = 0;
    for (const auto& c : checks) {
        csv << c.name << ',' << io::format_double(c.lhs) << ',' << io::format_double(c.rhs) << ','
            << io::format_double(c.rel_err) << ',' << (c.pass ? "true" : "false") << '\n';
        if (!c.pass) ++failed;
    }
    if (report.empty()) {
        out << csv.str();
    } else {
        io::write_text(report, csv.str());
    }
    if (failed) {
        err << failed << " of " << checks.size() << " kernel checks failed\n";
        return exit_check_failed;
    }
    err << "all " << checks.size() << " kernel checks passed\n";
    return exit_ok;
}

}  // namespace enclosure::cli
