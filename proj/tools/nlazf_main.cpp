// Command-line front end: `nlazf sweep` runs a seeded Monte Carlo sweep and
// writes sweep.csv / table.csv / manifest.json; `nlazf solve` solves a single
// explicit instance and prints the precoder and residuals.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error,
// 4 numerical/solver failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nlazf/metrics.hpp"
#include "nlazf/precoder.hpp"
#include "nlazf/report_io.hpp"
#include "nlazf/simulation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitSolver = 4;

struct SweepOptions {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 1;
    bool linear_output = false;
    nlazf::ConfigOverrides overrides;
};

int run_sweep_command(const SweepOptions& options) {
    const nlazf::SimConfig config =
        options.config_path.empty()
            ? nlazf::parse_config_text("{}", options.overrides)
            : nlazf::parse_config(options.config_path, options.overrides);

    const auto start = std::chrono::steady_clock::now();
    const nlazf::SweepResult result = nlazf::run_sweep(config, options.threads);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec) throw nlazf::IoError("cannot create output directory '" + options.out_dir + "'");

    const std::string sweep_path = options.out_dir + "/sweep.csv";
    const std::string table_path = options.out_dir + "/table.csv";
    const std::string manifest_path = options.out_dir + "/manifest.json";

    nlazf::write_text_file(sweep_path, nlazf::sweep_csv_text(result, options.linear_output));
    nlazf::write_text_file(table_path, nlazf::table_csv_text(result));
    nlazf::ManifestInfo info;
    info.sweep_csv_path = sweep_path;
    info.table_csv_path = table_path;
    info.threads = options.threads;
    info.wall_clock_seconds = elapsed;
    nlazf::write_text_file(manifest_path, nlazf::manifest_text(result, info));

    double worst_failure = 0.0;
    for (const nlazf::SweepCell& cell : result.cells)
        worst_failure = std::max(
            worst_failure, static_cast<double>(cell.n_failures) / cell.n_realizations);

    std::cout << "wrote " << sweep_path << ", " << table_path << ", " << manifest_path << "\n";
    if (worst_failure > config.max_failure_fraction) {
        std::cerr << "solver failure fraction " << worst_failure << " exceeds limit "
                  << config.max_failure_fraction << "\n";
        return kExitSolver;
    }
    return kExitOk;
}

struct SolveOptions {
    std::string config_path;
    std::optional<double> tol;
    std::optional<double> eps;
    std::optional<int> algorithm;
    std::optional<int> max_iter;
};

int run_solve_command(const SolveOptions& options) {
    nlazf::SolveSpec spec = nlazf::parse_solve_config(options.config_path);
    if (options.tol) spec.tol = *options.tol;
    if (options.eps) spec.eps = *options.eps;
    if (options.algorithm) spec.algorithm = *options.algorithm;
    if (options.max_iter) spec.max_iter = options.max_iter;
    if (spec.algorithm != 1 && spec.algorithm != 2)
        throw nlazf::ConfigError("algorithm: must be 1 or 2");

    const nlazf::Channel h(spec.channel);
    const nlazf::PAArray pa(spec.pa);
    const nlazf::PowerAllocation power(spec.power);

    nlazf::SolverReport report;
    if (h.antennas() == 2 && spec.algorithm == 1) {
        const double es_min = std::min(power[0], power[1]);
        const double eps = spec.eps.value_or(1e-4 * power.total());
        if (!(eps > 0.0 && eps < es_min))
            throw nlazf::ConfigError("eps: must be positive and below min_k E_sk");
        // the walk may have to transfer most of the budget in eps-sized steps
        const int max_iter =
            spec.max_iter.value_or(static_cast<int>(2.0 * power.total() / eps) + 100);
        report = nlazf::nla_zf_alg1(h, pa, power, spec.tol, eps, max_iter);
    } else if (h.antennas() == 2) {
        report = nlazf::nla_zf_alg2(h, pa, power, spec.tol, spec.max_iter.value_or(100));
    } else {
        report = nlazf::nla_zf_block(h, pa, power, spec.tol, spec.max_iter.value_or(100));
    }

    const Eigen::MatrixXcd w = report.precoder.matrix();
    for (Eigen::Index k = 0; k < w.cols(); ++k) {
        if (k > 0) std::cout << ',';
        std::cout << "w_re_" << k + 1 << ",w_im_" << k + 1;
    }
    std::cout << "\n";
    for (Eigen::Index m = 0; m < w.rows(); ++m) {
        for (Eigen::Index k = 0; k < w.cols(); ++k) {
            if (k > 0) std::cout << ',';
            std::cout << nlazf::format_double(w(m, k).real()) << ','
                      << nlazf::format_double(w(m, k).imag());
        }
        std::cout << "\n";
    }
    std::cout << "iterations=" << report.iterations << "\n";
    std::cout << "r=[" << nlazf::format_double(report.final_ratios(0)) << ","
              << nlazf::format_double(report.final_ratios(1)) << "]\n";
    std::cout << "gamma=[";
    for (Eigen::Index k = 0; k < report.gammas.size(); ++k) {
        if (k > 0) std::cout << ",";
        std::cout << nlazf::format_double(report.gammas(k).real()) << (report.gammas(k).imag() < 0 ? "-" : "+")
                  << nlazf::format_double(std::abs(report.gammas(k).imag())) << "j";
    }
    std::cout << "]\n";

    const Eigen::MatrixXcd hgw = nlazf::effective_channel(h, report.precoder, pa);
    std::cout << "offdiag=[";
    bool first = true;
    for (Eigen::Index k = 0; k < hgw.rows(); ++k)
        for (Eigen::Index i = 0; i < hgw.cols(); ++i) {
            if (k == i) continue;
            if (!first) std::cout << ",";
            std::cout << nlazf::format_double(std::abs(hgw(k, i)));
            first = false;
        }
    std::cout << "]\n";
    std::cout << "converged=" << (report.converged ? "true" : "false") << "\n";
    if (!report.converged) {
        std::cerr << "solver did not converge"
                  << (report.failure_detail.empty() ? "" : " (" + report.failure_detail + ")")
                  << "\n";
        return kExitSolver;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-user MU-MIMO precoding under third-order PA distortion"};
    app.set_version_flag("--version", nlazf::tool_version());
    app.require_subcommand(1);

    SweepOptions sweep;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a Monte Carlo SNR sweep");
    sweep_cmd->add_option("--config", sweep.config_path, "JSON sweep configuration");
    sweep_cmd->add_option("--out", sweep.out_dir, "Output directory");
    sweep_cmd->add_option("--threads", sweep.threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_flag("--linear-output", sweep.linear_output,
                        "Also emit linear-domain metric columns");
    std::uint64_t seed_flag = 0;
    double tol_flag = 0.0;
    int m_flag = 0;
    std::string precoder_flag;
    CLI::Option* seed_opt = sweep_cmd->add_option("--seed", seed_flag, "Master seed");
    CLI::Option* tol_opt = sweep_cmd->add_option("--tol", tol_flag, "Solver tolerance");
    CLI::Option* m_opt = sweep_cmd->add_option("--M", m_flag, "BS antenna count");
    CLI::Option* precoder_opt =
        sweep_cmd->add_option("--precoder", precoder_flag, "zf, nlazf or both");

    SolveOptions solve;
    double solve_tol = 0.0, solve_eps = 0.0;
    int solve_alg = 0, solve_max_iter = 0;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Solve one explicit instance");
    solve_cmd->add_option("--config", solve.config_path, "JSON instance description")
        ->required();
    CLI::Option* stol = solve_cmd->add_option("--tol", solve_tol, "Solver tolerance");
    CLI::Option* seps = solve_cmd->add_option("--eps", solve_eps, "Algorithm 1 step size");
    CLI::Option* salg = solve_cmd->add_option("--algorithm", solve_alg, "1 or 2");
    CLI::Option* smax = solve_cmd->add_option("--max-iter", solve_max_iter, "Iteration limit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (sweep_cmd->parsed()) {
            if (*seed_opt) sweep.overrides.seed = seed_flag;
            if (*tol_opt) sweep.overrides.tol = tol_flag;
            if (*m_opt) sweep.overrides.m = m_flag;
            if (*precoder_opt) sweep.overrides.precoder = precoder_flag;
            return run_sweep_command(sweep);
        }
        if (*stol) solve.tol = solve_tol;
        if (*seps) solve.eps = solve_eps;
        if (*salg) solve.algorithm = solve_alg;
        if (*smax) solve.max_iter = solve_max_iter;
        return run_solve_command(solve);
    } catch (const nlazf::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const nlazf::IoError& err) {
        std::cerr << "io error: " << err.what() << "\n";
        return kExitIo;
    } catch (const nlazf::DegenerateChannel& err) {
        std::cerr << "DegenerateChannel: " << err.what() << "\n";
        return kExitSolver;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitSolver;
    }
}
