#include "nlazf/precoder.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numbers>

namespace nlazf {

namespace {

void check_2x2(const Channel& h, const PAArray& pa) {
    detail::require(h.users() == 2 && h.antennas() == 2, "solver requires M = K = 2");
    detail::require(pa.size() == 2, "solver requires 2 PA coefficient sets");
}

/// The four channel entries all appear as denominators or numerators of the
/// ratio equations; any of them being numerically zero makes the instance
/// unsolvable.
void check_nondegenerate(const Channel& h) {
    const double floor = 1e-10 * h.frobenius_norm();
    for (Eigen::Index k = 0; k < 2; ++k)
        for (Eigen::Index m = 0; m < 2; ++m)
            if (std::abs(h(k, m)) < floor)
                throw DegenerateChannel("channel entry h(" + std::to_string(k + 1) + "," +
                                        std::to_string(m + 1) + ") is numerically zero");
}

struct RatioParts {
    double numerator;    // |h_num * (a2 + b2*rho2)|
    double denominator;  // |h_den * (a1 + b1*rho1)|
};

/// Channel/gain magnitude parts of equation i, evaluated at squared amplitudes.
RatioParts ratio_parts(const Eigen::MatrixXd& amps_sq, const Channel& h, const PAArray& pa,
                       int i) {
    const double rho1 = amps_sq(0, 0) + amps_sq(0, 1);
    const double rho2 = amps_sq(1, 0) + amps_sq(1, 1);
    const cxd gain1 = pa[0].alpha() + pa[0].beta() * rho1;
    const cxd gain2 = pa[1].alpha() + pa[1].beta() * rho2;
    if (i == 1) return {std::abs(h(1, 1) * gain2), std::abs(h(1, 0) * gain1)};
    return {std::abs(h(0, 1) * gain2), std::abs(h(0, 0) * gain1)};
}

double ratio_from_squares(const Eigen::MatrixXd& amps_sq, const Channel& h, const PAArray& pa,
                          int i) {
    const RatioParts parts = ratio_parts(amps_sq, h, pa, i);
    const int k = i - 1;
    const double num_amp = std::sqrt(amps_sq(1, k));
    const double den_amp = std::sqrt(amps_sq(0, k));
    if (den_amp == 0.0)
        throw DegenerateChannel("ratio_r: denominator amplitude |w(1," + std::to_string(i) +
                                ")| is zero");
    return parts.numerator * num_amp / (parts.denominator * den_amp);
}

Eigen::Vector2d both_ratios(const Eigen::MatrixXd& amps_sq, const Channel& h,
                            const PAArray& pa) {
    return {ratio_from_squares(amps_sq, h, pa, 1), ratio_from_squares(amps_sq, h, pa, 2)};
}

bool in_band(const Eigen::Vector2d& r, double tol) {
    return std::abs(r(0) - 1.0) <= tol && std::abs(r(1) - 1.0) <= tol;
}

Eigen::MatrixXd equal_split_squares(const PowerAllocation& power) {
    Eigen::MatrixXd amps_sq(2, 2);
    amps_sq << power[0] / 2.0, power[1] / 2.0, power[0] / 2.0, power[1] / 2.0;
    return amps_sq;
}

SolverReport finish_2x2(const Eigen::MatrixXd& amps_sq, const Channel& h, const PAArray& pa,
                        const PowerAllocation& power, int iterations, bool converged,
                        SolverFailure failure, std::vector<double> history) {
    SolverReport report;
    report.iterations = iterations;
    report.converged = converged;
    report.failure = failure;
    report.residual_history = std::move(history);
    const Eigen::MatrixXd amps = amps_sq.cwiseSqrt();
    report.final_ratios = both_ratios(amps_sq, h, pa);
    report.precoder = solve_phases(amps, h, pa, power);
    report.gammas = effective_gains(h, report.precoder, pa);
    return report;
}

}  // namespace

Precoder naive_zf(const Channel& h, const PowerAllocation& power, double max_condition) {
    detail::require(static_cast<std::size_t>(h.users()) == power.users(),
                    "naive_zf: power allocation size does not match user count");
    const double cond = h.condition_number();
    if (!(cond < max_condition))
        throw DegenerateChannel("naive_zf: channel condition number " + std::to_string(cond) +
                                " exceeds limit");
    const Eigen::MatrixXcd& hm = h.matrix();
    const Eigen::MatrixXcd gram = hm * hm.adjoint();
    Eigen::MatrixXcd w = hm.adjoint() * gram.inverse();
    for (Eigen::Index k = 0; k < w.cols(); ++k)
        w.col(k) *= std::sqrt(power[k]) / w.col(k).norm();
    return Precoder::from_matrix(w);
}

double ratio_r(const Eigen::MatrixXd& amps, const Channel& h, const PAArray& pa, int i) {
    detail::require(i == 1 || i == 2, "ratio_r: equation index must be 1 or 2");
    detail::require(amps.rows() == 2 && amps.cols() == 2, "ratio_r: amplitudes must be 2x2");
    detail::require((amps.array() >= 0.0).all(), "ratio_r: amplitudes must be non-negative");
    check_2x2(h, pa);
    check_nondegenerate(h);
    return ratio_from_squares(amps.cwiseAbs2(), h, pa, i);
}

double coupling_g(const Eigen::MatrixXd& amps, const Channel& h, const PAArray& pa, int i) {
    detail::require(i == 1 || i == 2, "coupling_g: equation index must be 1 or 2");
    detail::require(amps.rows() == 2 && amps.cols() == 2, "coupling_g: amplitudes must be 2x2");
    check_2x2(h, pa);
    check_nondegenerate(h);
    const RatioParts parts = ratio_parts(amps.cwiseAbs2(), h, pa, i);
    return parts.numerator / parts.denominator;
}

SolverReport nla_zf_alg1(const Channel& h, const PAArray& pa, const PowerAllocation& power,
                         double tol, double eps, int max_iter,
                         const IterationObserver& observer) {
    check_2x2(h, pa);
    check_nondegenerate(h);
    detail::require(power.users() == 2, "nla_zf_alg1: need 2 per-user energies");
    detail::require(tol > 0.0, "nla_zf_alg1: tol must be positive");
    detail::require(eps > 0.0 && eps < std::min(power[0], power[1]),
                    "nla_zf_alg1: eps must be positive and below min_k E_sk");

    Eigen::MatrixXd amps_sq = equal_split_squares(power);
    std::vector<double> history;

    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::Vector2d r = both_ratios(amps_sq, h, pa);
        history.push_back(std::max(std::abs(r(0) - 1.0), std::abs(r(1) - 1.0)));
        if (in_band(r, tol))
            return finish_2x2(amps_sq, h, pa, power, iter, true, SolverFailure::none,
                              std::move(history));
        for (int i = 1; i <= 2; ++i) {
            const int k = i - 1;
            double w1_sq = amps_sq(0, k);
            if (r(k) < 1.0 - tol) {
                // ratio too small: move power into the numerator entry |w_{2k}|
                w1_sq -= eps;
            } else if (r(k) > 1.0 + tol) {
                w1_sq += eps;
            } else {
                continue;  // this equation is already inside the band
            }
            // at w1_sq = 0 or = E_sk one amplitude vanishes and the ratio is undefined
            if (w1_sq <= 0.0 || w1_sq >= power[k])
                return finish_2x2(amps_sq, h, pa, power, iter, false,
                                  SolverFailure::power_clamp, std::move(history));
            amps_sq(0, k) = w1_sq;
            amps_sq(1, k) = power[k] - w1_sq;  // column budget held exactly
        }
        if (observer) observer(iter + 1, amps_sq);
    }
    return finish_2x2(amps_sq, h, pa, power, max_iter, false, SolverFailure::max_iterations,
                      std::move(history));
}

SolverReport nla_zf_alg2(const Channel& h, const PAArray& pa, const PowerAllocation& power,
                         double tol, int max_iter, const IterationObserver& observer) {
    check_2x2(h, pa);
    check_nondegenerate(h);
    detail::require(power.users() == 2, "nla_zf_alg2: need 2 per-user energies");
    detail::require(tol > 0.0, "nla_zf_alg2: tol must be positive");

    Eigen::MatrixXd amps_sq = equal_split_squares(power);
    std::vector<double> history;

    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::Vector2d r = both_ratios(amps_sq, h, pa);
        history.push_back(std::max(std::abs(r(0) - 1.0), std::abs(r(1) - 1.0)));
        if (in_band(r, tol))
            return finish_2x2(amps_sq, h, pa, power, iter, true, SolverFailure::none,
                              std::move(history));
        for (int i = 1; i <= 2; ++i) {
            // column i is solved with g_i frozen at the current amplitudes;
            // for i = 2 these already include the fresh column-1 values
            const RatioParts parts = ratio_parts(amps_sq, h, pa, i);
            const double g = parts.numerator / parts.denominator;
            const int k = i - 1;
            amps_sq(1, k) = power[k] / (1.0 + g * g);
            amps_sq(0, k) = power[k] - amps_sq(1, k);
        }
        if (observer) observer(iter + 1, amps_sq);
    }
    return finish_2x2(amps_sq, h, pa, power, max_iter, false, SolverFailure::max_iterations,
                      std::move(history));
}

Precoder solve_phases(const Eigen::MatrixXd& amps, const Channel& h, const PAArray& pa,
                      const PowerAllocation& power) {
    detail::require(amps.rows() == 2 && amps.cols() == 2, "solve_phases: amplitudes must be 2x2");
    check_2x2(h, pa);
    check_nondegenerate(h);
    detail::require(power.users() == 2, "solve_phases: need 2 per-user energies");
    for (Eigen::Index k = 0; k < 2; ++k)
        detail::require(std::abs(amps.col(k).squaredNorm() - power[k]) <= 1e-10 * power[k],
                        "solve_phases: column power does not match the allocation");

    const double rho1 = amps.row(0).squaredNorm();
    const double rho2 = amps.row(1).squaredNorm();
    const cxd gain1 = pa[0].alpha() + pa[0].beta() * rho1;
    const cxd gain2 = pa[1].alpha() + pa[1].beta() * rho2;

    Eigen::MatrixXd phases = Eigen::MatrixXd::Zero(2, 2);
    phases(0, 0) = std::numbers::pi + std::arg(h(1, 1) * gain2) - std::arg(h(1, 0) * gain1);
    phases(0, 1) = std::numbers::pi + std::arg(h(0, 1) * gain2) - std::arg(h(0, 0) * gain1);
    return Precoder::from_polar(amps, std::move(phases));
}

Precoder rotate_columns(const Precoder& w, const Eigen::VectorXd& phases) {
    detail::require(phases.size() == w.users(), "rotate_columns: one phase per column");
    Eigen::MatrixXd rotated = w.phases();
    rotated.rowwise() += phases.transpose();
    return Precoder::from_polar(w.amplitudes(), std::move(rotated));
}

Eigen::VectorXcd effective_gains(const Channel& h, const Precoder& w, const PAArray& pa) {
    detail::require(h.antennas() == w.antennas() && h.users() == w.users(),
                    "effective_gains: dimension mismatch");
    const Eigen::VectorXcd gains = bussgang_row_gains(w, pa);
    const Eigen::MatrixXcd hgw = h.matrix() * gains.asDiagonal() * w.matrix();
    return hgw.diagonal();
}

SolverReport nla_zf_block(const Channel& h, const PAArray& pa, const PowerAllocation& power,
                          double tol, int max_iter) {
    detail::require(h.users() == 2, "nla_zf_block: K = 2 required");
    detail::require(h.antennas() % 2 == 0, "nla_zf_block: antenna count must be even");
    detail::require(static_cast<std::size_t>(h.antennas()) == pa.size(),
                    "nla_zf_block: PA array size does not match antenna count");
    detail::require(power.users() == 2, "nla_zf_block: need 2 per-user energies");

    const Eigen::Index l_count = h.antennas() / 2;
    const PowerAllocation block_power = power.scaled(1.0 / static_cast<double>(l_count));

    Eigen::MatrixXd amp(h.antennas(), 2);
    Eigen::MatrixXd phase(h.antennas(), 2);

    SolverReport report;
    report.converged = true;
    report.final_ratios = Eigen::Vector2d::Ones();
    report.gammas = Eigen::VectorXcd::Zero(2);

    for (Eigen::Index l = 0; l < l_count; ++l) {
        const Channel hl = h.block(l);
        const PAArray pal = pa.pair(static_cast<std::size_t>(l));

        SolverReport block;
        try {
            block = nla_zf_alg2(hl, pal, block_power, tol, max_iter);
        } catch (const DegenerateChannel& err) {
            throw DegenerateChannel("block " + std::to_string(l) + ": " + err.what());
        }
        if (!block.converged && report.failure == SolverFailure::none) {
            report.failure = block.failure;
            report.failure_detail = "block " + std::to_string(l);
        }
        report.converged = report.converged && block.converged;
        report.iterations = std::max(report.iterations, block.iterations);

        // align the block so its gains are real positive (phase shifts leave
        // the block's G and ratios untouched)
        Eigen::VectorXd align(2);
        align << -std::arg(block.gammas(0)), -std::arg(block.gammas(1));
        const Precoder aligned = rotate_columns(block.precoder, align);

        amp.middleRows(2 * l, 2) = aligned.amplitudes();
        phase.middleRows(2 * l, 2) = aligned.phases();

        for (int i = 0; i < 2; ++i)
            if (std::abs(block.final_ratios(i) - 1.0) > std::abs(report.final_ratios(i) - 1.0))
                report.final_ratios(i) = block.final_ratios(i);
    }

    report.precoder = Precoder::from_polar(std::move(amp), std::move(phase));
    report.gammas = effective_gains(h, report.precoder, pa);
    return report;
}

}  // namespace nlazf
