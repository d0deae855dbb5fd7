#pragma once

#include <functional>
#include <optional>
#include <string>

#include "nlazf/pa_model.hpp"
#include "nlazf/types.hpp"

namespace nlazf {

/// Naive zero-forcing baseline: right pseudoinverse of H with each column
/// rescaled to its energy budget. Unaware of the PA responses.
/// Throws if H is rank deficient or its condition number exceeds `max_condition`.
Precoder naive_zf(const Channel& h, const PowerAllocation& power,
                  double max_condition = 1e12);

/// Interference ratio r_i of the 2x2 uni-modulus system, i in {1, 2}:
///   r_1 = |h22*(a2 + b2*rho2)| * |w21| / (|h21*(a1 + b1*rho1)| * |w11|)
///   r_2 = |h12*(a2 + b2*rho2)| * |w22| / (|h11*(a1 + b1*rho1)| * |w12|)
/// with rho_m the squared norm of row m of W. `amps` is the 2x2 matrix of
/// entry amplitudes |w_mk|. Throws DegenerateChannel when a channel entry used
/// by the equations is numerically zero, or when a denominator amplitude is zero.
double ratio_r(const Eigen::MatrixXd& amps, const Channel& h, const PAArray& pa, int i);

/// Amplitude-free coupling ratio g_i = r_i * |w_{1i}| / |w_{2i}|, i.e. the
/// channel/gain magnitude ratio of equation i. Depends on the amplitudes only
/// through the row powers rho_m.
double coupling_g(const Eigen::MatrixXd& amps, const Channel& h, const PAArray& pa, int i);

/// Why a solve stopped without reaching the tolerance band.
enum class SolverFailure { none, max_iterations, power_clamp };

/// Outcome of an NLA-ZF solve. `final_ratios` are re-evaluated from the
/// returned amplitudes; `converged` implies both lie in [1 - tol, 1 + tol].
struct SolverReport {
    Precoder precoder;
    int iterations = 0;
    Eigen::Vector2d final_ratios = Eigen::Vector2d::Zero();
    bool converged = false;
    Eigen::VectorXcd gammas;             // diagonal of H * G(W) * W
    SolverFailure failure = SolverFailure::none;
    std::string failure_detail;          // e.g. the failing block index
    std::vector<double> residual_history;  // max_i |r_i - 1| per iteration
};

/// Observer invoked after every iteration with the current squared-amplitude
/// matrix; used by tests to check invariants on intermediate iterates.
using IterationObserver = std::function<void(int iteration, const Eigen::MatrixXd& amps_sq)>;

/// NLA-ZF for M = K = 2 by eps-sized power transfers within each column:
/// whenever r_i is outside [1 - tol, 1 + tol], power eps moves between the two
/// entries of column i in the direction that pushes r_i towards 1 (the
/// numerator amplitude scales cubically in one entry, the denominator in the
/// other). Column powers are preserved exactly at every step.
SolverReport nla_zf_alg1(const Channel& h, const PAArray& pa, const PowerAllocation& power,
                         double tol, double eps, int max_iter,
                         const IterationObserver& observer = {});

/// NLA-ZF for M = K = 2 by fixed-point iteration: with g_i frozen at the
/// current amplitudes, each column is solved in closed form,
///   |w_{2k}|^2 = E_{s,k} / (1 + g_i^2),  |w_{1k}|^2 = E_{s,k} - |w_{2k}|^2,
/// column 1 first, then column 2 with g_2 evaluated at the fresh column-1
/// values. Stops when both r_i lie in [1 - tol, 1 + tol].
SolverReport nla_zf_alg2(const Channel& h, const PAArray& pa, const PowerAllocation& power,
                         double tol, int max_iter, const IterationObserver& observer = {});

/// Explicit phase assignment for solved amplitudes: reference phases
/// phi_21 = phi_22 = 0 and
///   phi_11 = pi + arg(h22*(a2 + b2*rho2)) - arg(h21*(a1 + b1*rho1))
///   phi_12 = pi + arg(h12*(a2 + b2*rho2)) - arg(h11*(a1 + b1*rho1))
/// so that both interference equations hold with the given amplitude ratios.
Precoder solve_phases(const Eigen::MatrixXd& amps, const Channel& h, const PAArray& pa,
                      const PowerAllocation& power);

/// W * diag(exp(j*phi_1), ..., exp(j*phi_K)). Column norms, row powers and
/// hence G(W) are untouched (amplitudes are not recomputed).
Precoder rotate_columns(const Precoder& w, const Eigen::VectorXd& phases);

/// Diagonal of H * G(W) * W: the per-user effective channel gains gamma_k.
Eigen::VectorXcd effective_gains(const Channel& h, const Precoder& w, const PAArray& pa);

/// NLA-ZF for K = 2 and even M = 2L: the channel splits into L independent
/// 2x2 column blocks, each solved by nla_zf_alg2 on the per-block budget
/// E_{s,k}/L, then rotated so its block gains gamma_{k,l} are real positive
/// and all L blocks combine in phase.
SolverReport nla_zf_block(const Channel& h, const PAArray& pa, const PowerAllocation& power,
                          double tol, int max_iter);

}  // namespace nlazf
