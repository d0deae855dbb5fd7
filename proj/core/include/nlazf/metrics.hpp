#pragma once

#include <cstdint>
#include <limits>

#include "nlazf/pa_model.hpp"
#include "nlazf/types.hpp"

namespace nlazf {

/// H * G(W) * W; the off-diagonal entries are the residual inter-user
/// interference gains, the diagonal the effective per-user gains.
Eigen::MatrixXcd effective_channel(const Channel& h, const Precoder& w, const PAArray& pa);

/// Per-user powers of the three SINDR denominator contributions.
struct SindrTerms {
    double signal = 0.0;        // |h_k^T G w_k|^2
    double interference = 0.0;  // sum_{i != k} |h_k^T G w_i|^2
    double distortion = 0.0;    // h_k^T C_eta_eta h_k^*
};

std::vector<SindrTerms> sindr_terms(const Channel& h, const Precoder& w, const PAArray& pa);

/// Per-user link quality. Ratios are linear; SIR/SDR are +infinity when the
/// corresponding denominator is exactly zero. A user with zero signal and
/// zero denominator reports 0 and is flagged degenerate.
struct MetricsReport {
    Eigen::VectorXd sindr;
    Eigen::VectorXd sir;
    Eigen::VectorXd sdr;
    Eigen::VectorXcd gains;
    double noise_power = 0.0;
    std::vector<bool> degenerate;
};

MetricsReport sindr_per_user(const Channel& h, const Precoder& w, const PAArray& pa, double n0);

/// End-to-end sampling estimate of the per-user SINDR: simulates
/// y = H f(W s) + n and correlates each y_k against s_k. Estimates that
/// exceed `cap_linear` (or whose residual power is non-positive) report the
/// cap. Deterministic for a fixed seed.
Eigen::VectorXd empirical_sindr(const Channel& h, const Precoder& w, const PAArray& pa,
                                double n0, std::int64_t n_samples, std::uint64_t seed,
                                double cap_linear = 1e30);

/// 10*log10(x); -infinity for x = 0.
double to_db(double linear);

}  // namespace nlazf
