#pragma once

#include <cstdint>
#include <vector>

#include "nlazf/types.hpp"

namespace nlazf {

/// Third-order memoryless PA response f(x) = a1*x + a3*|x|^2*x of one
/// transmit chain, together with its Bussgang pair alpha = a1, beta = 2*a3.
class PACoefficients {
public:
    PACoefficients(cxd a1, cxd a3);

    cxd a1() const { return a1_; }
    cxd a3() const { return a3_; }
    cxd alpha() const { return a1_; }
    cxd beta() const { return 2.0 * a3_; }

private:
    cxd a1_;
    cxd a3_;
};

/// One PACoefficients per antenna. Cross-chain coupling is not modeled.
class PAArray {
public:
    explicit PAArray(std::vector<PACoefficients> coefficients);

    /// All antennas share the same response.
    static PAArray uniform(const PACoefficients& c, int antennas);

    std::size_t size() const { return coeffs_.size(); }
    const PACoefficients& operator[](std::size_t m) const { return coeffs_[m]; }
    const std::vector<PACoefficients>& coefficients() const { return coeffs_; }

    Eigen::VectorXcd alphas() const;
    Eigen::VectorXcd betas() const;

    /// Coefficients of antennas 2l and 2l+1.
    PAArray pair(std::size_t l) const;

private:
    std::vector<PACoefficients> coeffs_;
};

/// f_m(x) for a single baseband sample.
cxd pa_response(cxd x, const PACoefficients& c);

/// Component-wise PA response of a length-M input vector.
Eigen::VectorXcd apply_pa(const Eigen::VectorXcd& x, const PAArray& pa);

/// Complex row gains alpha_m + beta_m * ||w_m^row||^2 (the diagonal of G(W)).
Eigen::VectorXcd bussgang_row_gains(const Precoder& w, const PAArray& pa);

/// Bussgang gain matrix G(W): diagonal, entry m = alpha_m + beta_m*||w_m^row||^2.
/// Off-diagonal entries are exactly zero.
Eigen::MatrixXcd bussgang_gain(const Precoder& w, const PAArray& pa);

/// Covariance of the Bussgang distortion term,
///   C = 1/2 * B * [(W W^H) o (W* W^T) o (W W^H)] * B^H,  B = diag(beta).
/// (W* W^T) is the entrywise conjugate of W W^H, so entry (m, n) reduces to
/// 1/2 * beta_m * conj(beta_n) * |A_mn|^2 * A_mn with A = W W^H. Computed over
/// the lower triangle and mirrored, so the result is Hermitian exactly.
Eigen::MatrixXcd distortion_covariance(const Precoder& w, const PAArray& pa);

/// Linear gain matrix and distortion covariance for a given (W, PA) pair.
struct BussgangModel {
    Eigen::VectorXcd gain;        // diagonal of G(W)
    Eigen::MatrixXcd covariance;  // C_eta_eta
};

BussgangModel bussgang_model(const Precoder& w, const PAArray& pa);

/// Sampling estimate of the distortion second-order statistics: draws
/// s ~ CN(0, I), forms x = W s, eta = f(x) - G(W) x, and averages eta*eta^H
/// and eta*s^H. Means come with per-entry standard errors of the estimator.
struct DistortionSampleStats {
    Eigen::MatrixXcd eta_eta;     // mean of eta eta^H  (M x M)
    Eigen::MatrixXd eta_eta_se;   // standard error per entry
    Eigen::MatrixXcd eta_s;       // mean of eta s^H    (M x K)
    Eigen::MatrixXd eta_s_se;     // standard error per entry
    std::int64_t n_samples = 0;
};

DistortionSampleStats empirical_distortion_stats(const Precoder& w, const PAArray& pa,
                                                 std::int64_t n_samples, std::uint64_t seed);

/// Sample averages of eta*eta^H and eta*s^H; deterministic for a fixed seed.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> empirical_distortion_covariance(
    const Precoder& w, const PAArray& pa, std::int64_t n_samples, std::uint64_t seed);

}  // namespace nlazf
