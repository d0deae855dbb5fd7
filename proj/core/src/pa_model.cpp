#include "nlazf/pa_model.hpp"

#include <cmath>

#include "nlazf/rng.hpp"

namespace nlazf {

PACoefficients::PACoefficients(cxd a1, cxd a3) : a1_(a1), a3_(a3) {
    detail::require(a1 != cxd(0.0, 0.0), "PACoefficients: a1 must be nonzero");
}

PAArray::PAArray(std::vector<PACoefficients> coefficients) : coeffs_(std::move(coefficients)) {
    detail::require(!coeffs_.empty(), "PAArray: at least one antenna");
}

PAArray PAArray::uniform(const PACoefficients& c, int antennas) {
    detail::require(antennas >= 1, "PAArray: at least one antenna");
    return PAArray(std::vector<PACoefficients>(antennas, c));
}

Eigen::VectorXcd PAArray::alphas() const {
    Eigen::VectorXcd a(coeffs_.size());
    for (std::size_t m = 0; m < coeffs_.size(); ++m) a(m) = coeffs_[m].alpha();
    return a;
}

Eigen::VectorXcd PAArray::betas() const {
    Eigen::VectorXcd b(coeffs_.size());
    for (std::size_t m = 0; m < coeffs_.size(); ++m) b(m) = coeffs_[m].beta();
    return b;
}

PAArray PAArray::pair(std::size_t l) const {
    detail::require(2 * l + 1 < coeffs_.size(), "PAArray::pair: index out of range");
    return PAArray({coeffs_[2 * l], coeffs_[2 * l + 1]});
}

cxd pa_response(cxd x, const PACoefficients& c) {
    return c.a1() * x + c.a3() * std::norm(x) * x;
}

Eigen::VectorXcd apply_pa(const Eigen::VectorXcd& x, const PAArray& pa) {
    detail::require(static_cast<std::size_t>(x.size()) == pa.size(),
                    "apply_pa: vector length does not match antenna count");
    Eigen::VectorXcd y(x.size());
    for (Eigen::Index m = 0; m < x.size(); ++m) y(m) = pa_response(x(m), pa[m]);
    return y;
}

Eigen::VectorXcd bussgang_row_gains(const Precoder& w, const PAArray& pa) {
    detail::require(static_cast<std::size_t>(w.antennas()) == pa.size(),
                    "bussgang gain: precoder rows do not match antenna count");
    Eigen::VectorXcd g(w.antennas());
    for (Eigen::Index m = 0; m < w.antennas(); ++m)
        g(m) = pa[m].alpha() + pa[m].beta() * w.row_power(m);
    return g;
}

Eigen::MatrixXcd bussgang_gain(const Precoder& w, const PAArray& pa) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(w.antennas(), w.antennas());
    g.diagonal() = bussgang_row_gains(w, pa);
    return g;
}

Eigen::MatrixXcd distortion_covariance(const Precoder& w, const PAArray& pa) {
    detail::require(static_cast<std::size_t>(w.antennas()) == pa.size(),
                    "distortion_covariance: precoder rows do not match antenna count");
    const Eigen::Index m_count = w.antennas();
    const Eigen::MatrixXcd wc = w.matrix();
    const Eigen::MatrixXcd a = wc * wc.adjoint();
    const Eigen::VectorXcd beta = pa.betas();

    Eigen::MatrixXcd c(m_count, m_count);
    for (Eigen::Index n = 0; n < m_count; ++n) {
        for (Eigen::Index m = n; m < m_count; ++m) {
            const cxd entry = 0.5 * beta(m) * std::conj(beta(n)) * std::norm(a(m, n)) * a(m, n);
            c(m, n) = entry;
            c(n, m) = std::conj(entry);
        }
        // the diagonal is a real power; drop the rounding-level imaginary part
        c(n, n) = cxd(c(n, n).real(), 0.0);
    }
    return c;
}

BussgangModel bussgang_model(const Precoder& w, const PAArray& pa) {
    return {bussgang_row_gains(w, pa), distortion_covariance(w, pa)};
}

DistortionSampleStats empirical_distortion_stats(const Precoder& w, const PAArray& pa,
                                                 std::int64_t n_samples, std::uint64_t seed) {
    detail::require(n_samples >= 1, "empirical_distortion_stats: n_samples >= 1");
    detail::require(static_cast<std::size_t>(w.antennas()) == pa.size(),
                    "empirical_distortion_stats: precoder rows do not match antenna count");
    const Eigen::Index m_count = w.antennas();
    const Eigen::Index k_count = w.users();
    const Eigen::MatrixXcd wc = w.matrix();
    const Eigen::VectorXcd gain = bussgang_row_gains(w, pa);

    Rng rng(seed);

    Eigen::MatrixXcd sum_ee = Eigen::MatrixXcd::Zero(m_count, m_count);
    Eigen::MatrixXd sum_ee_sq = Eigen::MatrixXd::Zero(m_count, m_count);
    Eigen::MatrixXcd sum_es = Eigen::MatrixXcd::Zero(m_count, k_count);
    Eigen::MatrixXd sum_es_sq = Eigen::MatrixXd::Zero(m_count, k_count);

    Eigen::VectorXcd s(k_count), x(m_count), eta(m_count);
    for (std::int64_t t = 0; t < n_samples; ++t) {
        for (Eigen::Index k = 0; k < k_count; ++k) s(k) = rng.standard_complex_normal();
        x.noalias() = wc * s;
        for (Eigen::Index m = 0; m < m_count; ++m)
            eta(m) = pa_response(x(m), pa[m]) - gain(m) * x(m);
        for (Eigen::Index n = 0; n < m_count; ++n)
            for (Eigen::Index m = 0; m < m_count; ++m) {
                const cxd z = eta(m) * std::conj(eta(n));
                sum_ee(m, n) += z;
                sum_ee_sq(m, n) += std::norm(z);
            }
        for (Eigen::Index k = 0; k < k_count; ++k)
            for (Eigen::Index m = 0; m < m_count; ++m) {
                const cxd z = eta(m) * std::conj(s(k));
                sum_es(m, k) += z;
                sum_es_sq(m, k) += std::norm(z);
            }
    }

    const double n = static_cast<double>(n_samples);
    DistortionSampleStats stats;
    stats.n_samples = n_samples;
    stats.eta_eta = sum_ee / n;
    stats.eta_s = sum_es / n;
    // total variance (real + imaginary) of the per-sample terms
    stats.eta_eta_se = ((sum_ee_sq / n - stats.eta_eta.cwiseAbs2()).cwiseMax(0.0) / n)
                           .cwiseSqrt();
    stats.eta_s_se = ((sum_es_sq / n - stats.eta_s.cwiseAbs2()).cwiseMax(0.0) / n).cwiseSqrt();
    return stats;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> empirical_distortion_covariance(
    const Precoder& w, const PAArray& pa, std::int64_t n_samples, std::uint64_t seed) {
    DistortionSampleStats stats = empirical_distortion_stats(w, pa, n_samples, seed);
    return {std::move(stats.eta_eta), std::move(stats.eta_s)};
}

}  // namespace nlazf
