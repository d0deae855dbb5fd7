#include "nlazf/metrics.hpp"

#include <cmath>

#include "nlazf/precoder.hpp"
#include "nlazf/rng.hpp"

namespace nlazf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Eigen::MatrixXcd effective_channel(const Channel& h, const Precoder& w, const PAArray& pa) {
    detail::require(h.antennas() == w.antennas(), "effective_channel: dimension mismatch");
    const Eigen::VectorXcd gains = bussgang_row_gains(w, pa);
    return h.matrix() * gains.asDiagonal() * w.matrix();
}

std::vector<SindrTerms> sindr_terms(const Channel& h, const Precoder& w, const PAArray& pa) {
    const Eigen::MatrixXcd hgw = effective_channel(h, w, pa);
    const Eigen::MatrixXcd cov = distortion_covariance(w, pa);
    const Eigen::MatrixXcd& hm = h.matrix();

    std::vector<SindrTerms> terms(h.users());
    for (Eigen::Index k = 0; k < h.users(); ++k) {
        SindrTerms& t = terms[k];
        t.signal = std::norm(hgw(k, k));
        for (Eigen::Index i = 0; i < h.users(); ++i)
            if (i != k) t.interference += std::norm(hgw(k, i));
        // Hermitian quadratic form h_k^T C h_k^*; real up to rounding
        const cxd q = (hm.row(k) * cov * hm.row(k).adjoint())(0, 0);
        if (std::abs(q.imag()) > 1e-12 * std::abs(q.real()) + 1e-30)
            throw std::logic_error("sindr_terms: distortion quadratic form is not real");
        t.distortion = std::max(q.real(), 0.0);
    }
    return terms;
}

MetricsReport sindr_per_user(const Channel& h, const Precoder& w, const PAArray& pa, double n0) {
    detail::require(n0 >= 0.0, "sindr_per_user: N0 must be non-negative");
    const std::vector<SindrTerms> terms = sindr_terms(h, w, pa);
    const Eigen::Index users = h.users();

    MetricsReport report;
    report.sindr.resize(users);
    report.sir.resize(users);
    report.sdr.resize(users);
    report.gains = effective_gains(h, w, pa);
    report.noise_power = n0;
    report.degenerate.assign(users, false);

    for (Eigen::Index k = 0; k < users; ++k) {
        const SindrTerms& t = terms[k];
        const double denom = t.interference + t.distortion + n0;
        if (denom == 0.0) {
            report.sindr(k) = t.signal == 0.0 ? 0.0 : kInf;
            report.degenerate[k] = t.signal == 0.0;
        } else {
            report.sindr(k) = t.signal / denom;
        }
        report.sir(k) = t.interference == 0.0 ? kInf : t.signal / t.interference;
        report.sdr(k) = t.distortion == 0.0 ? kInf : t.signal / t.distortion;
    }
    return report;
}

Eigen::VectorXd empirical_sindr(const Channel& h, const Precoder& w, const PAArray& pa,
                                double n0, std::int64_t n_samples, std::uint64_t seed,
                                double cap_linear) {
    detail::require(n_samples >= 1, "empirical_sindr: n_samples >= 1");
    detail::require(n0 >= 0.0, "empirical_sindr: N0 must be non-negative");
    const Eigen::Index users = h.users();
    const Eigen::Index antennas = h.antennas();
    detail::require(antennas == w.antennas(), "empirical_sindr: dimension mismatch");

    const Eigen::MatrixXcd wc = w.matrix();
    const Eigen::MatrixXcd& hm = h.matrix();
    const double noise_scale = std::sqrt(n0);

    Rng rng(seed);
    Eigen::VectorXcd s(users), x(antennas), fx(antennas), y(users);
    Eigen::VectorXcd corr = Eigen::VectorXcd::Zero(users);
    Eigen::VectorXd y_power = Eigen::VectorXd::Zero(users);
    Eigen::VectorXd s_power = Eigen::VectorXd::Zero(users);

    for (std::int64_t t = 0; t < n_samples; ++t) {
        for (Eigen::Index k = 0; k < users; ++k) s(k) = rng.standard_complex_normal();
        x.noalias() = wc * s;
        for (Eigen::Index m = 0; m < antennas; ++m) fx(m) = pa_response(x(m), pa[m]);
        y.noalias() = hm * fx;
        for (Eigen::Index k = 0; k < users; ++k) y(k) += noise_scale * rng.standard_complex_normal();
        for (Eigen::Index k = 0; k < users; ++k) {
            corr(k) += y(k) * std::conj(s(k));
            y_power(k) += std::norm(y(k));
            s_power(k) += std::norm(s(k));
        }
    }

    // least-squares projection of y_k onto s_k: the signal power is the
    // projection's power, everything orthogonal is interference + distortion
    // + noise
    const double n = static_cast<double>(n_samples);
    Eigen::VectorXd sindr(users);
    for (Eigen::Index k = 0; k < users; ++k) {
        const cxd c_hat = corr(k) / s_power(k);
        const double signal = std::norm(c_hat) * s_power(k) / n;
        const double residual = y_power(k) / n - signal;
        if (residual <= 0.0 || signal / residual > cap_linear)
            sindr(k) = cap_linear;
        else
            sindr(k) = signal / residual;
    }
    return sindr;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace nlazf
