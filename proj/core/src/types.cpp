#include "nlazf/types.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numeric>

namespace nlazf {

namespace detail {
void require(bool condition, const std::string& message) {
    if (!condition) throw std::invalid_argument(message);
}
}  // namespace detail

Channel::Channel(Eigen::MatrixXcd entries) : h_(std::move(entries)) {
    detail::require(h_.rows() >= 1 && h_.cols() >= h_.rows(),
                    "Channel: need K >= 1 and M >= K");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h_);
    const auto& sv = svd.singularValues();
    const double tiny = sv(0) * h_.rows() * std::numeric_limits<double>::epsilon();
    detail::require(sv(sv.size() - 1) > tiny, "Channel: matrix is rank deficient");
}

double Channel::condition_number() const {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h_);
    const auto& sv = svd.singularValues();
    return sv(0) / sv(sv.size() - 1);
}

Channel Channel::block(Eigen::Index l) const {
    detail::require(antennas() % 2 == 0, "Channel::block: antenna count must be even");
    detail::require(l >= 0 && 2 * l + 1 < antennas(), "Channel::block: block index out of range");
    return Channel(h_.block(0, 2 * l, users(), 2));
}

PowerAllocation::PowerAllocation(std::vector<double> per_user) : energies_(std::move(per_user)) {
    detail::require(!energies_.empty(), "PowerAllocation: at least one user");
    for (double e : energies_)
        detail::require(e > 0.0 && std::isfinite(e), "PowerAllocation: energies must be positive");
}

PowerAllocation PowerAllocation::equal_split(double total, int users) {
    detail::require(users >= 1, "PowerAllocation: at least one user");
    return PowerAllocation(std::vector<double>(users, total / users));
}

double PowerAllocation::total() const {
    return std::accumulate(energies_.begin(), energies_.end(), 0.0);
}

PowerAllocation PowerAllocation::scaled(double factor) const {
    std::vector<double> out(energies_);
    for (double& e : out) e *= factor;
    return PowerAllocation(std::move(out));
}

Precoder::Precoder(Eigen::MatrixXd amplitudes, Eigen::MatrixXd phases)
    : amp_(std::move(amplitudes)), phase_(std::move(phases)) {
    detail::require(amp_.rows() == phase_.rows() && amp_.cols() == phase_.cols(),
                    "Precoder: amplitude/phase shape mismatch");
    detail::require((amp_.array() >= 0.0).all(), "Precoder: amplitudes must be non-negative");
}

Precoder Precoder::from_matrix(const Eigen::MatrixXcd& w) {
    return Precoder(w.cwiseAbs(), w.array().arg().matrix());
}

Precoder Precoder::from_polar(Eigen::MatrixXd amplitudes, Eigen::MatrixXd phases) {
    return Precoder(std::move(amplitudes), std::move(phases));
}

Eigen::MatrixXcd Precoder::matrix() const {
    Eigen::MatrixXcd w(amp_.rows(), amp_.cols());
    for (Eigen::Index k = 0; k < amp_.cols(); ++k)
        for (Eigen::Index m = 0; m < amp_.rows(); ++m)
            w(m, k) = std::polar(amp_(m, k), phase_(m, k));
    return w;
}

double Precoder::column_power(Eigen::Index k) const { return amp_.col(k).squaredNorm(); }

double Precoder::row_power(Eigen::Index m) const { return amp_.row(m).squaredNorm(); }

Eigen::VectorXd Precoder::row_powers() const { return amp_.rowwise().squaredNorm(); }

}  // namespace nlazf
