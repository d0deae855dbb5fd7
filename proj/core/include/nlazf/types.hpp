#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlazf {

using cxd = std::complex<double>;

/// Thrown when a channel entry required by the 2x2 ratio equations is
/// (numerically) zero, making the instance unsolvable.
class DegenerateChannel : public std::runtime_error {
public:
    explicit DegenerateChannel(const std::string& what) : std::runtime_error(what) {}
};

/// Downlink channel matrix H (K x M), h(k, m) is the gain from BS antenna m
/// to user k. Must have full row rank.
class Channel {
public:
    explicit Channel(Eigen::MatrixXcd entries);

    const Eigen::MatrixXcd& matrix() const { return h_; }
    Eigen::Index users() const { return h_.rows(); }
    Eigen::Index antennas() const { return h_.cols(); }
    cxd operator()(Eigen::Index k, Eigen::Index m) const { return h_(k, m); }

    double frobenius_norm() const { return h_.norm(); }
    /// Ratio of largest to smallest singular value.
    double condition_number() const;

    /// 2x2 column block l (columns 2l and 2l+1). Requires an even antenna count.
    Channel block(Eigen::Index l) const;

private:
    Eigen::MatrixXcd h_;
};

/// Per-user transmit symbol energies E_{s,k}; the per-column power budget of
/// the precoder.
class PowerAllocation {
public:
    explicit PowerAllocation(std::vector<double> per_user);

    /// Equal split of a total budget across K users.
    static PowerAllocation equal_split(double total, int users);

    const std::vector<double>& per_user() const { return energies_; }
    double operator[](std::size_t k) const { return energies_[k]; }
    std::size_t users() const { return energies_.size(); }
    double total() const;

    /// Every per-user energy scaled by the same factor.
    PowerAllocation scaled(double factor) const;

private:
    std::vector<double> energies_;
};

/// Linear precoder W (M x K), stored in polar form. Amplitudes and phases are
/// the source of truth; the complex matrix is materialized on demand. Keeping
/// amplitudes separate makes column phase rotations leave row powers and all
/// quantities derived from them bit-identical.
class Precoder {
public:
    Precoder() = default;
    Precoder(Eigen::MatrixXd amplitudes, Eigen::MatrixXd phases);

    static Precoder from_matrix(const Eigen::MatrixXcd& w);
    static Precoder from_polar(Eigen::MatrixXd amplitudes, Eigen::MatrixXd phases);

    Eigen::Index antennas() const { return amp_.rows(); }
    Eigen::Index users() const { return amp_.cols(); }

    const Eigen::MatrixXd& amplitudes() const { return amp_; }
    const Eigen::MatrixXd& phases() const { return phase_; }

    /// Materialized complex matrix, entry (m, k) = amp * exp(j * phase).
    Eigen::MatrixXcd matrix() const;

    /// ||w_k^col||^2
    double column_power(Eigen::Index k) const;
    /// ||w_m^row||^2, the quantity the Bussgang gain depends on.
    double row_power(Eigen::Index m) const;
    Eigen::VectorXd row_powers() const;

private:
    Eigen::MatrixXd amp_;    // |w_mk| >= 0
    Eigen::MatrixXd phase_;  // arg w_mk
};

namespace detail {
void require(bool condition, const std::string& message);
}

}  // namespace nlazf
