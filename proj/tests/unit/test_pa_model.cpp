#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "nlazf/pa_model.hpp"
#include "test_instances.hpp"

using namespace nlazf;
using nlazf::testing::random_precoder;

TEST_CASE("pa_response third-order polynomial") {
    CHECK(pa_response({1.0, 0.0}, {{1.0, 0.0}, {0.0, 0.0}}) == cxd(1.0, 0.0));
    CHECK(pa_response({0.0, 0.0}, {{2.0, 0.5}, {-0.3, 0.1}}) == cxd(0.0, 0.0));
    // a1*x + a3*|x|^2*x = 2 - 0.1*4*2
    CHECK(pa_response({2.0, 0.0}, {{1.0, 0.0}, {-0.1, 0.0}}) == cxd(1.2, 0.0));
}

TEST_CASE("PACoefficients rejects dead PA and derives alpha/beta") {
    CHECK_THROWS_AS(PACoefficients({0.0, 0.0}, {1.0, 0.0}), std::invalid_argument);
    const PACoefficients c({0.4, -0.2}, {-0.05, 0.01});
    CHECK(c.alpha() == c.a1());
    CHECK(c.beta() == 2.0 * c.a3());
}

TEST_CASE("apply_pa is component-wise") {
    const PAArray pa({{{1.0, 0.0}, {-0.1, 0.0}}, {{1.0, 0.0}, {-0.1, 0.0}}});
    Eigen::VectorXcd x(2);
    x << cxd(1.0, 0.0), cxd(2.0, 0.0);
    const Eigen::VectorXcd y = apply_pa(x, pa);
    CHECK(y(0) == cxd(0.9, 0.0));
    CHECK(y(1) == cxd(1.2, 0.0));

    CHECK(apply_pa(Eigen::VectorXcd::Zero(2), pa).isZero(0.0));

    const PAArray linear({{{1.0, 0.0}, {0.0, 0.0}}, {{1.0, 0.0}, {0.0, 0.0}}});
    Eigen::VectorXcd z(2);
    z << cxd(0.3, -0.7), cxd(-1.1, 0.2);
    CHECK(apply_pa(z, linear) == z);

    CHECK_THROWS_AS(apply_pa(Eigen::VectorXcd::Zero(3), pa), std::invalid_argument);
}

TEST_CASE("bussgang_gain diagonal entries") {
    const PowerAllocation power = PowerAllocation::equal_split(1.0, 2);

    SUBCASE("linear limit: beta = 0 gives diag(alpha) exactly") {
        const PAArray pa({{{0.7, 0.1}, {0.0, 0.0}}, {{1.3, -0.4}, {0.0, 0.0}}});
        const Precoder w = random_precoder(3, 2, 2, power);
        const Eigen::MatrixXcd g = bussgang_gain(w, pa);
        CHECK(g(0, 0) == cxd(0.7, 0.1));
        CHECK(g(1, 1) == cxd(1.3, -0.4));
        CHECK(g(0, 1) == cxd(0.0, 0.0));
        CHECK(g(1, 0) == cxd(0.0, 0.0));
    }

    SUBCASE("zero precoder gives diag(alpha)") {
        const PAArray pa = PAArray::uniform({{0.9, 0.2}, {-0.1, 0.05}}, 2);
        const Precoder w(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2));
        const Eigen::MatrixXcd g = bussgang_gain(w, pa);
        CHECK(g(0, 0) == cxd(0.9, 0.2));
        CHECK(g(1, 1) == cxd(0.9, 0.2));
    }

    SUBCASE("scalar case alpha + beta*|w|^2") {
        // alpha = 1, beta = -0.2 (a3 = -0.1), |w|^2 = 2
        const PAArray pa = PAArray::uniform({{1.0, 0.0}, {-0.1, 0.0}}, 1);
        Eigen::MatrixXd amp(1, 1), phase(1, 1);
        amp << std::sqrt(2.0);
        phase << 0.0;
        const Eigen::MatrixXcd g = bussgang_gain(Precoder(amp, phase), pa);
        CHECK(g(0, 0).real() == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(g(0, 0).imag() == 0.0);
    }

    SUBCASE("dimension mismatch") {
        const PAArray pa = PAArray::uniform({{1.0, 0.0}, {0.0, 0.0}}, 3);
        const Precoder w = random_precoder(3, 2, 2, power);
        CHECK_THROWS_AS(bussgang_gain(w, pa), std::invalid_argument);
    }
}

TEST_CASE("bussgang_gain scale behavior in the row power") {
    const PowerAllocation power = PowerAllocation::equal_split(1.0, 2);
    const Precoder w = random_precoder(5, 2, 2, power);
    const PAArray pa = PAArray::uniform(nlazf::testing::default_pa(), 2);
    const double c = 1.7;
    const Precoder scaled(c * w.amplitudes(), w.phases());
    const Eigen::MatrixXcd g = bussgang_gain(w, pa);
    const Eigen::MatrixXcd gs = bussgang_gain(scaled, pa);
    for (int m = 0; m < 2; ++m) {
        const cxd expected = pa[m].alpha() + c * c * pa[m].beta() * w.row_power(m);
        CHECK(std::abs(gs(m, m) - expected) <= 1e-14 * std::abs(expected));
        CHECK(std::abs(g(m, m) - (pa[m].alpha() + pa[m].beta() * w.row_power(m))) == 0.0);
    }
}

TEST_CASE("distortion_covariance closed form") {
    SUBCASE("beta = 0 gives the zero matrix exactly") {
        const PAArray pa({{{1.0, 0.0}, {0.0, 0.0}}, {{0.8, 0.3}, {0.0, 0.0}}});
        const Precoder w = random_precoder(11, 2, 2, PowerAllocation::equal_split(1.0, 2));
        CHECK(distortion_covariance(w, pa).isZero(0.0));
    }

    SUBCASE("scalar case (1/2)|beta|^2 p^3") {
        const cxd a3(-0.07, 0.02);
        const PAArray pa = PAArray::uniform({{1.0, 0.0}, a3}, 1);
        const double p = 1.3;
        Eigen::MatrixXd amp(1, 1), phase(1, 1);
        amp << std::sqrt(p);
        phase << 0.4;
        const Eigen::MatrixXcd c = distortion_covariance(Precoder(amp, phase), pa);
        const double expected = 0.5 * std::norm(2.0 * a3) * p * p * p;
        CHECK(c(0, 0).real() == doctest::Approx(expected).epsilon(1e-12));
        CHECK(c(0, 0).imag() == 0.0);
    }

    SUBCASE("Hermitian exactly and PSD on random inputs") {
        for (std::uint64_t seed = 1; seed <= 8; ++seed) {
            const int antennas = seed % 2 == 0 ? 2 : 4;
            const Precoder w =
                random_precoder(seed, antennas, 2, PowerAllocation::equal_split(1.0, 2));
            Rng rng(seed * 97);
            const PAArray pa = perturb_pa(nlazf::testing::default_pa(), 0.1, antennas, rng);
            const Eigen::MatrixXcd c = distortion_covariance(w, pa);
            CHECK((c - c.adjoint()).norm() == 0.0);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(c);
            CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * c.trace().real());
        }
    }
}

TEST_CASE("sampling oracle agrees with the closed form") {
    // weak coupling, |beta|*E_s <= 0.3*|alpha|
    const Precoder w = random_precoder(21, 2, 2, PowerAllocation::equal_split(1.0, 2));
    Rng rng(22);
    const PAArray pa = perturb_pa({cxd(1.0, 0.0), cxd(-0.1, 0.03)}, 0.1, 2, rng);
    const auto stats = empirical_distortion_stats(w, pa, 200000, 4242);
    const Eigen::MatrixXcd analytic = distortion_covariance(w, pa);

    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n) {
            CHECK(std::abs(stats.eta_eta(m, n) - analytic(m, n)) <=
                  5.0 * stats.eta_eta_se(m, n));
            // eta and s are uncorrelated
            CHECK(std::abs(stats.eta_s(m, n)) <= 5.0 * stats.eta_s_se(m, n));
        }
}

TEST_CASE("sampling oracle determinism and linear limit") {
    const Precoder w = random_precoder(31, 2, 2, PowerAllocation::equal_split(1.0, 2));
    const PAArray linear({{{1.0, 0.0}, {0.0, 0.0}}, {{0.9, 0.1}, {0.0, 0.0}}});
    const auto [ee, es] = empirical_distortion_covariance(w, linear, 1000, 5);
    CHECK(ee.isZero(0.0));
    CHECK(es.isZero(0.0));

    const PAArray pa = PAArray::uniform(nlazf::testing::default_pa(), 2);
    const auto [ee1, es1] = empirical_distortion_covariance(w, pa, 5000, 77);
    const auto [ee2, es2] = empirical_distortion_covariance(w, pa, 5000, 77);
    CHECK(ee1 == ee2);
    CHECK(es1 == es2);
}

TEST_CASE("bussgang_model bundles gain and covariance") {
    const Precoder w = random_precoder(41, 2, 2, PowerAllocation::equal_split(1.0, 2));
    const PAArray pa = PAArray::uniform(nlazf::testing::default_pa(), 2);
    const BussgangModel model = bussgang_model(w, pa);
    CHECK(model.gain == bussgang_gain(w, pa).diagonal());
    CHECK(model.covariance == distortion_covariance(w, pa));
}
