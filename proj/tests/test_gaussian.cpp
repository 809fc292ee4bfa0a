#include "cvqkd/eca.hpp"
#include "cvqkd/gaussian.hpp"
#include "cvqkd/random.hpp"

#include <gtest/gtest.h>

#include <array>

using namespace cvqkd;

TEST(GaussianStates, Thermal) {
    EXPECT_LT(max_abs(make_thermal(0.0).cov() - RealMatrix::Identity(2, 2)), 1e-15);
    EXPECT_LT(max_abs(make_thermal(0.01).cov() - 1.02 * RealMatrix::Identity(2, 2)), 1e-15);
    EXPECT_NEAR(entropy_from_cov(make_thermal(1.0).cov()), 2.0, 1e-12);
    EXPECT_THROW(make_thermal(-0.1), precondition_error);
}

TEST(GaussianStates, Tmsv) {
    const GaussianState s = make_tmsv(0.01);
    EXPECT_NEAR(s.cov()(0, 2), 2.0 * std::sqrt(0.0101), 1e-15);
    EXPECT_NEAR(s.cov()(0, 2), 0.20100, 1e-5);
    EXPECT_NEAR(s.cov()(1, 3), -s.cov()(0, 2), 1e-15);
    const RealVector nu = symplectic_eigenvalues(s.cov());
    EXPECT_NEAR(nu(0), 1.0, 1e-9);
    EXPECT_NEAR(nu(1), 1.0, 1e-9);
    EXPECT_LT(max_abs(make_tmsv(0.0).cov() - RealMatrix::Identity(4, 4)), 1e-15);
}

TEST(GaussianStates, CoherentMean) {
    EXPECT_LT(max_abs(make_coherent(0.0).mean()), 1e-15);
    EXPECT_NEAR(make_coherent(1.0).mean()(0), 2.0, 1e-15);
    const RealVector m = make_coherent(cplx(1, 1) / std::sqrt(2.0)).mean();
    EXPECT_NEAR(m(0), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(m(1), std::sqrt(2.0), 1e-15);
}

TEST(GaussianStates, RejectsUnphysical) {
    EXPECT_THROW(GaussianState(RealVector::Zero(2), 0.5 * RealMatrix::Identity(2, 2)), precondition_error);
    RealMatrix asym = RealMatrix::Identity(2, 2);
    asym(0, 1) = 0.3;
    EXPECT_THROW(GaussianState(RealVector::Zero(2), asym), precondition_error);
}

TEST(SymplecticEigenvalues, EveReducedState) {
    for (double nbar : {0.01, 0.02, 0.1}) {
        const RealVector nu = symplectic_eigenvalues(eve_reduced_covariance(ChannelParams(1.0, nbar)).matrix());
        EXPECT_NEAR(nu(0), 1.0, 1e-9);
        EXPECT_NEAR(nu(1), 1.0, 1e-9);
    }
    const StandardTwoModeCov c = eve_reduced_covariance(ChannelParams(0.5, 0.01));
    EXPECT_NEAR(c.a, 1.01, 1e-15);
    EXPECT_NEAR(c.b, 1.02, 1e-15);
    EXPECT_NEAR(c.c, 0.142127, 1e-6);
    const RealVector nu = symplectic_eigenvalues(c.matrix());
    EXPECT_NEAR(nu(0), 1.01, 1e-10);
    EXPECT_NEAR(nu(1), 1.0, 1e-10);
}

TEST(SymplecticEigenvalues, ClosedFormAgreesOnGrid) {
    for (double nbar : {0.0, 0.01, 0.02, 0.1})
        for (int i = 0; i <= 20; ++i) {
            const double tau = i / 20.0;
            const StandardTwoModeCov c = eve_reduced_covariance(ChannelParams(tau, nbar));
            const RealVector nu = symplectic_eigenvalues(c.matrix());
            auto [p, m] = standard_form_symplectic_eigenvalues(c);
            EXPECT_NEAR(std::max(p, m), nu(0), 1e-10);
            EXPECT_NEAR(std::min(p, m), nu(1), 1e-10);
            EXPECT_NEAR(nu(0), 2.0 * (1.0 - tau) * nbar + 1.0, 1e-9);
            EXPECT_NEAR(nu(1), 1.0, 1e-9);
        }
}

TEST(Williamson, ReferencePoint) {
    const WilliamsonForm w = williamson_standard_two_mode(eve_reduced_covariance(ChannelParams(0.5, 0.01)));
    EXPECT_NEAR(w.w1, 1.0024844758788585, 1e-12);
    EXPECT_NEAR(w.w2, 0.07053456158585966, 1e-12);
    EXPECT_NEAR(w.w1, 1.00248, 1e-5);
    EXPECT_NEAR(w.w2, 0.07053, 1e-5);
    EXPECT_NEAR(w.nu1, 1.0, 1e-12);
    EXPECT_NEAR(w.nu2, 1.01, 1e-12);
}

TEST(Williamson, TmsvIsCoshSinh) {
    const double nbar = 0.02;
    const double nu = 2 * nbar + 1;
    const double r = 0.5 * std::acosh(nu);
    const WilliamsonForm w = williamson_standard_two_mode(StandardTwoModeCov{nu, nu, std::sqrt(nu * nu - 1)});
    EXPECT_NEAR(w.w1, std::cosh(r), 1e-12);
    EXPECT_NEAR(w.w2, std::sinh(r), 1e-12);
    EXPECT_NEAR(w.nu1, 1.0, 1e-12);
    EXPECT_NEAR(w.nu2, 1.0, 1e-12);
}

TEST(Williamson, DiagonalInput) {
    const WilliamsonForm w = williamson_standard_two_mode(StandardTwoModeCov{1.5, 1.2, 0.0});
    EXPECT_EQ(w.w1, 1.0);
    EXPECT_EQ(w.w2, 0.0);
    EXPECT_LT(max_abs(w.map.S() - RealMatrix::Identity(4, 4)), 1e-15);
    // Per-mode values: mode 1 keeps a, mode 2 keeps b.
    EXPECT_NEAR(w.nu1, 1.5, 1e-15);
    EXPECT_NEAR(w.nu2, 1.2, 1e-15);
}

TEST(Williamson, ReconstructsOnGrid) {
    for (double nbar : {0.01, 0.02, 0.1})
        for (int i = 1; i <= 19; ++i) {
            const StandardTwoModeCov c = eve_reduced_covariance(ChannelParams(0.05 * i, nbar));
            const WilliamsonForm w = williamson_standard_two_mode(c);
            RealVector d(4);
            d << w.nu1, w.nu1, w.nu2, w.nu2;
            EXPECT_LT(max_abs(w.map.S() * d.asDiagonal() * w.map.S().transpose() - c.matrix()), 1e-9);
            EXPECT_NEAR(w.w1 * w.w1 - w.w2 * w.w2, 1.0, 1e-10);
        }
}

TEST(Williamson, RejectsUnphysical) {
    EXPECT_THROW(williamson_standard_two_mode(StandardTwoModeCov{1.0, 1.0, 1.0}), precondition_error);
    EXPECT_THROW(williamson_standard_two_mode(StandardTwoModeCov{1.0, 1.0, 0.5}), precondition_error);
}

TEST(Entropy, ReferenceValues) {
    EXPECT_EQ(entropy_from_cov(RealMatrix::Identity(4, 4)), 0.0);
    // g(0.01) from an arbitrary-precision evaluation.
    EXPECT_NEAR(entropy_from_cov(make_thermal(0.01).cov()), 0.0809374078045880, 1e-13);
    EXPECT_NEAR(entropy_from_cov(make_thermal(1.0).cov(), LogBase::nats), 2.0 * std::log(2.0), 1e-13);
    EXPECT_EQ(thermal_entropy(1e-13), 0.0);
}

TEST(Entropy, InvariantUnderSymplectics) {
    std::mt19937_64 rng(5);
    const RealMatrix cov = eve_reduced_covariance(ChannelParams(0.3, 0.05)).matrix();
    for (int i = 0; i < 20; ++i) {
        const SymplecticMap s = to_symplectic(rnd::bogoliubov(rng, 2));
        const RealMatrix out = s.S() * cov * s.S().transpose();
        EXPECT_NEAR(entropy_from_cov(out), entropy_from_cov(cov), 1e-9);
        const RealVector a = symplectic_eigenvalues(out), b = symplectic_eigenvalues(cov);
        EXPECT_LT(max_abs(a - b), 1e-9);
    }
}

TEST(PhaseSpace, ApplyAndTrace) {
    const GaussianState t = make_tmsv(0.05);
    EXPECT_LT(max_abs(apply_symplectic(t, SymplecticMap::identity(2)).cov() - t.cov()), 1e-15);
    static constexpr std::array<int, 1> one{1};
    EXPECT_LT(max_abs(partial_trace_modes(t, one).cov() - 1.1 * RealMatrix::Identity(2, 2)), 1e-15);
    static constexpr std::array<int, 2> all{0, 1};
    EXPECT_LT(max_abs(partial_trace_modes(t, all).cov() - t.cov()), 1e-15);
    static constexpr std::array<int, 1> bad{2};
    EXPECT_THROW(partial_trace_modes(t, bad), precondition_error);

    RealVector d(4);
    d << 0.1, -0.2, 0.3, 0.4;
    const GaussianState moved = apply_symplectic(t, SymplecticMap(RealMatrix::Identity(4, 4), d));
    EXPECT_LT(max_abs(moved.mean() - d), 1e-15);
    EXPECT_LT(max_abs(moved.cov() - t.cov()), 1e-15);
}

TEST(PhaseSpace, RejectsNonSymplectic) {
    RealMatrix s = RealMatrix::Identity(2, 2);
    s(0, 0) = 2.0;
    EXPECT_THROW(SymplecticMap{s}, precondition_error);
}

TEST(AverageCovariance, TwoPointSpread) {
    const double x = 0.3;
    RealVector m1 = RealVector::Zero(2), m2 = RealVector::Zero(2);
    m1(0) = 2 * x;
    m2(0) = -2 * x;
    const std::vector<RealVector> means{m1, m2};
    const std::vector<double> probs{0.5, 0.5};
    const RealMatrix out = average_covariance(means, probs, RealMatrix::Identity(2, 2));
    // Brute-force second central moment.
    RealMatrix ref = RealMatrix::Identity(2, 2);
    ref(0, 0) += 0.5 * (2 * x) * (2 * x) + 0.5 * (2 * x) * (2 * x);
    EXPECT_LT(max_abs(out - ref), 1e-15);
    EXPECT_THROW(average_covariance(means, std::vector<double>{0.5, 0.6}, RealMatrix::Identity(2, 2)),
                 precondition_error);
}
