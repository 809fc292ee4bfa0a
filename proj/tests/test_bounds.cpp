#include "cvqkd/bounds.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace cvqkd;

namespace {

// Eigenvalues of the QPSK Gram matrix in closed form:
// (1/2) e^{-a^2} {cosh a^2 + cos a^2, cosh a^2 - cos a^2, sinh a^2 + sin a^2, sinh a^2 - sin a^2}.
std::vector<double> qpsk_gram_eigenvalues(double alpha) {
    const double x = alpha * alpha, e = 0.5 * std::exp(-x);
    std::vector<double> v{e * (std::cosh(x) + std::cos(x)), e * (std::cosh(x) - std::cos(x)),
                          e * (std::sinh(x) + std::sin(x)), e * (std::sinh(x) - std::sin(x))};
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST(HsOverlap, AgainstFockOracle) {
    const int cutoff = 40;
    EXPECT_NEAR(gaussian_hs_overlap(GaussianState::vacuum(2), GaussianState::vacuum(2)), 1.0, 1e-15);

    const cplx a(0.8, -0.3);
    const double g = gaussian_hs_overlap(make_coherent(a), GaussianState::vacuum(1));
    const double f = fock::fock_hs_product(fock::to_density(fock::fock_coherent(a, cutoff)),
                                           fock::to_density(fock::fock_coherent(0.0, cutoff)));
    EXPECT_NEAR(g, f, 1e-8 * f);
    EXPECT_NEAR(g, std::exp(-std::norm(a)), 1e-14);

    for (double nbar : {0.01, 0.3}) {
        const fock::FockDensity th = fock::fock_thermal(nbar, cutoff);
        const double purity = gaussian_hs_overlap(make_thermal(nbar), make_thermal(nbar));
        EXPECT_NEAR(purity, fock::fock_hs_product(th, th), 1e-8);
        EXPECT_NEAR(purity, 1.0 / (2 * nbar + 1), 1e-14);
    }

    const GaussianState x = make_tmsv(0.1), y = eca_output_state(0.3, ChannelParams(0.4, 0.1));
    static constexpr std::array<int, 2> keep{1, 2};
    const GaussianState ye = partial_trace_modes(y, keep);
    EXPECT_NEAR(gaussian_hs_overlap(x, ye), gaussian_hs_overlap(ye, x), 1e-15);
}

TEST(GramMatrix, TrivialEnsembles) {
    const Constellation one({cplx(0.4, 0.1)}, {1.0});
    const GramMatrix m = coherent_gram_matrix(one);
    EXPECT_NEAR(std::abs(m.matrix()(0, 0)), 1.0, 1e-15);
    EXPECT_EQ(gram_entropy(m), 0.0);

    // Far-apart coherent states are orthogonal to double precision.
    const GramMatrix far = coherent_gram_matrix(qpsk(30.0));
    EXPECT_LT(max_abs(far.matrix() - 0.25 * ComplexMatrix::Identity(4, 4)), 1e-15);
    EXPECT_NEAR(gram_entropy(far), 2.0, 1e-14);
}

TEST(GramMatrix, QpskPureEnsemble) {
    const GramMatrix m = coherent_gram_matrix(qpsk(1.0));
    const std::vector<double> ref = qpsk_gram_eigenvalues(1.0);
    const std::vector<double> frozen{0.0613862413642907, 0.1844507656359467, 0.3709461170174029, 0.3832168759823596};
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(m.eigenvalues()(k), ref[static_cast<std::size_t>(k)], 1e-14);
        EXPECT_NEAR(m.eigenvalues()(k), frozen[static_cast<std::size_t>(k)], 1e-14);
    }
    EXPECT_NEAR(gram_entropy(m), 1.75795836446118113, 1e-13);
    EXPECT_NEAR(gram_entropy(m, LogBase::nats), 1.75795836446118113 * std::log(2.0), 1e-13);
    // Cross-check against the oracle's exact four-state average.
    EXPECT_NEAR(gram_entropy(m), fock::eve_exact_entropy(qpsk(1.0), ChannelParams(0.0, 0.0), 20).value, 1e-3);
}

TEST(GramMatrix, ClippingAndRejection) {
    ComplexMatrix ok = ComplexMatrix::Zero(2, 2);
    ok(0, 0) = 1.0 + 5e-9;
    ok(1, 1) = -5e-9;
    const GramMatrix m(ok, GramVariant::pure_exact);
    EXPECT_EQ(m.eigenvalues().minCoeff(), 0.0);
    EXPECT_NEAR(m.eigenvalues().sum(), 1.0, 1e-15);

    ComplexMatrix bad = ok;
    bad(0, 0) = 1.0 + 1e-6;
    bad(1, 1) = -1e-6;
    EXPECT_THROW(GramMatrix(bad, GramVariant::pure_exact), numerical_error);
    ComplexMatrix nh = 0.5 * ComplexMatrix::Identity(2, 2);
    nh(0, 1) = 0.1;
    EXPECT_THROW(GramMatrix(nh, GramVariant::pure_exact), numerical_error);
}

TEST(GramMatrix, Variants) {
    const ChannelParams p(0.5, 0.01);
    const DisplacedThermalEnsemble e = displaced_thermal_ensemble(qpsk(1.0), p);
    EXPECT_THROW(gram_matrix(e, GramVariant::pure_exact), precondition_error);

    // hs-normalized entries are exp(-(1/4) d^T Sigma^{-1} d) scaled by sqrt(p p').
    const GramMatrix hs = gram_matrix(e, GramVariant::hs_normalized);
    const RealMatrix inv = e.thermal_cov().inverse();
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            const RealVector d = e.means[i] - e.means[j];
            EXPECT_NEAR(hs.matrix()(i, j).real(), 0.25 * std::exp(-0.25 * d.dot(inv * d)), 1e-14);
        }

    // In the pure limit the purified variant reduces to coherent overlaps.
    const DisplacedThermalEnsemble pure = displaced_thermal_ensemble(qpsk(1.0), ChannelParams(0.3, 0.0));
    EXPECT_LT(max_abs(gram_matrix(pure, GramVariant::purified).matrix() -
                      gram_matrix(pure, GramVariant::pure_exact).matrix()),
              1e-14);
    EXPECT_EQ(parse_gram_variant("purified"), GramVariant::purified);
    EXPECT_THROW(parse_gram_variant("linear"), precondition_error);
}

TEST(Estimators, BmGet) {
    const Constellation c = qpsk(1.0);
    EXPECT_NEAR(bm_get_entropy(c, ChannelParams(1.0, 0.01)), 0.0, 1e-12);
    EXPECT_NEAR(bm_get_entropy(c, ChannelParams(0.0, 0.0)), 2.0, 1e-12);
    const double mid = bm_get_entropy(c, ChannelParams(0.5, 0.01));
    EXPECT_NEAR(mid, 1.437859788148, 1e-10);
    EXPECT_GE(mid, fock::eve_exact_entropy(c, ChannelParams(0.5, 0.01), 20).value);
    EXPECT_LT(mid, 2.0);
}

TEST(Estimators, BmGetIgnoresTheUnitary) {
    const Constellation c = qpsk(1.0);
    for (double nbar : {0.01, 0.02})
        for (int i = 1; i < 10; ++i) {
            const ChannelParams p(0.1 * i, nbar);
            EXPECT_NEAR(bm_get_entropy(c, p), bm_get_entropy_conjugated(c, p), 1e-9);
            EXPECT_NEAR(bm_get_entropy(c, p), entropy_from_cov(eve_true_average_covariance(c, p)), 1e-9);
        }
}

TEST(Estimators, BmGme) {
    const Constellation c = qpsk(1.0);
    EXPECT_NEAR(bm_gme_entropy(c, ChannelParams(1.0, 0.01), GramVariant::purified), 0.0, 1e-12);
    EXPECT_NEAR(bm_gme_entropy(c, ChannelParams(0.0, 0.0), GramVariant::pure_exact), 1.75795836446118113, 1e-13);
}

TEST(Estimators, EntangledBased) {
    const EntangledBasedModel m = make_eb_model(1.0);
    EXPECT_NEAR(m.x, 3.0, 1e-15);
    EXPECT_NEAR(m.z4, 2.51970509731507229, 1e-8);
    EXPECT_NEAR(eb_qpsk_entropy(m, ChannelParams(0.5, 0.01)), 2.156992408215451, 1e-10);
    EXPECT_NEAR(eb_qpsk_entropy(m, ChannelParams(0.1, 0.01)), 2.119529723274990, 1e-10);
    EXPECT_NEAR(eb_qpsk_entropy(m, ChannelParams(0.9, 0.02)), 2.112496494586777, 1e-10);
    // The purification is not Gaussian, so the Gaussian state with its
    // covariance stays mixed even for the identity channel.
    EXPECT_NEAR(eb_qpsk_entropy(m, ChannelParams(1.0, 0.0)), 2.085276761745492, 1e-10);
}

TEST(Estimators, OrderingOnGrid) {
    const Constellation c = qpsk(1.0);
    const EntangledBasedModel eb = make_eb_model(1.0);
    for (double nbar : {0.01, 0.02})
        for (int i = 0; i < 50; ++i) {
            const ChannelParams p(0.02 + 0.96 * i / 49.0, nbar);
            const double gme = bm_gme_entropy(c, p, GramVariant::purified);
            const double get = bm_get_entropy(c, p);
            EXPECT_LE(gme, get + 1e-9) << "tau=" << p.tau();
            EXPECT_LE(get, eb_qpsk_entropy(eb, p) + 1e-9) << "tau=" << p.tau();
        }
}

TEST(Estimators, PurifiedBracketContainsExact) {
    const Constellation c = qpsk(1.0);
    for (double tau : {0.1, 0.5, 0.9}) {
        const ChannelParams p(tau, 0.02);
        const EntropyBracket b = purified_bracket(c, p);
        const double exact = fock::eve_exact_entropy(c, p, 18).value;
        EXPECT_LE(b.lower, exact + 1e-9);
        EXPECT_GE(b.upper, exact - 1e-9);
    }
}
