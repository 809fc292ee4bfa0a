#pragma once

// Estimators of Eve's average-state entropy: the entangled-based Gaussian
// bound (EB), Gaussian extremality on the displaced-thermal ensemble (GET)
// and the Gram-matrix entropy (GME).

#include "cvqkd/blochmessiah.hpp"
#include "cvqkd/eca.hpp"
#include "cvqkd/gaussian.hpp"
#include "cvqkd/oracle.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace cvqkd {

/// tr(rho1 rho2) = 2^N det(S1+S2)^{-1/2} exp(-(1/2) d^T (S1+S2)^{-1} d).
inline double gaussian_hs_overlap(const GaussianState& x, const GaussianState& y) {
    if (x.nmodes() != y.nmodes()) throw precondition_error("gaussian_hs_overlap: mode count mismatch");
    const RealMatrix sum = x.cov() + y.cov();
    Eigen::LDLT<RealMatrix> ldlt(sum);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0.0)
        throw numerical_error("gaussian_hs_overlap: covariance sum is singular");
    const RealVector d = x.mean() - y.mean();
    const double quad = d.dot(ldlt.solve(d));
    const double logdet = ldlt.vectorD().array().log().sum();
    return std::exp(static_cast<double>(x.nmodes()) * std::log(2.0) - 0.5 * logdet - 0.5 * quad);
}

/// Overlap-matrix prescriptions.
///  pure_exact: coherent-state inner products (valid only when nu' = 0).
///  hs_normalized: normalized Hilbert-Schmidt products of the mixed states.
///  purified: inner products of the canonical purifications D(beta) x I |TMSV>.
enum class GramVariant { pure_exact, hs_normalized, purified };

inline const char* to_string(GramVariant v) {
    switch (v) {
        case GramVariant::pure_exact: return "pure-exact";
        case GramVariant::hs_normalized: return "hs-normalized";
        case GramVariant::purified: return "purified";
    }
    return "?";
}

inline GramVariant parse_gram_variant(std::string_view s) {
    if (s == "pure-exact") return GramVariant::pure_exact;
    if (s == "hs-normalized") return GramVariant::hs_normalized;
    if (s == "purified") return GramVariant::purified;
    throw precondition_error("unknown gram variant '" + std::string(s) + "'");
}

namespace tol {
inline constexpr double gram_hermitian = 1e-10;
inline constexpr double gram_trace = 1e-9;
inline constexpr double gram_negative = 1e-8;
}  // namespace tol

class GramMatrix {
public:
    GramMatrix(ComplexMatrix m, GramVariant v) : m_(std::move(m)), variant_(v) {
        require_square(m_, "GramMatrix");
        require_finite(m_, "GramMatrix");
        if (double h = max_abs(m_ - m_.adjoint()); h > tol::gram_hermitian)
            throw numerical_error(residual_message("GramMatrix: Hermitian", h, tol::gram_hermitian));
        if (double t = std::abs(m_.trace() - 1.0); t > tol::gram_trace)
            throw numerical_error(residual_message("GramMatrix: unit trace", t, tol::gram_trace));
        const ComplexMatrix h = 0.5 * (m_ + m_.adjoint());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
        eig_ = es.eigenvalues();
        if (eig_.minCoeff() < -tol::gram_negative)
            throw numerical_error(residual_message("GramMatrix: eigenvalues >= 0", -eig_.minCoeff(), tol::gram_negative));
        eig_ = eig_.cwiseMax(0.0);
        eig_ /= eig_.sum();
    }

    const ComplexMatrix& matrix() const { return m_; }
    GramVariant variant() const { return variant_; }
    /// Eigenvalues after clipping small negatives and renormalizing.
    const RealVector& eigenvalues() const { return eig_; }

private:
    ComplexMatrix m_;
    GramVariant variant_;
    RealVector eig_;
};

inline double gram_entropy(const GramMatrix& m, LogBase base = LogBase::bits) {
    double s = 0.0;
    for (double x : m.eigenvalues())
        if (x > 1e-15) s -= x * log_in(x, base);
    return s;
}

/// <alpha|beta> = exp(-(|alpha|^2 + |beta|^2)/2 + conj(alpha) beta).
inline cplx coherent_overlap(cplx a, cplx b) {
    return std::exp(-0.5 * (std::norm(a) + std::norm(b)) + std::conj(a) * b);
}

inline GramMatrix coherent_gram_matrix(const Constellation& c) {
    const auto k = static_cast<Eigen::Index>(c.size());
    ComplexMatrix m(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            m(i, j) = std::sqrt(c.probs()[i] * c.probs()[j]) * coherent_overlap(c.amplitudes()[i], c.amplitudes()[j]);
    return {m, GramVariant::pure_exact};
}

inline GramMatrix gram_matrix(const DisplacedThermalEnsemble& e, GramVariant v) {
    const auto k = static_cast<Eigen::Index>(e.betas.size());
    const auto modes = e.betas.front().size();
    ComplexMatrix m(k, k);
    switch (v) {
        case GramVariant::pure_exact: {
            if (e.nu1p > tol::zero_squeezing || e.nu2p > tol::zero_squeezing)
                throw precondition_error("gram_matrix: pure-exact variant needs a pure ensemble (nu' = 0)");
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < k; ++j) {
                    cplx ov = 1.0;
                    for (Eigen::Index q = 0; q < modes; ++q) ov *= coherent_overlap(e.betas[i](q), e.betas[j](q));
                    m(i, j) = std::sqrt(e.probs[i] * e.probs[j]) * ov;
                }
            break;
        }
        case GramVariant::hs_normalized: {
            const RealMatrix cov = e.thermal_cov();
            std::vector<GaussianState> st;
            for (const auto& mean : e.means) st.emplace_back(mean, cov);
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < k; ++j) {
                    const double norm = std::sqrt(gaussian_hs_overlap(st[i], st[i]) * gaussian_hs_overlap(st[j], st[j]));
                    m(i, j) = std::sqrt(e.probs[i] * e.probs[j]) * gaussian_hs_overlap(st[i], st[j]) / norm;
                }
            break;
        }
        case GramVariant::purified: {
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < k; ++j) {
                    cplx ov = 1.0;
                    for (Eigen::Index q = 0; q < modes; ++q) {
                        const cplx bi = e.betas[i](q), bj = e.betas[j](q);
                        const double nu = 2.0 * e.thermal_photons(static_cast<int>(q)) + 1.0;
                        ov *= std::exp(cplx(-0.5 * nu * std::norm(bj - bi), std::imag(std::conj(bi) * bj)));
                    }
                    m(i, j) = std::sqrt(e.probs[i] * e.probs[j]) * ov;
                }
            break;
        }
    }
    return {m, v};
}

/// GET estimate: Gaussian entropy of the displaced-thermal ensemble covariance.
inline double bm_get_entropy(const Constellation& c, const ChannelParams& p, LogBase base = LogBase::bits) {
    return entropy_from_cov(eve_average_covariance(c, p), base);
}

/// Same estimate with the Bloch-Messiah circuit of U applied to the ensemble
/// covariance first.
inline double bm_get_entropy_conjugated(const Constellation& c, const ChannelParams& p, LogBase base = LogBase::bits) {
    const DisplacedThermalEnsemble e = displaced_thermal_ensemble(c, p);
    const BMFactors f = bloch_messiah(eve_unitary(e.williamson));
    const std::vector<FundamentalOp> circuit = factors_to_circuit(f);
    const SymplecticMap s = to_symplectic(compose_circuit(circuit, f.nmodes()));
    const RealMatrix cov = s.S() * ensemble_average_covariance(e) * s.S().transpose();
    return entropy_from_cov(cov, base);
}

inline double bm_gme_entropy(const Constellation& c, const ChannelParams& p, GramVariant v,
                             LogBase base = LogBase::bits) {
    return gram_entropy(gram_matrix(displaced_thermal_ensemble(c, p), v), base);
}

/// Rigorous interval for S(rho_Eve) from the purified Gram matrix:
/// |S(rho) - S(M)| <= S(reference), and the reference holds the fixed state
/// th(nu1') x th(nu2').
struct EntropyBracket {
    double lower;
    double gram;
    double upper;
};

inline EntropyBracket purified_bracket(const Constellation& c, const ChannelParams& p, LogBase base = LogBase::bits) {
    const DisplacedThermalEnsemble e = displaced_thermal_ensemble(c, p);
    const double sm = gram_entropy(gram_matrix(e, GramVariant::purified), base);
    const double sr = thermal_entropy(e.nu1p, base) + thermal_entropy(e.nu2p, base);
    return {std::max(0.0, sm - sr), sm, sm + sr};
}

/// Second moments of the purification of Alice's average state.
struct EntangledBasedModel {
    double alpha;
    double x;
    double z4;

    /// Covariance after Bob's half crosses the thermal-loss channel.
    RealMatrix channel_covariance(const ChannelParams& p) const {
        const double b = p.tau() * x + (1.0 - p.tau()) * (2.0 * p.nbar() + 1.0);
        return StandardTwoModeCov{x, b, p.t() * z4}.matrix();
    }
};

inline constexpr int default_eb_cutoff = 40;

/// X = 1 + 2 alpha^2 and Z4 from the Fock purification of the QPSK average state.
inline EntangledBasedModel make_eb_model(double alpha, int cutoff = default_eb_cutoff) {
    const fock::Purification pur = fock::eb_purification(qpsk(alpha), cutoff);
    if (pur.deficit > 1e-6) throw fock::convergence_error("make_eb_model: truncation deficit above 1e-6");
    return {alpha, 1.0 + 2.0 * alpha * alpha, pur.z4};
}

inline double eb_qpsk_entropy(const EntangledBasedModel& m, const ChannelParams& p, LogBase base = LogBase::bits) {
    return entropy_from_cov(m.channel_covariance(p), base);
}

inline double eb_qpsk_entropy(double alpha, const ChannelParams& p, LogBase base = LogBase::bits) {
    return eb_qpsk_entropy(make_eb_model(alpha), p, base);
}

}  // namespace cvqkd
