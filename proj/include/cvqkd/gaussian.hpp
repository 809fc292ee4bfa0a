#pragma once

// Gaussian states in phase space. Quadratures are q = a + a^dag and
// p = -i(a - a^dag), ordered (q1, p1, q2, p2, ...), so the vacuum covariance
// is the identity and a coherent state |alpha> has mean (2 Re alpha, 2 Im alpha).

#include "cvqkd/mathcore.hpp"

#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace cvqkd {

enum class LogBase { bits, nats };

inline const char* to_string(LogBase b) { return b == LogBase::bits ? "bits" : "nats"; }

inline double log_in(double x, LogBase base) { return base == LogBase::bits ? std::log2(x) : std::log(x); }

namespace tol {
inline constexpr double physicality = 1e-9;
inline constexpr double symplectic = 1e-9;
inline constexpr double pairing = 1e-8;
}  // namespace tol

/// Block-diagonal symplectic form with 2x2 blocks [[0, 1], [-1, 0]].
inline RealMatrix symplectic_form(Eigen::Index nmodes) {
    RealMatrix om = RealMatrix::Zero(2 * nmodes, 2 * nmodes);
    for (Eigen::Index k = 0; k < nmodes; ++k) {
        om(2 * k, 2 * k + 1) = 1.0;
        om(2 * k + 1, 2 * k) = -1.0;
    }
    return om;
}

/// Smallest eigenvalue of the Hermitian matrix cov + i Omega (>= 0 for physical states).
inline double uncertainty_margin(const RealMatrix& cov) {
    const auto n = cov.rows() / 2;
    ComplexMatrix h = cov.cast<cplx>() + cplx(0, 1) * symplectic_form(n).cast<cplx>();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline void require_covariance(const RealMatrix& cov, const char* what) {
    if (cov.rows() != cov.cols() || cov.rows() == 0 || cov.rows() % 2 != 0)
        throw precondition_error(std::string(what) + ": covariance must be a non-empty 2N x 2N matrix");
    require_finite(cov, what);
    if (double r = max_abs(cov - cov.transpose()); r > tol::construction)
        throw precondition_error(residual_message(std::string(what) + ": covariance symmetry", r, tol::construction));
    if (double m = uncertainty_margin(cov); m < -tol::physicality)
        throw precondition_error(residual_message(std::string(what) + ": cov + i Omega >= 0", -m, tol::physicality));
}

/// Mean vector and covariance matrix of an N-mode bosonic Gaussian state.
class GaussianState {
public:
    GaussianState(RealVector mean, RealMatrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
        require_covariance(cov_, "GaussianState");
        if (mean_.size() != cov_.rows()) throw precondition_error("GaussianState: mean/covariance size mismatch");
        require_finite(mean_, "GaussianState mean");
    }

    static GaussianState vacuum(Eigen::Index nmodes) {
        return {RealVector::Zero(2 * nmodes), RealMatrix::Identity(2 * nmodes, 2 * nmodes)};
    }

    Eigen::Index nmodes() const { return mean_.size() / 2; }
    const RealVector& mean() const { return mean_; }
    const RealMatrix& cov() const { return cov_; }

private:
    RealVector mean_;
    RealMatrix cov_;
};

/// Affine phase-space map r -> S r + d with S symplectic.
class SymplecticMap {
public:
    SymplecticMap(RealMatrix s, RealVector d) : s_(std::move(s)), d_(std::move(d)) {
        if (s_.rows() != s_.cols() || s_.rows() % 2 != 0 || s_.rows() == 0)
            throw precondition_error("SymplecticMap: S must be 2N x 2N");
        if (d_.size() != s_.rows()) throw precondition_error("SymplecticMap: displacement size mismatch");
        require_finite(s_, "SymplecticMap");
        require_finite(d_, "SymplecticMap displacement");
        const RealMatrix om = symplectic_form(s_.rows() / 2);
        if (double r = max_abs(s_ * om * s_.transpose() - om); r > tol::symplectic)
            throw precondition_error(residual_message("SymplecticMap: S Omega S^T = Omega", r, tol::symplectic));
    }

    explicit SymplecticMap(RealMatrix s) : SymplecticMap(s, RealVector::Zero(s.rows())) {}

    static SymplecticMap identity(Eigen::Index nmodes) {
        return SymplecticMap(RealMatrix::Identity(2 * nmodes, 2 * nmodes));
    }

    Eigen::Index nmodes() const { return s_.rows() / 2; }
    const RealMatrix& S() const { return s_; }
    const RealVector& d() const { return d_; }

    /// The map applying `*this` first and then `next`.
    SymplecticMap then(const SymplecticMap& next) const {
        return {next.S() * s_, next.S() * d_ + next.d()};
    }

private:
    RealMatrix s_;
    RealVector d_;
};

/// Two-mode covariance in standard form [[a I, c Z], [c Z, b I]].
struct StandardTwoModeCov {
    double a;
    double b;
    double c;

    RealMatrix matrix() const {
        RealMatrix m = RealMatrix::Zero(4, 4);
        m(0, 0) = m(1, 1) = a;
        m(2, 2) = m(3, 3) = b;
        m(0, 2) = m(2, 0) = c;
        m(1, 3) = m(3, 1) = -c;
        return m;
    }
};

inline void require_nbar(double nbar, const char* what) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar))
        throw precondition_error(std::string(what) + ": mean photon number must be finite and >= 0");
}

inline GaussianState make_thermal(double nbar) {
    require_nbar(nbar, "make_thermal");
    return {RealVector::Zero(2), (2.0 * nbar + 1.0) * RealMatrix::Identity(2, 2)};
}

inline GaussianState make_tmsv(double nbar) {
    require_nbar(nbar, "make_tmsv");
    const double nu = 2.0 * nbar + 1.0;
    const double c = 2.0 * std::sqrt(nbar * nbar + nbar);
    return {RealVector::Zero(4), StandardTwoModeCov{nu, nu, c}.matrix()};
}

inline GaussianState make_coherent(cplx alpha) {
    RealVector mean(2);
    mean << 2.0 * alpha.real(), 2.0 * alpha.imag();
    return {mean, RealMatrix::Identity(2, 2)};
}

/// Symplectic eigenvalues, sorted in decreasing order.
inline RealVector symplectic_eigenvalues(const RealMatrix& cov) {
    require_covariance(cov, "symplectic_eigenvalues");
    const auto n = cov.rows() / 2;
    // i K Omega K with K = cov^{1/2} is Hermitian and isospectral to i Omega cov.
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(cov);
    if (es.eigenvalues().minCoeff() <= 0.0) throw precondition_error("symplectic_eigenvalues: covariance not positive");
    const RealMatrix k = es.operatorSqrt();
    ComplexMatrix h = cplx(0, 1) * (k * symplectic_form(n) * k).cast<cplx>();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> hs(h, Eigen::EigenvaluesOnly);
    std::vector<double> ev(hs.eigenvalues().data(), hs.eigenvalues().data() + hs.eigenvalues().size());
    std::vector<double> mags;
    mags.reserve(ev.size());
    for (double x : ev) mags.push_back(std::abs(x));
    std::sort(mags.begin(), mags.end(), std::greater<>());
    RealVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double hi = mags[2 * i], lo = mags[2 * i + 1];
        if (std::abs(hi - lo) > tol::pairing * std::max(1.0, hi))
            throw numerical_error("symplectic_eigenvalues: +/- pairing failed");
        out(i) = 0.5 * (hi + lo);
    }
    if (out.minCoeff() < 1.0 - tol::physicality) throw precondition_error("symplectic_eigenvalues: unphysical covariance");
    return out;
}

/// Closed-form symplectic eigenvalues of a standard two-mode covariance,
/// nu_{+/-} = [sqrt((a+b)^2 - 4c^2) +/- (b - a)] / 2, returned as (nu+, nu-).
inline std::pair<double, double> standard_form_symplectic_eigenvalues(const StandardTwoModeCov& c) {
    const double disc = (c.a + c.b) * (c.a + c.b) - 4.0 * c.c * c.c;
    if (!(disc > 0.0)) throw precondition_error("standard_form_symplectic_eigenvalues: (a+b)^2 - 4c^2 <= 0");
    const double s = std::sqrt(disc);
    return {0.5 * (s + (c.b - c.a)), 0.5 * (s - (c.b - c.a))};
}

/// Thermal normal form Sigma = S diag(nu1, nu1, nu2, nu2) S^T of a standard
/// two-mode covariance, with S = [[w1 I, w2 Z], [w2 Z, w1 I]].
///
/// nu1 and nu2 are the values attached to mode 1 and mode 2 of the normal
/// form. For this S the reconstruction forces nu1 - nu2 = a - b.
struct WilliamsonForm {
    SymplecticMap map;
    double nu1;
    double nu2;
    double w1;
    double w2;
};

inline WilliamsonForm williamson_standard_two_mode(const StandardTwoModeCov& c) {
    if (!std::isfinite(c.a) || !std::isfinite(c.b) || !std::isfinite(c.c))
        throw precondition_error("williamson_standard_two_mode: non-finite input");
    const double disc = (c.a + c.b) * (c.a + c.b) - 4.0 * c.c * c.c;
    if (!(disc > 0.0)) throw precondition_error("williamson_standard_two_mode: (a+b)^2 - 4c^2 <= 0 (unphysical)");
    require_covariance(c.matrix(), "williamson_standard_two_mode");
    const double s = std::sqrt(disc);
    const double ratio = (c.a + c.b) / (2.0 * s);
    const double w1 = std::sqrt(ratio + 0.5);
    const double w2 = std::copysign(std::sqrt(std::max(ratio - 0.5, 0.0)), c.c);
    RealMatrix sm = RealMatrix::Zero(4, 4);
    sm(0, 0) = sm(1, 1) = sm(2, 2) = sm(3, 3) = w1;
    sm(0, 2) = sm(2, 0) = w2;
    sm(1, 3) = sm(3, 1) = -w2;
    return {SymplecticMap(sm), 0.5 * (s + c.a - c.b), 0.5 * (s + c.b - c.a), w1, w2};
}

/// g(x) = (x+1) log(x+1) - x log x, the entropy of a thermal mode with mean photon number x.
inline double thermal_entropy(double x, LogBase base = LogBase::bits) {
    if (x < 1e-12) return 0.0;
    return (x + 1.0) * log_in(x + 1.0, base) - x * log_in(x, base);
}

inline double entropy_from_symplectic(const RealVector& nu, LogBase base = LogBase::bits) {
    double s = 0.0;
    for (double v : nu) s += thermal_entropy(0.5 * (v - 1.0), base);
    return s;
}

/// Von Neumann entropy of the Gaussian state with covariance `cov`.
inline double entropy_from_cov(const RealMatrix& cov, LogBase base = LogBase::bits) {
    return entropy_from_symplectic(symplectic_eigenvalues(cov), base);
}

inline GaussianState apply_symplectic(const GaussianState& state, const SymplecticMap& map) {
    if (state.nmodes() != map.nmodes()) throw precondition_error("apply_symplectic: mode count mismatch");
    return {map.S() * state.mean() + map.d(), map.S() * state.cov() * map.S().transpose()};
}

/// Reduced state on the modes listed in `keep` (in the given order).
inline GaussianState partial_trace_modes(const GaussianState& state, std::span<const int> keep) {
    if (keep.empty()) throw precondition_error("partial_trace_modes: keep set is empty");
    std::vector<Eigen::Index> rows;
    for (int m : keep) {
        if (m < 0 || m >= state.nmodes()) throw precondition_error("partial_trace_modes: mode index out of range");
        if (std::find(rows.begin(), rows.end(), 2 * m) != rows.end())
            throw precondition_error("partial_trace_modes: duplicate mode index");
        rows.push_back(2 * m);
        rows.push_back(2 * m + 1);
    }
    const auto k = static_cast<Eigen::Index>(rows.size());
    RealVector mean(k);
    RealMatrix cov(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        mean(i) = state.mean()(rows[i]);
        for (Eigen::Index j = 0; j < k; ++j) cov(i, j) = state.cov()(rows[i], rows[j]);
    }
    return {mean, cov};
}

inline GaussianState direct_sum(const GaussianState& x, const GaussianState& y) {
    const auto n = x.mean().size(), m = y.mean().size();
    RealVector mean(n + m);
    mean << x.mean(), y.mean();
    RealMatrix cov = RealMatrix::Zero(n + m, n + m);
    cov.topLeftCorner(n, n) = x.cov();
    cov.bottomRightCorner(m, m) = y.cov();
    return {mean, cov};
}

/// Covariance of the mixture sum_k p_k N(m_k, common_cov).
inline RealMatrix average_covariance(std::span<const RealVector> means, std::span<const double> probs,
                                     const RealMatrix& common_cov) {
    if (means.size() != probs.size() || means.empty())
        throw precondition_error("average_covariance: means and probabilities must be non-empty and equal length");
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw precondition_error("average_covariance: negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw precondition_error("average_covariance: probabilities do not sum to 1");
    RealVector mbar = RealVector::Zero(common_cov.rows());
    for (std::size_t k = 0; k < means.size(); ++k) {
        if (means[k].size() != common_cov.rows()) throw precondition_error("average_covariance: dimension mismatch");
        mbar += probs[k] * means[k];
    }
    RealMatrix out = common_cov;
    for (std::size_t k = 0; k < means.size(); ++k) {
        const RealVector dm = means[k] - mbar;
        out += probs[k] * dm * dm.transpose();
    }
    return out;
}

}  // namespace cvqkd
