#pragma once

// Truncated Fock-space reference simulation. Every mode is truncated at the
// same photon number `cutoff`; basis index of (n_0, ..., n_{N-1}) is
// row-major with mode 0 most significant. Unitaries are applied as the
// action exp(G)|psi> of the truncated anti-Hermitian generator G.

#include "cvqkd/eca.hpp"
#include "cvqkd/gaussian.hpp"
#include "cvqkd/mathcore.hpp"

#include <Eigen/Sparse>

#include <array>
#include <stdexcept>

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace cvqkd::fock {

using SparseOp = Eigen::SparseMatrix<cplx>;

class convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FockSpace {
    int cutoff;
    int nmodes;

    FockSpace(int cutoff_, int nmodes_) : cutoff(cutoff_), nmodes(nmodes_) {
        if (cutoff < 1) throw precondition_error("FockSpace: cutoff must be >= 1");
        if (nmodes < 1) throw precondition_error("FockSpace: need at least one mode");
    }

    Eigen::Index levels() const { return cutoff + 1; }
    Eigen::Index dim() const {
        Eigen::Index d = 1;
        for (int k = 0; k < nmodes; ++k) d *= levels();
        return d;
    }
    // Stride of mode k in the flat index.
    Eigen::Index stride(int mode) const {
        Eigen::Index s = 1;
        for (int k = nmodes - 1; k > mode; --k) s *= levels();
        return s;
    }
    int occupation(Eigen::Index index, int mode) const {
        return static_cast<int>((index / stride(mode)) % levels());
    }
};

/// Pure state on a truncated space. `deficit` is the norm lost to truncation
/// when the state was prepared.
struct FockState {
    FockSpace space;
    ComplexVector psi;
    double deficit = 0.0;
};

struct FockDensity {
    FockSpace space;
    ComplexMatrix rho;
    double deficit = 0.0;
};

inline SparseOp annihilation(const FockSpace& s, int mode) {
    if (mode < 0 || mode >= s.nmodes) throw precondition_error("annihilation: mode out of range");
    std::vector<Eigen::Triplet<cplx>> trips;
    const auto st = s.stride(mode);
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        const int n = s.occupation(i, mode);
        if (n > 0) trips.emplace_back(i - st, i, std::sqrt(static_cast<double>(n)));
    }
    SparseOp a(s.dim(), s.dim());
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

inline SparseOp creation(const FockSpace& s, int mode) { return SparseOp(annihilation(s, mode).adjoint()); }

inline SparseOp quadrature_q(const FockSpace& s, int mode) {
    return annihilation(s, mode) + creation(s, mode);
}
inline SparseOp quadrature_p(const FockSpace& s, int mode) {
    return cplx(0, -1) * (annihilation(s, mode) - creation(s, mode));
}

/// exp(G) v by scaled Taylor series; G is the truncated generator.
inline ComplexVector expm_action(const SparseOp& g, const ComplexVector& v) {
    double norm1 = 0.0;
    for (Eigen::Index k = 0; k < g.outerSize(); ++k) {
        double col = 0.0;
        for (SparseOp::InnerIterator it(g, k); it; ++it) col += std::abs(it.value());
        norm1 = std::max(norm1, col);
    }
    const int steps = std::max(1, static_cast<int>(std::ceil(norm1 / 0.5)));
    const cplx scale(1.0 / steps, 0.0);
    ComplexVector out = v;
    for (int s = 0; s < steps; ++s) {
        ComplexVector term = out;
        ComplexVector acc = out;
        for (int k = 1; k < 60; ++k) {
            term = (scale / static_cast<double>(k)) * (g * term);
            acc += term;
            if (term.norm() <= 1e-18 * acc.norm()) break;
        }
        out = acc;
    }
    return out;
}

inline FockState evolve(const SparseOp& generator, const FockState& s) {
    return {s.space, expm_action(generator, s.psi), s.deficit};
}

// Generators (anti-Hermitian) of the fundamental unitaries on `modes`.

/// sum_j alpha_j a_j^dag - conj(alpha_j) a_j.
inline SparseOp displacement_generator(const FockSpace& s, std::span<const int> modes, const ComplexVector& alpha) {
    SparseOp g(s.dim(), s.dim());
    for (std::size_t j = 0; j < modes.size(); ++j)
        g += alpha(static_cast<Eigen::Index>(j)) * creation(s, modes[j]) -
             std::conj(alpha(static_cast<Eigen::Index>(j))) * annihilation(s, modes[j]);
    return g;
}

/// i sum_jk phi_jk a_j^dag a_k.
inline SparseOp rotation_generator(const FockSpace& s, std::span<const int> modes, const ComplexMatrix& phi) {
    SparseOp g(s.dim(), s.dim());
    for (std::size_t j = 0; j < modes.size(); ++j)
        for (std::size_t k = 0; k < modes.size(); ++k) {
            const cplx c = phi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
            if (c != 0.0) g += (cplx(0, 1) * c) * SparseOp(creation(s, modes[j]) * annihilation(s, modes[k]));
        }
    return g;
}

/// (sum_jk Z_jk a_j^dag a_k^dag - conj(Z_jk) a_j a_k) / 2.
inline SparseOp squeezer_generator(const FockSpace& s, std::span<const int> modes, const ComplexMatrix& z) {
    SparseOp g(s.dim(), s.dim());
    for (std::size_t j = 0; j < modes.size(); ++j)
        for (std::size_t k = 0; k < modes.size(); ++k) {
            const cplx c = z(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
            if (c == 0.0) continue;
            g += (0.5 * c) * SparseOp(creation(s, modes[j]) * creation(s, modes[k]));
            g -= (0.5 * std::conj(c)) * SparseOp(annihilation(s, modes[j]) * annihilation(s, modes[k]));
        }
    return g;
}

/// theta (a^dag b - a b^dag) with cos theta = sqrt(tau): a -> t a + r b, b -> t b - r a.
inline SparseOp beam_splitter_generator(const FockSpace& s, int mode_a, int mode_b, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw precondition_error("beam_splitter_generator: tau outside [0, 1]");
    const double theta = std::acos(std::sqrt(tau));
    SparseOp g = creation(s, mode_a) * annihilation(s, mode_b) - annihilation(s, mode_a) * creation(s, mode_b);
    return theta * g;
}

// State preparation.

/// Truncated coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!).
inline ComplexVector coherent_amplitudes(cplx alpha, int cutoff) {
    ComplexVector v(cutoff + 1);
    cplx c = std::exp(-0.5 * std::norm(alpha));
    for (int n = 0; n <= cutoff; ++n) {
        v(n) = c;
        c *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    return v;
}

inline FockState fock_coherent(cplx alpha, int cutoff) {
    ComplexVector v = coherent_amplitudes(alpha, cutoff);
    return {FockSpace(cutoff, 1), v, 1.0 - v.squaredNorm()};
}

inline FockState fock_vacuum(const FockSpace& s) {
    ComplexVector v = ComplexVector::Zero(s.dim());
    v(0) = 1.0;
    return {s, v, 0.0};
}

inline FockDensity fock_thermal(double nbar, int cutoff) {
    require_nbar(nbar, "fock_thermal");
    ComplexMatrix rho = ComplexMatrix::Zero(cutoff + 1, cutoff + 1);
    const double q = nbar / (1.0 + nbar);
    double pn = 1.0 / (1.0 + nbar);
    for (int n = 0; n <= cutoff; ++n) {
        rho(n, n) = pn;
        pn *= q;
    }
    return {FockSpace(cutoff, 1), rho, std::pow(q, cutoff + 1)};
}

/// sqrt(1 - lambda^2) sum_n (-lambda)^n |n>|n>, lambda = tanh(acosh(2 nbar + 1) / 2).
inline FockState fock_tmsv(double nbar, int cutoff) {
    require_nbar(nbar, "fock_tmsv");
    const FockSpace s(cutoff, 2);
    const double lambda = std::tanh(0.5 * std::acosh(2.0 * nbar + 1.0));
    ComplexVector v = ComplexVector::Zero(s.dim());
    double c = std::sqrt(1.0 - lambda * lambda);
    for (int n = 0; n <= cutoff; ++n) {
        v(n * s.stride(0) + n) = c;
        c *= -lambda;
    }
    return {s, v, 1.0 - v.squaredNorm()};
}

inline FockState tensor(const FockState& x, const FockState& y) {
    if (x.space.cutoff != y.space.cutoff) throw precondition_error("tensor: cutoff mismatch");
    const FockSpace s(x.space.cutoff, x.space.nmodes + y.space.nmodes);
    ComplexVector v(s.dim());
    for (Eigen::Index i = 0; i < x.psi.size(); ++i) v.segment(i * y.psi.size(), y.psi.size()) = x.psi(i) * y.psi;
    return {s, v, 1.0 - (1.0 - x.deficit) * (1.0 - y.deficit)};
}

// Reductions and scalar functionals.

/// Reduced density matrix of a pure state on the modes in `keep` (in mode order).
inline FockDensity partial_trace(const FockState& st, std::span<const int> keep) {
    const FockSpace& s = st.space;
    std::vector<bool> kept(static_cast<std::size_t>(s.nmodes), false);
    for (int m : keep) {
        if (m < 0 || m >= s.nmodes) throw precondition_error("partial_trace: mode out of range");
        kept[static_cast<std::size_t>(m)] = true;
    }
    const FockSpace ks(s.cutoff, static_cast<int>(keep.size()));
    const Eigen::Index kd = ks.dim(), td = s.dim() / kd;
    ComplexMatrix psi(kd, td);
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        Eigen::Index ki = 0, ti = 0;
        for (int m = 0; m < s.nmodes; ++m) {
            const int n = s.occupation(i, m);
            if (kept[static_cast<std::size_t>(m)]) ki = ki * s.levels() + n;
            else ti = ti * s.levels() + n;
        }
        psi(ki, ti) = st.psi(i);
    }
    return {ks, psi * psi.adjoint(), st.deficit};
}

inline FockDensity to_density(const FockState& st) { return {st.space, st.psi * st.psi.adjoint(), st.deficit}; }

/// Eigenvalues of a density matrix, normalized to unit trace.
inline RealVector spectrum(const FockDensity& d) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(d.rho, Eigen::EigenvaluesOnly);
    RealVector ev = es.eigenvalues();
    return ev / ev.sum();
}

inline double entropy_of_spectrum(const RealVector& ev, LogBase base = LogBase::bits) {
    double s = 0.0;
    for (double x : ev)
        if (x > 1e-15) s -= x * log_in(x, base);
    return s;
}

inline double fock_entropy(const FockDensity& d, LogBase base = LogBase::bits) {
    return entropy_of_spectrum(spectrum(d), base);
}

/// tr(rho1 rho2).
inline double fock_hs_product(const FockDensity& x, const FockDensity& y) {
    return (x.rho.adjoint().cwiseProduct(y.rho)).sum().real();
}

inline double trace_distance_pure(const ComplexVector& x, const ComplexVector& y) {
    const double ov = std::norm(x.dot(y)) / (x.squaredNorm() * y.squaredNorm());
    return std::sqrt(std::max(0.0, 1.0 - ov));
}

/// Trace distance between density matrices, (1/2) sum |eig(rho1 - rho2)|.
inline double trace_distance(const FockDensity& x, const FockDensity& y) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(x.rho - y.rho, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// First and second moments in the quadrature convention of the Gaussian
/// module, extracted literally from the truncated state.
struct Moments {
    RealVector mean;
    RealMatrix cov;
};

namespace detail {
template <class Expect>
Moments moments_with(const FockSpace& s, Expect expect) {
    std::vector<SparseOp> r;
    for (int m = 0; m < s.nmodes; ++m) {
        r.push_back(quadrature_q(s, m));
        r.push_back(quadrature_p(s, m));
    }
    const auto n = static_cast<Eigen::Index>(r.size());
    RealVector mean(n);
    for (Eigen::Index j = 0; j < n; ++j) mean(j) = expect(r[static_cast<std::size_t>(j)]);
    RealMatrix cov(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = j; k < n; ++k) {
            const SparseOp& rj = r[static_cast<std::size_t>(j)];
            const SparseOp& rk = r[static_cast<std::size_t>(k)];
            const SparseOp anti = rj * rk + rk * rj;
            cov(j, k) = cov(k, j) = 0.5 * expect(anti) - mean(j) * mean(k);
        }
    return {mean, cov};
}
}  // namespace detail

inline Moments moments(const FockDensity& d) {
    const double tr = d.rho.trace().real();
    // tr(rho O) summed over the nonzeros of O.
    return detail::moments_with(d.space, [&](const SparseOp& o) {
        cplx acc = 0.0;
        for (Eigen::Index k = 0; k < o.outerSize(); ++k)
            for (SparseOp::InnerIterator it(o, k); it; ++it) acc += d.rho(it.col(), it.row()) * it.value();
        return acc.real() / tr;
    });
}

inline Moments moments(const FockState& st) {
    const double nrm = st.psi.squaredNorm();
    return detail::moments_with(st.space, [&](const SparseOp& o) { return st.psi.dot(o * st.psi).real() / nrm; });
}

// Entangling-cloner oracle.

struct OracleEntropy {
    double value = 0.0;        ///< entropy at the requested cutoff
    double coarse = 0.0;       ///< entropy at cutoff - 5
    double deficit = 0.0;      ///< largest trace deficit seen
    bool converged = false;    ///< |value - coarse| < 1e-4 and deficit < 1e-6
};

/// Eve's (D, E) average state simulated literally: coherent x TMSV, beam
/// splitter on (A, C), trace out Bob, average over the constellation.
inline FockDensity eve_average_state(const Constellation& c, const ChannelParams& p, int cutoff) {
    const FockSpace s(cutoff, 3);
    const FockState tmsv = fock_tmsv(p.nbar(), cutoff);
    const SparseOp bs = beam_splitter_generator(s, 0, 1, p.tau());
    static constexpr std::array<int, 2> eve{1, 2};
    const FockSpace es(cutoff, 2);
    FockDensity avg{es, ComplexMatrix::Zero(es.dim(), es.dim()), 0.0};
    for (std::size_t i = 0; i < c.size(); ++i) {
        const FockState in = tensor(fock_coherent(c.amplitudes()[i], cutoff), tmsv);
        const FockDensity eve_i = partial_trace(evolve(bs, in), eve);
        avg.rho += c.probs()[i] * eve_i.rho;
        avg.deficit = std::max(avg.deficit, eve_i.deficit);
    }
    return avg;
}

inline OracleEntropy eve_exact_entropy(const Constellation& c, const ChannelParams& p, int cutoff,
                                       LogBase base = LogBase::bits) {
    if (cutoff < 6) throw precondition_error("eve_exact_entropy: cutoff must be >= 6");
    OracleEntropy out;
    const FockDensity fine = eve_average_state(c, p, cutoff);
    const FockDensity coarse = eve_average_state(c, p, cutoff - 5);
    out.value = fock_entropy(fine, base);
    out.coarse = fock_entropy(coarse, base);
    out.deficit = 1.0 - fine.rho.trace().real();
    out.converged = std::abs(out.value - out.coarse) < 1e-4 && out.deficit < 1e-6;
    return out;
}

/// Purification of Alice's average state and its quadrature statistics.
struct Purification {
    double z4 = 0.0;      ///< <q_A q_B>, sign fixed to be >= 0
    double x = 0.0;       ///< <q_A^2>
    double deficit = 0.0;
    RealMatrix cov;       ///< full two-mode covariance of |Psi>
};

/// |Psi> = sum_j sqrt(lambda_j) |phi_j>|conj(phi_j)> for rho_A = sum_i p_i |alpha_i><alpha_i|.
inline Purification eb_purification(const Constellation& c, int cutoff) {
    const int n = cutoff + 1;
    ComplexMatrix rho = ComplexMatrix::Zero(n, n);
    double deficit = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const ComplexVector v = coherent_amplitudes(c.amplitudes()[i], cutoff);
        deficit = std::max(deficit, 1.0 - v.squaredNorm());
        rho += c.probs()[i] * v * v.adjoint();
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
    const FockSpace s(cutoff, 2);
    ComplexVector psi = ComplexVector::Zero(s.dim());
    for (int j = 0; j < n; ++j) {
        const double lam = es.eigenvalues()(j);
        if (lam <= 1e-14) continue;
        const ComplexVector phi = es.eigenvectors().col(j);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) psi(a * n + b) += std::sqrt(lam) * phi(a) * std::conj(phi(b));
    }
    psi /= psi.norm();
    Moments m = moments(FockState{s, psi, deficit});
    Purification out;
    if (m.cov(0, 2) < 0.0) {
        // pi phase on mode B flips (q_B, p_B).
        m.cov.block(0, 2, 2, 2) *= -1.0;
        m.cov.block(2, 0, 2, 2) *= -1.0;
    }
    out.z4 = m.cov(0, 2);
    out.x = m.cov(0, 0);
    out.deficit = deficit;
    out.cov = m.cov;
    return out;
}

inline double eb_z4(double alpha, int cutoff) {
    const Purification pur = eb_purification(qpsk(alpha), cutoff);
    if (pur.deficit > 1e-6) throw convergence_error("eb_z4: truncation deficit above 1e-6");
    return pur.z4;
}

}  // namespace cvqkd::fock
