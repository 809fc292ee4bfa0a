#pragma once

// Gaussian unitaries in the Heisenberg picture: a -> E a + F a^dag + alpha.

#include "cvqkd/gaussian.hpp"
#include "cvqkd/mathcore.hpp"

#include <span>
#include <type_traits>
#include <variant>
#include <vector>

namespace cvqkd {

/// Bogoliubov matrices (E, F) and displacement alpha of a Gaussian unitary.
class BogoliubovPair {
public:
    BogoliubovPair(ComplexMatrix e, ComplexMatrix f, ComplexVector alpha)
        : e_(std::move(e)), f_(std::move(f)), alpha_(std::move(alpha)) {
        require_bogoliubov(e_, f_, "BogoliubovPair");
        if (alpha_.size() != e_.rows()) throw precondition_error("BogoliubovPair: displacement size mismatch");
        require_finite(alpha_, "BogoliubovPair displacement");
    }
    BogoliubovPair(ComplexMatrix e, ComplexMatrix f)
        : BogoliubovPair(e, f, ComplexVector::Zero(e.rows())) {}

    static BogoliubovPair identity(Eigen::Index nmodes) {
        return {ComplexMatrix::Identity(nmodes, nmodes), ComplexMatrix::Zero(nmodes, nmodes)};
    }

    Eigen::Index nmodes() const { return e_.rows(); }
    const ComplexMatrix& E() const { return e_; }
    const ComplexMatrix& F() const { return f_; }
    const ComplexVector& alpha() const { return alpha_; }

private:
    ComplexMatrix e_;
    ComplexMatrix f_;
    ComplexVector alpha_;
};

struct Displacement {
    ComplexVector alpha;
};

/// exp(i a^dag^T phi a) with phi Hermitian.
struct Rotation {
    ComplexMatrix phi;
};

/// exp((a^dag^T Z a^dag - a^T Z^dag a) / 2) with Z symmetric.
struct Squeezer {
    ComplexMatrix Z;
};

using FundamentalOp = std::variant<Displacement, Rotation, Squeezer>;

inline Eigen::Index nmodes_of(const FundamentalOp& op) {
    return std::visit(
        [](const auto& o) -> Eigen::Index {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, Displacement>) return o.alpha.size();
            else if constexpr (std::is_same_v<T, Rotation>) return o.phi.rows();
            else return o.Z.rows();
        },
        op);
}

/// Polar form Z = r e^{i theta}: r = (Z Z^dag)^{1/2} Hermitian PSD and
/// e^{i theta} = r^+ Z completed by the identity on ker r.
struct PolarForm {
    ComplexMatrix r;
    ComplexMatrix phase;
};

inline PolarForm polar(const ComplexMatrix& z) {
    require_square(z, "polar");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(z * z.adjoint());
    const auto n = z.rows();
    const ComplexMatrix& v = es.eigenvectors();
    RealVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    ComplexMatrix r = v * s.cast<cplx>().asDiagonal() * v.adjoint();
    // On range(r): v diag(1/s) v^dag Z. On ker(r): identity.
    ComplexMatrix phase = ComplexMatrix::Zero(n, n);
    const ComplexMatrix vz = v.adjoint() * z;
    ComplexMatrix rows(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (s(k) > tol::zero_squeezing) rows.row(k) = vz.row(k) / s(k);
        else rows.row(k) = v.adjoint().row(k);
    }
    phase = v * rows;
    return {r, phase};
}

inline void require_hermitian(const ComplexMatrix& m, const char* what) {
    require_square(m, what);
    require_finite(m, what);
    if (double r = max_abs(m - m.adjoint()); r > tol::construction)
        throw precondition_error(residual_message(std::string(what) + ": Hermitian", r, tol::construction));
}

inline void require_symmetric(const ComplexMatrix& m, const char* what) {
    require_square(m, what);
    require_finite(m, what);
    if (double r = symmetry_residual(m); r > tol::construction)
        throw precondition_error(residual_message(std::string(what) + ": symmetric", r, tol::construction));
}

namespace detail {
// (cosh r, sinh r e^{i theta}) for symmetric Z.
inline std::pair<ComplexMatrix, ComplexMatrix> squeezer_blocks(const ComplexMatrix& z) {
    const PolarForm p = polar(z);
    const ComplexMatrix ch = hermitian_function(p.r, [](double x) { return cplx(std::cosh(x)); });
    const ComplexMatrix sh = hermitian_function(p.r, [](double x) { return cplx(std::sinh(x)); });
    return {ch, sh * p.phase};
}
}  // namespace detail

inline BogoliubovPair bogoliubov_of(const FundamentalOp& op) {
    return std::visit(
        [](const auto& o) -> BogoliubovPair {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, Displacement>) {
                const auto n = o.alpha.size();
                return {ComplexMatrix::Identity(n, n), ComplexMatrix::Zero(n, n), o.alpha};
            } else if constexpr (std::is_same_v<T, Rotation>) {
                require_hermitian(o.phi, "Rotation");
                const auto n = o.phi.rows();
                return {unitary_exp(o.phi), ComplexMatrix::Zero(n, n)};
            } else {
                require_symmetric(o.Z, "Squeezer");
                auto [e, f] = detail::squeezer_blocks(o.Z);
                return {e, f};
            }
        },
        op);
}

namespace detail {
// Interleaved index of the q (p) quadrature of mode k.
inline Eigen::Index qi(Eigen::Index k) { return 2 * k; }
inline Eigen::Index pi(Eigen::Index k) { return 2 * k + 1; }
}  // namespace detail

/// Quadrature image: S = [[Re(E+F), -Im(E-F)], [Im(E+F), Re(E-F)]] per mode
/// pair, d = (2 Re alpha_k, 2 Im alpha_k).
inline SymplecticMap to_symplectic(const BogoliubovPair& b) {
    const auto n = b.nmodes();
    const ComplexMatrix sum = b.E() + b.F();
    const ComplexMatrix diff = b.E() - b.F();
    RealMatrix s(2 * n, 2 * n);
    RealVector d(2 * n);
    using detail::pi;
    using detail::qi;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            s(qi(j), qi(k)) = sum(j, k).real();
            s(qi(j), pi(k)) = -diff(j, k).imag();
            s(pi(j), qi(k)) = sum(j, k).imag();
            s(pi(j), pi(k)) = diff(j, k).real();
        }
        d(qi(j)) = 2.0 * b.alpha()(j).real();
        d(pi(j)) = 2.0 * b.alpha()(j).imag();
    }
    return {s, d};
}

inline BogoliubovPair from_symplectic(const SymplecticMap& m) {
    const auto n = m.nmodes();
    ComplexMatrix e(n, n), f(n, n);
    ComplexVector alpha(n);
    using detail::pi;
    using detail::qi;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const double a = m.S()(qi(j), qi(k)), bq = m.S()(qi(j), pi(k));
            const double c = m.S()(pi(j), qi(k)), dd = m.S()(pi(j), pi(k));
            // E + F = A + iC, E - F = D - iB
            const cplx sum(a, c), diff(dd, -bq);
            e(j, k) = 0.5 * (sum + diff);
            f(j, k) = 0.5 * (sum - diff);
        }
        alpha(j) = cplx(0.5 * m.d()(qi(j)), 0.5 * m.d()(pi(j)));
    }
    return {e, f, alpha};
}

/// The unitary applying `first` and then `then` (operator product then * first).
inline BogoliubovPair compose(const BogoliubovPair& first, const BogoliubovPair& then) {
    if (first.nmodes() != then.nmodes()) throw precondition_error("compose: mode count mismatch");
    const ComplexMatrix e = then.E() * first.E() + then.F() * first.F().conjugate();
    const ComplexMatrix f = then.E() * first.F() + then.F() * first.E().conjugate();
    const ComplexVector a = then.E() * first.alpha() + then.F() * first.alpha().conjugate() + then.alpha();
    return {e, f, a};
}

/// Composes a circuit given in application order.
inline BogoliubovPair compose_circuit(std::span<const FundamentalOp> ops, Eigen::Index nmodes) {
    BogoliubovPair acc = BogoliubovPair::identity(nmodes);
    for (const auto& op : ops) {
        if (nmodes_of(op) != nmodes) throw precondition_error("compose_circuit: mode count mismatch");
        acc = compose(acc, bogoliubov_of(op));
    }
    return acc;
}

// Switching rules. Each returns the parameter that moves the left operator
// to the right of the product.

/// D_alpha S_Z = S_Z D_beta, beta = cosh(r) alpha - sinh(r) e^{i theta} alpha^*.
inline ComplexVector switch_disp_squeezer(const ComplexMatrix& z, const ComplexVector& alpha) {
    require_symmetric(z, "switch_disp_squeezer");
    if (alpha.size() != z.rows()) throw precondition_error("switch_disp_squeezer: size mismatch");
    auto [ch, sh] = detail::squeezer_blocks(z);
    return ch * alpha - sh * alpha.conjugate();
}

/// S_Z R_phi = R_phi S_Z', Z' = e^{-i phi} Z e^{-i phi^T}.
inline ComplexMatrix switch_squeezer_rotation(const ComplexMatrix& phi, const ComplexMatrix& z) {
    require_hermitian(phi, "switch_squeezer_rotation");
    require_symmetric(z, "switch_squeezer_rotation");
    if (phi.rows() != z.rows()) throw precondition_error("switch_squeezer_rotation: size mismatch");
    const ComplexMatrix u = unitary_exp(-phi);
    return u * z * u.transpose();
}

/// D_alpha R_phi = R_phi D_gamma, gamma = e^{-i phi} alpha.
inline ComplexVector switch_disp_rotation(const ComplexMatrix& phi, const ComplexVector& alpha) {
    require_hermitian(phi, "switch_disp_rotation");
    if (alpha.size() != phi.rows()) throw precondition_error("switch_disp_rotation: size mismatch");
    return unitary_exp(-phi) * alpha;
}

/// D_beta U = U D_beta' for a displacement-free Gaussian unitary U with
/// Bogoliubov matrices (E, F): beta' = E^dag beta - F^T beta^*.
inline ComplexVector switch_disp_unitary(const BogoliubovPair& u, const ComplexVector& beta) {
    if (beta.size() != u.nmodes()) throw precondition_error("switch_disp_unitary: size mismatch");
    return u.E().adjoint() * beta - u.F().transpose() * beta.conjugate();
}

}  // namespace cvqkd
