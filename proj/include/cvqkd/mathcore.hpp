#pragma once

// Dense complex matrix kernels used by the Bloch-Messiah pipeline:
// functions of normal/Hermitian matrices, the principal square root and
// Takagi factor of a symmetric unitary, and the matched SVD of a pair of
// Bogoliubov matrices.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvqkd {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Thrown when an input violates a documented precondition.
class precondition_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a computed result fails its own postcondition check.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double construction = 1e-10;
inline constexpr double reconstruction = 1e-9;
inline constexpr double zero_squeezing = 1e-12;
}  // namespace tol

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (!std::isfinite(std::abs(m(i, j)))) return false;
    return true;
}

template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (!all_finite(m)) throw precondition_error(std::string(what) + ": non-finite entry");
}

inline double unitarity_residual(const ComplexMatrix& m) {
    return max_abs(m.adjoint() * m - ComplexMatrix::Identity(m.cols(), m.cols()));
}

inline double symmetry_residual(const ComplexMatrix& m) { return max_abs(m - m.transpose()); }

inline std::string residual_message(const std::string& what, double residual, double limit) {
    std::ostringstream os;
    os.precision(3);
    os << what << " violated: residual " << std::scientific << residual << " > " << limit;
    return os.str();
}

inline void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw precondition_error(std::string(what) + ": expected a non-empty square matrix");
}

inline void require_symmetric_unitary(const ComplexMatrix& m, const char* what) {
    require_square(m, what);
    require_finite(m, what);
    if (double r = symmetry_residual(m); r > tol::construction)
        throw precondition_error(residual_message(std::string(what) + ": M = M^T", r, tol::construction));
    if (double r = unitarity_residual(m); r > tol::construction)
        throw precondition_error(residual_message(std::string(what) + ": M^dag M = I", r, tol::construction));
}

/// f(M) for a normal matrix M, evaluated through its complex Schur form.
/// The Schur triangle of a normal matrix is diagonal up to rounding; only
/// the diagonal is used.
template <class Fn>
ComplexMatrix normal_matrix_function(const ComplexMatrix& m, Fn&& f) {
    Eigen::ComplexSchur<ComplexMatrix> schur(m);
    const ComplexMatrix& q = schur.matrixU();
    const ComplexMatrix& t = schur.matrixT();
    ComplexVector fd(t.rows());
    for (Eigen::Index i = 0; i < t.rows(); ++i) fd(i) = f(t(i, i));
    return q * fd.asDiagonal() * q.adjoint();
}

/// f(H) for a Hermitian matrix H with a real scalar function f.
template <class Fn>
ComplexMatrix hermitian_function(const ComplexMatrix& h, Fn&& f) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    const RealVector& ev = es.eigenvalues();
    ComplexVector fd(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) fd(i) = f(ev(i));
    return es.eigenvectors() * fd.asDiagonal() * es.eigenvectors().adjoint();
}

namespace detail {
// Principal argument in (-pi, pi]; values rounding to -pi are mapped to +pi.
inline double principal_arg(cplx z) {
    double a = std::arg(z);
    if (a <= -std::numbers::pi + 1e-12) a = std::numbers::pi;
    return a;
}
}  // namespace detail

/// Principal square root of a symmetric unitary matrix. The result is a
/// polynomial in M, hence symmetric as well.
inline ComplexMatrix principal_sqrt(const ComplexMatrix& m) {
    require_symmetric_unitary(m, "principal_sqrt");
    return normal_matrix_function(m, [](cplx z) {
        return std::polar(std::sqrt(std::abs(z)), 0.5 * detail::principal_arg(z));
    });
}

/// Takagi factor of a symmetric unitary G: returns unitary D with D D^T = G.
inline ComplexMatrix takagi_symmetric_unitary(const ComplexMatrix& g) {
    require_symmetric_unitary(g, "takagi_symmetric_unitary");
    ComplexMatrix d = principal_sqrt(g);
    if (double r = max_abs(d * d.transpose() - g); r > tol::reconstruction)
        throw numerical_error(residual_message("takagi: D D^T = G", r, tol::reconstruction));
    return d;
}

/// Hermitian phi with exp(i phi) = U, eigenphases in (-pi, pi].
inline ComplexMatrix unitary_log(const ComplexMatrix& u) {
    require_square(u, "unitary_log");
    if (double r = unitarity_residual(u); r > tol::construction)
        throw precondition_error(residual_message("unitary_log: U^dag U = I", r, tol::construction));
    ComplexMatrix phi = normal_matrix_function(u, [](cplx z) { return cplx(detail::principal_arg(z), 0.0); });
    return 0.5 * (phi + phi.adjoint());
}

/// exp(i H) for Hermitian H.
inline ComplexMatrix unitary_exp(const ComplexMatrix& h) {
    return hermitian_function(h, [](double x) { return std::polar(1.0, x); });
}

struct MatchedSVD {
    ComplexMatrix U;
    RealVector lambdaE;
    RealVector lambdaF;
    ComplexMatrix WE;
    ComplexMatrix WF;
};

/// Residuals of the two Bogoliubov identities E F^T = F E^T and E E^dag = F F^dag + I.
struct BogoliubovResiduals {
    double symmetric;
    double symplectic;
};

inline BogoliubovResiduals bogoliubov_residuals(const ComplexMatrix& e, const ComplexMatrix& f) {
    const auto n = e.rows();
    return {max_abs(e * f.transpose() - f * e.transpose()),
            max_abs(e * e.adjoint() - f * f.adjoint() - ComplexMatrix::Identity(n, n))};
}

inline void require_bogoliubov(const ComplexMatrix& e, const ComplexMatrix& f, const char* what) {
    require_square(e, what);
    if (f.rows() != e.rows() || f.cols() != e.cols())
        throw precondition_error(std::string(what) + ": E and F must have equal square shape");
    require_finite(e, what);
    require_finite(f, what);
    auto [sym, spl] = bogoliubov_residuals(e, f);
    if (sym > tol::reconstruction)
        throw precondition_error(residual_message(std::string(what) + ": E F^T = F E^T", sym, tol::reconstruction));
    if (spl > tol::reconstruction)
        throw precondition_error(
            residual_message(std::string(what) + ": E E^dag = F F^dag + I", spl, tol::reconstruction));
}

/// Simultaneous SVD E = U diag(lambdaE) WE^dag, F = U diag(lambdaF) WF^dag
/// with a shared left factor. U diagonalizes E E^dag; singular values are
/// sorted in decreasing order. Columns of WF with zero squeezing are set to
/// conj(WE) there. The rotation condition WF = conj(WE) is not enforced.
inline MatchedSVD matched_svd(const ComplexMatrix& e, const ComplexMatrix& f) {
    require_bogoliubov(e, f, "matched_svd");
    const auto n = e.rows();

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(e * e.adjoint());
    // Strongest squeezing first; ties keep the solver's order.
    const RealVector& ev = es.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const double gap = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return ev(a) > ev(b) + gap; });
    ComplexMatrix u(n, n);
    for (Eigen::Index k = 0; k < n; ++k) u.col(k) = es.eigenvectors().col(order[static_cast<std::size_t>(k)]);

    const ComplexMatrix uf = u.adjoint() * f;
    MatchedSVD out;
    out.U = u;
    out.lambdaF.resize(n);
    out.lambdaE.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double lf = uf.row(k).norm();
        out.lambdaF(k) = lf;
        out.lambdaE(k) = std::sqrt(1.0 + lf * lf);
    }

    // E^dag U = WE Lambda_E
    out.WE = e.adjoint() * u * out.lambdaE.cwiseInverse().asDiagonal();
    out.WF.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (out.lambdaF(k) > tol::zero_squeezing)
            out.WF.col(k) = uf.row(k).adjoint() / out.lambdaF(k);
        else
            out.WF.col(k) = out.WE.col(k).conjugate();
    }

    for (const auto* m : {&out.WE, &out.WF}) {
        if (double r = unitarity_residual(*m); r > tol::reconstruction)
            throw numerical_error(residual_message("matched_svd: right factor unitarity", r, tol::reconstruction));
    }
    return out;
}

}  // namespace cvqkd
