#pragma once

// Bloch-Messiah decomposition: any displacement-free Gaussian unitary is a
// rotation, a bank of single-mode squeezers, and a second rotation.

#include "cvqkd/mathcore.hpp"
#include "cvqkd/unitaries.hpp"

#include <vector>

namespace cvqkd {

/// E = calU diag(lambdaE) calWE^dag, F = calU diag(lambdaF) calWF^dag with
/// calWF = conj(calWE) and lambdaE^2 = 1 + lambdaF^2.
struct BMFactors {
    ComplexMatrix calU;
    RealVector lambdaE;
    RealVector lambdaF;
    ComplexMatrix calWE;
    ComplexMatrix calWF;
    /// Balancing matrix D (D D^T = G) and the symmetry residual of G = WE^dag conj(WF).
    ComplexMatrix balancing;
    double g_symmetry_residual = 0.0;

    Eigen::Index nmodes() const { return calU.rows(); }
};

struct BMResiduals {
    double rotation;      ///< max |calWF - conj(calWE)|
    double squeeze;       ///< max |lambdaE^2 - 1 - lambdaF^2|
    double reconstruct;   ///< max over E and F reconstruction errors
};

inline BMResiduals bm_residuals(const BMFactors& f, const ComplexMatrix& e, const ComplexMatrix& ff) {
    const ComplexMatrix er = f.calU * f.lambdaE.cast<cplx>().asDiagonal() * f.calWE.adjoint();
    const ComplexMatrix fr = f.calU * f.lambdaF.cast<cplx>().asDiagonal() * f.calWF.adjoint();
    const RealVector sq = f.lambdaE.cwiseAbs2() - f.lambdaF.cwiseAbs2() - RealVector::Ones(f.lambdaE.size());
    return {max_abs(f.calWF - f.calWE.conjugate()), max_abs(sq), std::max(max_abs(er - e), max_abs(fr - ff))};
}

inline BMFactors bloch_messiah(const BogoliubovPair& b) {
    const MatchedSVD svd = matched_svd(b.E(), b.F());

    const ComplexMatrix g = svd.WE.adjoint() * svd.WF.conjugate();
    const double gsym = symmetry_residual(g);
    if (gsym > tol::construction)
        throw numerical_error(residual_message("bloch_messiah: G = WE^dag conj(WF) symmetric", gsym, tol::construction));
    // Symmetrize away rounding before the Takagi step.
    const ComplexMatrix gs = 0.5 * (g + g.transpose());
    const ComplexMatrix d = takagi_symmetric_unitary(gs);

    BMFactors f;
    f.calU = svd.U * d;
    f.lambdaE = svd.lambdaE;
    f.lambdaF = svd.lambdaF;
    f.calWE = svd.WF.conjugate() * d.conjugate();
    f.calWF = svd.WF * d;
    f.balancing = d;
    f.g_symmetry_residual = gsym;

    const BMResiduals r = bm_residuals(f, b.E(), b.F());
    if (r.reconstruct > tol::reconstruction)
        throw numerical_error(residual_message("bloch_messiah: reconstruction", r.reconstruct, tol::reconstruction));
    if (r.rotation > tol::reconstruction)
        throw numerical_error(residual_message("bloch_messiah: rotation condition", r.rotation, tol::reconstruction));
    return f;
}

/// Circuit in application order: R(phi1), S(diag r), R(phi2), then
/// D(alpha) if alpha is nonzero. e^{i phi1} = calWE^dag, cosh r = lambdaE,
/// e^{i phi2} = calU.
inline std::vector<FundamentalOp> factors_to_circuit(const BMFactors& f, const ComplexVector& alpha) {
    const auto n = f.nmodes();
    if (alpha.size() != n) throw precondition_error("factors_to_circuit: displacement size mismatch");
    ComplexMatrix z = ComplexMatrix::Zero(n, n);
    // asinh(lambdaF) equals acosh(lambdaE) and keeps precision for weak squeezing.
    for (Eigen::Index k = 0; k < n; ++k) z(k, k) = std::asinh(f.lambdaF(k));

    std::vector<FundamentalOp> ops;
    ops.emplace_back(Rotation{unitary_log(f.calWE.adjoint())});
    ops.emplace_back(Squeezer{z});
    ops.emplace_back(Rotation{unitary_log(f.calU)});
    if (alpha.norm() > 0.0) ops.emplace_back(Displacement{alpha});
    return ops;
}

inline std::vector<FundamentalOp> factors_to_circuit(const BMFactors& f) {
    return factors_to_circuit(f, ComplexVector::Zero(f.nmodes()));
}

}  // namespace cvqkd
