#pragma once

// Entangling-cloner attack on a thermal-loss channel.
//
// Mode order is (A, C, E) before the beam splitter and (B, D, E) after it:
// A is Alice's mode, C/E the two halves of Eve's TMSV, B goes to Bob and
// (D, E) stay with Eve. The beam splitter maps A, C to B = tA + rC and
// D = -rA + tC with t = sqrt(tau), r = sqrt(1 - tau).

#include "cvqkd/blochmessiah.hpp"
#include "cvqkd/gaussian.hpp"
#include "cvqkd/unitaries.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace cvqkd {

class ChannelParams {
public:
    ChannelParams(double tau, double nbar) : tau_(tau), nbar_(nbar) {
        if (!(tau >= 0.0 && tau <= 1.0)) throw precondition_error("ChannelParams: transmittance must lie in [0, 1]");
        require_nbar(nbar, "ChannelParams");
    }

    double tau() const { return tau_; }
    double nbar() const { return nbar_; }
    double t() const { return std::sqrt(tau_); }
    double r() const { return std::sqrt(1.0 - tau_); }

private:
    double tau_;
    double nbar_;
};

/// Alice's ensemble {|alpha_i>, p_i}.
class Constellation {
public:
    Constellation(std::vector<cplx> amplitudes, std::vector<double> probs)
        : amplitudes_(std::move(amplitudes)), probs_(std::move(probs)) {
        if (amplitudes_.empty() || amplitudes_.size() != probs_.size())
            throw precondition_error("Constellation: amplitudes and probabilities must be non-empty and equal length");
        double total = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0)) throw precondition_error("Constellation: negative probability");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) throw precondition_error("Constellation: probabilities do not sum to 1");
        for (cplx a : amplitudes_)
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
                throw precondition_error("Constellation: non-finite amplitude");
    }

    std::size_t size() const { return amplitudes_.size(); }
    const std::vector<cplx>& amplitudes() const { return amplitudes_; }
    const std::vector<double>& probs() const { return probs_; }

    /// Second moment sum_i p_i |alpha_i|^2.
    double mean_photons() const {
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) s += probs_[i] * std::norm(amplitudes_[i]);
        return s;
    }

private:
    std::vector<cplx> amplitudes_;
    std::vector<double> probs_;
};

/// Equiprobable K-PSK: alpha e^{i (2k-1) pi / K}, k = 1..K.
inline Constellation psk(double alpha, int order) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw precondition_error("psk: amplitude must be positive");
    if (order < 1) throw precondition_error("psk: order must be >= 1");
    std::vector<cplx> amps;
    for (int k = 1; k <= order; ++k) amps.push_back(std::polar(alpha, (2.0 * k - 1.0) * std::numbers::pi / order));
    return {amps, std::vector<double>(static_cast<std::size_t>(order), 1.0 / order)};
}

inline Constellation qpsk(double alpha) { return psk(alpha, 4); }

/// Block-diag(I_A, TMSV(nbar)_CE).
inline RealMatrix initial_covariance(const ChannelParams& p) {
    return direct_sum(GaussianState::vacuum(1), make_tmsv(p.nbar())).cov();
}

inline SymplecticMap bs_symplectic(const ChannelParams& p) {
    RealMatrix s = RealMatrix::Identity(6, 6);
    const RealMatrix i2 = RealMatrix::Identity(2, 2);
    s.block(0, 0, 2, 2) = p.t() * i2;
    s.block(0, 2, 2, 2) = p.r() * i2;
    s.block(2, 0, 2, 2) = -p.r() * i2;
    s.block(2, 2, 2, 2) = p.t() * i2;
    return SymplecticMap(s);
}

/// Eve's (D, E) covariance in closed form: a = 2 tau nbar + 1, b = 2 nbar + 1,
/// c = 2 sqrt(tau) sqrt(nbar^2 + nbar).
inline StandardTwoModeCov eve_reduced_covariance(const ChannelParams& p) {
    return {2.0 * p.tau() * p.nbar() + 1.0, 2.0 * p.nbar() + 1.0,
            2.0 * p.t() * std::sqrt(p.nbar() * p.nbar() + p.nbar())};
}

/// Global (B, D, E) state for the input coherent amplitude alpha_i.
inline GaussianState eca_output_state(cplx alpha_i, const ChannelParams& p) {
    const GaussianState in = direct_sum(make_coherent(alpha_i), make_tmsv(p.nbar()));
    return apply_symplectic(in, bs_symplectic(p));
}

/// Eve's (D, E) covariance through the phase-space pipeline (initial state,
/// beam splitter, trace out Bob).
inline RealMatrix eve_reduced_covariance_pipeline(const ChannelParams& p) {
    static constexpr std::array<int, 2> eve_modes{1, 2};
    return partial_trace_modes(eca_output_state(0.0, p), eve_modes).cov();
}

/// (-r 2Re alpha_i, -r 2Im alpha_i, 0, 0).
inline RealVector eve_conditional_mean(cplx alpha_i, const ChannelParams& p) {
    RealVector m = RealVector::Zero(4);
    m(0) = -p.r() * 2.0 * alpha_i.real();
    m(1) = -p.r() * 2.0 * alpha_i.imag();
    return m;
}

/// Eve's conditional states moved through the Bloch-Messiah circuit of the
/// thermal decomposition: rho_i = U D(beta'_i) [th(nu1') x th(nu2')] D^dag U^dag.
struct DisplacedThermalEnsemble {
    double nu1p;  ///< thermal photons on normal-form mode 1
    double nu2p;  ///< thermal photons on normal-form mode 2
    std::vector<ComplexVector> betas;  ///< switched displacements beta'_i
    std::vector<RealVector> means;     ///< phase-space form of beta'_i
    std::vector<double> probs;
    WilliamsonForm williamson;

    RealMatrix thermal_cov() const {
        RealVector d(4);
        d << 2 * nu1p + 1, 2 * nu1p + 1, 2 * nu2p + 1, 2 * nu2p + 1;
        return d.asDiagonal();
    }
    double thermal_photons(int mode) const { return mode == 0 ? nu1p : nu2p; }
};

/// Gaussian unitary U of the thermal decomposition of Eve's state.
inline BogoliubovPair eve_unitary(const WilliamsonForm& w) { return from_symplectic(w.map); }

inline DisplacedThermalEnsemble displaced_thermal_ensemble(const Constellation& c, const ChannelParams& p) {
    const WilliamsonForm w = williamson_standard_two_mode(eve_reduced_covariance(p));
    const BogoliubovPair u = eve_unitary(w);
    DisplacedThermalEnsemble out{std::max(0.0, 0.5 * (w.nu1 - 1.0)), std::max(0.0, 0.5 * (w.nu2 - 1.0)), {}, {}, c.probs(), w};
    for (cplx a : c.amplitudes()) {
        // Eve's conditional displacement beta_i = (-r alpha_i, 0).
        ComplexVector beta(2);
        beta << -p.r() * a, 0.0;
        ComplexVector bp = switch_disp_unitary(u, beta);
        RealVector m(4);
        m << 2 * bp(0).real(), 2 * bp(0).imag(), 2 * bp(1).real(), 2 * bp(1).imag();
        out.betas.push_back(bp);
        out.means.push_back(m);
    }
    return out;
}

inline RealMatrix ensemble_average_covariance(const DisplacedThermalEnsemble& e) {
    return average_covariance(e.means, e.probs, e.thermal_cov());
}

/// Covariance of the displaced-thermal average state (numeric moments).
inline RealMatrix eve_average_covariance(const Constellation& c, const ChannelParams& p) {
    return ensemble_average_covariance(displaced_thermal_ensemble(c, p));
}

/// QPSK closed form [[(2(n+x^2)+1) I, -2xy Z], [-2xy Z, (2(m+y^2)+1) I]]
/// with x = w1 r alpha, y = w2 r alpha.
inline RealMatrix qpsk_average_covariance_closed_form(double alpha, const ChannelParams& p) {
    const WilliamsonForm w = williamson_standard_two_mode(eve_reduced_covariance(p));
    const double x = w.w1 * p.r() * alpha, y = w.w2 * p.r() * alpha;
    const double n = 0.5 * (w.nu1 - 1.0), m = 0.5 * (w.nu2 - 1.0);
    return StandardTwoModeCov{2 * (n + x * x) + 1, 2 * (m + y * y) + 1, -2 * x * y}.matrix();
}

/// Eve's true average covariance in (D, E): common Sigma_Eve plus the spread
/// of the conditional means.
inline RealMatrix eve_true_average_covariance(const Constellation& c, const ChannelParams& p) {
    std::vector<RealVector> means;
    for (cplx a : c.amplitudes()) means.push_back(eve_conditional_mean(a, p));
    return average_covariance(means, c.probs(), eve_reduced_covariance(p).matrix());
}

}  // namespace cvqkd
