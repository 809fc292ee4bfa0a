#pragma once

// Parameter scans over the channel transmittance and the invariant check
// suites behind the command-line tool.

#include "cvqkd/blochmessiah.hpp"
#include "cvqkd/bounds.hpp"
#include "cvqkd/eca.hpp"
#include "cvqkd/oracle.hpp"
#include "cvqkd/random.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace cvqkd {

inline const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> m{"eb", "bm-get", "bm-gme", "oracle"};
    return m;
}

struct ScanConfig {
    double tau_min = 0.02;
    double tau_max = 0.98;
    int tau_steps = 50;
    std::vector<double> nbars{0.01, 0.02};
    double alpha = 1.0;
    std::string constellation = "qpsk";
    int order = 4;
    std::vector<std::string> methods{"eb", "bm-get", "bm-gme"};
    GramVariant gram_variant = GramVariant::purified;
    LogBase log_base = LogBase::bits;
    int cutoff = 20;

    void validate() const {
        if (!(tau_min > 0.0 && tau_min <= 1.0 && tau_max > 0.0 && tau_max <= 1.0))
            throw precondition_error("scan: tau bounds must lie in (0, 1]");
        if (tau_min > tau_max) throw precondition_error("scan: tau-min exceeds tau-max");
        if (tau_steps < 1) throw precondition_error("scan: tau-steps must be >= 1");
        if (nbars.empty()) throw precondition_error("scan: at least one --nbar is required");
        for (double n : nbars) require_nbar(n, "scan --nbar");
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw precondition_error("scan: alpha must be positive");
        if (constellation != "qpsk" && constellation != "psk")
            throw precondition_error("scan: unknown constellation '" + constellation + "'");
        if (constellation == "qpsk" && order != 4) throw precondition_error("scan: qpsk requires --order 4");
        if (order < 1) throw precondition_error("scan: order must be >= 1");
        if (methods.empty()) throw precondition_error("scan: methods must be nonempty");
        for (const auto& m : methods)
            if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
                throw precondition_error("scan: unknown method '" + m + "'");
        if (cutoff < 6) throw precondition_error("scan: cutoff must be >= 6");
    }

    std::vector<double> taus() const {
        std::vector<double> t;
        if (tau_steps == 1) return {tau_min};
        for (int i = 0; i < tau_steps; ++i)
            t.push_back(tau_min + (tau_max - tau_min) * static_cast<double>(i) / (tau_steps - 1));
        return t;
    }

    Constellation make_constellation() const { return psk(alpha, order); }
};

struct ScanRow {
    double tau;
    double nbar;
    double alpha;
    std::string method;
    std::string variant;
    double entropy;
    std::string status;  ///< "ok", "not-converged", "unsupported" or "error"
};

inline constexpr const char* csv_header = "tau,nbar,alpha,method,variant,entropy,log_base,status";

inline std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::vector<ScanRow> run_scan(const ScanConfig& cfg) {
    cfg.validate();
    const Constellation c = cfg.make_constellation();
    std::optional<EntangledBasedModel> eb;
    const bool want_eb = std::find(cfg.methods.begin(), cfg.methods.end(), "eb") != cfg.methods.end();
    const bool eb_ok = cfg.order == 4;
    if (want_eb && eb_ok) eb = make_eb_model(cfg.alpha);

    std::vector<ScanRow> rows;
    for (double nbar : cfg.nbars)
        for (double tau : cfg.taus()) {
            const ChannelParams p(tau, nbar);
            for (const auto& m : cfg.methods) {
                ScanRow row{tau, nbar, cfg.alpha, m, "-", std::nan(""), "ok"};
                try {
                    if (m == "eb") {
                        if (!eb) row.status = "unsupported";
                        else row.entropy = eb_qpsk_entropy(*eb, p, cfg.log_base);
                    } else if (m == "bm-get") {
                        row.entropy = bm_get_entropy(c, p, cfg.log_base);
                    } else if (m == "bm-gme") {
                        row.variant = to_string(cfg.gram_variant);
                        row.entropy = bm_gme_entropy(c, p, cfg.gram_variant, cfg.log_base);
                    } else {
                        const fock::OracleEntropy o = fock::eve_exact_entropy(c, p, cfg.cutoff, cfg.log_base);
                        if (o.converged) row.entropy = o.value;
                        else row.status = "not-converged";
                    }
                } catch (const precondition_error&) {
                    row.status = "unsupported";
                } catch (const std::runtime_error&) {
                    row.status = "error";
                }
                rows.push_back(std::move(row));
            }
        }
    std::stable_sort(rows.begin(), rows.end(), [](const ScanRow& a, const ScanRow& b) {
        return std::tie(a.nbar, a.tau, a.method) < std::tie(b.nbar, b.tau, b.method);
    });
    return rows;
}

inline void write_csv(std::ostream& os, const std::vector<ScanRow>& rows, LogBase base) {
    os << csv_header << '\n';
    for (const auto& r : rows) {
        os << format_number(r.tau) << ',' << format_number(r.nbar) << ',' << format_number(r.alpha) << ','
           << r.method << ',' << r.variant << ',' << (r.status == "ok" ? format_number(r.entropy) : "nan") << ','
           << to_string(base) << ',' << r.status << '\n';
    }
}

/// Pointwise ordering GME <= GET <= EB (slack 1e-9) and oracle <= GET
/// (margin 1e-6) over every (nbar, tau) of a scan. Returns the violations.
inline std::vector<std::string> check_ordering(const std::vector<ScanRow>& rows) {
    std::map<std::pair<double, double>, std::map<std::string, double>> grid;
    for (const auto& r : rows)
        if (r.status == "ok") grid[{r.nbar, r.tau}][r.method] = r.entropy;
    std::vector<std::string> bad;
    auto cmp = [&](const auto& key, const auto& vals, const char* lo, const char* hi, double slack) {
        auto a = vals.find(lo), b = vals.find(hi);
        if (a == vals.end() || b == vals.end()) return;
        if (a->second > b->second + slack)
            bad.push_back(std::string(lo) + " > " + hi + " at nbar=" + format_number(key.first) +
                          " tau=" + format_number(key.second) + " (" + format_number(a->second) + " vs " +
                          format_number(b->second) + ")");
    };
    for (const auto& [key, vals] : grid) {
        cmp(key, vals, "bm-gme", "bm-get", 1e-9);
        cmp(key, vals, "bm-get", "eb", 1e-9);
        cmp(key, vals, "oracle", "bm-get", 1e-6);
    }
    return bad;
}

// Invariant suites.

struct SuiteResult {
    std::string name;
    double max_residual;
    double limit;
    bool pass() const { return max_residual <= limit; }
};

inline SuiteResult suite_bloch_messiah() {
    std::mt19937_64 rng(20240611);
    double worst = 0.0;
    for (int i = 0; i < 30; ++i) {
        const Eigen::Index n = 1 + i % 3;
        const BogoliubovPair b = rnd::bogoliubov(rng, n);
        const BMFactors f = bloch_messiah(b);
        const BMResiduals r = bm_residuals(f, b.E(), b.F());
        const BogoliubovPair c = compose_circuit(factors_to_circuit(f), n);
        worst = std::max({worst, r.reconstruct, r.rotation, r.squeeze, max_abs(c.E() - b.E()), max_abs(c.F() - b.F())});
    }
    return {"bloch-messiah", worst, 1e-9};
}

inline SuiteResult suite_williamson() {
    double worst = 0.0;
    for (double nbar : {0.0, 0.01, 0.02, 0.05})
        for (int i = 0; i <= 20; ++i) {
            const ChannelParams p(i / 20.0, nbar);
            const StandardTwoModeCov cv = eve_reduced_covariance(p);
            const WilliamsonForm w = williamson_standard_two_mode(cv);
            RealVector d(4);
            d << w.nu1, w.nu1, w.nu2, w.nu2;
            const RealMatrix rec = w.map.S() * d.asDiagonal() * w.map.S().transpose();
            const RealVector nu = symplectic_eigenvalues(cv.matrix());
            worst = std::max({worst, max_abs(rec - cv.matrix()), std::abs(w.w1 * w.w1 - w.w2 * w.w2 - 1.0),
                              std::abs(nu(0) - (2.0 * (1.0 - p.tau()) * nbar + 1.0)), std::abs(nu(1) - 1.0)});
        }
    return {"williamson", worst, 1e-9};
}

inline SuiteResult suite_eca_pipeline() {
    double worst = 0.0;
    for (double nbar : {0.0, 0.01, 0.02})
        for (int i = 0; i <= 10; ++i) {
            const ChannelParams p(i / 10.0, nbar);
            worst = std::max(worst, max_abs(eve_reduced_covariance_pipeline(p) - eve_reduced_covariance(p).matrix()));
        }
    return {"eca-pipeline", worst, 1e-12};
}

inline SuiteResult suite_switching_rules() {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Eigen::Index n = 1 + i % 2;
        const ComplexVector a = rnd::vector(rng, n);
        const ComplexMatrix z = rnd::symmetric(rng, n, 0.3);
        const ComplexMatrix phi = rnd::hermitian(rng, n);
        const auto D = [&](const ComplexVector& x) { return bogoliubov_of(Displacement{x}); };
        const auto S = [&](const ComplexMatrix& x) { return bogoliubov_of(Squeezer{x}); };
        const auto R = [&](const ComplexMatrix& x) { return bogoliubov_of(Rotation{x}); };
        auto diff = [](const BogoliubovPair& x, const BogoliubovPair& y) {
            return std::max({max_abs(x.E() - y.E()), max_abs(x.F() - y.F()), max_abs(x.alpha() - y.alpha())});
        };
        // Operator product X Y applies Y first.
        worst = std::max(worst, diff(compose(S(z), D(a)), compose(D(switch_disp_squeezer(z, a)), S(z))));
        worst = std::max(worst, diff(compose(R(phi), S(z)), compose(S(switch_squeezer_rotation(phi, z)), R(phi))));
        worst = std::max(worst, diff(compose(R(phi), D(a)), compose(D(switch_disp_rotation(phi, a)), R(phi))));
    }
    return {"switching-rules", worst, 1e-10};
}

inline SuiteResult suite_ordering() {
    double worst = 0.0;
    std::map<std::pair<double, double>, std::map<std::string, double>> grid;
    for (const auto& r : run_scan(ScanConfig{})) {
        if (r.status != "ok") worst = 1.0;
        grid[{r.nbar, r.tau}][r.method] = r.entropy;
    }
    for (auto& [key, v] : grid)
        worst = std::max({worst, v["bm-gme"] - v["bm-get"], v["bm-get"] - v["eb"]});
    return {"ordering", std::max(worst, 0.0), 1e-9};
}

inline SuiteResult suite_unitary_invariance() {
    const Constellation c = qpsk(1.0);
    double worst = 0.0;
    for (double nbar : {0.01, 0.02})
        for (int i = 1; i < 10; ++i) {
            const ChannelParams p(i / 10.0, nbar);
            worst = std::max(worst, std::abs(bm_get_entropy(c, p) - bm_get_entropy_conjugated(c, p)));
        }
    return {"unitary-invariance", worst, 1e-9};
}

inline SuiteResult suite_pure_limit() {
    const Constellation c = qpsk(1.0);
    const ChannelParams p(0.0, 0.0);
    const double gram = gram_entropy(coherent_gram_matrix(c));
    const double gme = bm_gme_entropy(c, p, GramVariant::pure_exact);
    const double oracle = fock::eve_exact_entropy(c, p, 20).value;
    return {"pure-limit", std::max(std::abs(gram - gme), std::abs(gram - oracle)), 1e-3};
}

inline SuiteResult suite_extremality() {
    const Constellation c = qpsk(1.0);
    double worst = -1.0;
    for (double tau : {0.1, 0.5, 0.9}) {
        const ChannelParams p(tau, 0.01);
        const fock::OracleEntropy o = fock::eve_exact_entropy(c, p, 16);
        worst = std::max(worst, o.converged ? o.value - bm_get_entropy(c, p) : 1.0);
    }
    return {"gaussian-extremality", worst, 1e-6};
}

inline std::vector<SuiteResult> run_checks(const std::optional<std::string>& inject = std::nullopt) {
    std::vector<SuiteResult> out{suite_bloch_messiah(), suite_williamson(),      suite_eca_pipeline(),
                                 suite_switching_rules(), suite_ordering(), suite_unitary_invariance(),
                                 suite_pure_limit(),      suite_extremality()};
    // Test mode: a negative limit makes the named suite fail.
    if (inject)
        for (auto& s : out)
            if (s.name == *inject) s.limit = -1.0;
    return out;
}

inline void print_checks(std::ostream& os, const std::vector<SuiteResult>& res) {
    for (const auto& s : res)
        os << "suite=" << s.name << " max_residual=" << format_number(s.max_residual)
           << " limit=" << format_number(s.limit) << " result=" << (s.pass() ? "PASS" : "FAIL") << '\n';
}

}  // namespace cvqkd
