// Decomposes Eve's thermal-decomposition unitary at one channel point and
// prints the circuit and the three entropy estimates.

#include "cvqkd/cvqkd.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    using namespace cvqkd;
    const double tau = argc > 1 ? std::atof(argv[1]) : 0.5;
    const double nbar = argc > 2 ? std::atof(argv[2]) : 0.01;
    const ChannelParams p(tau, nbar);
    const Constellation c = qpsk(1.0);

    const DisplacedThermalEnsemble e = displaced_thermal_ensemble(c, p);
    std::cout << "tau=" << tau << " nbar=" << nbar << "\n";
    std::cout << "w1=" << e.williamson.w1 << " w2=" << e.williamson.w2 << " nu1'=" << e.nu1p << " nu2'=" << e.nu2p
              << "\n";

    const BMFactors f = bloch_messiah(eve_unitary(e.williamson));
    std::cout << "lambdaE=" << f.lambdaE.transpose() << "\nlambdaF=" << f.lambdaF.transpose() << "\n";
    std::cout << "calU=\n" << f.calU << "\ncalWE^dag=\n" << f.calWE.adjoint() << "\n";

    for (const auto& op : factors_to_circuit(f)) {
        std::visit(
            [](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, Rotation>) std::cout << "R(phi)  phi=\n" << o.phi << "\n";
                else if constexpr (std::is_same_v<T, Squeezer>) std::cout << "S(r)    r=" << o.Z.diagonal().real().transpose() << "\n";
                else std::cout << "D(alpha)\n";
            },
            op);
    }

    std::cout << "EB  = " << eb_qpsk_entropy(1.0, p) << " bits\n";
    std::cout << "GET = " << bm_get_entropy(c, p) << " bits\n";
    std::cout << "GME = " << bm_gme_entropy(c, p, GramVariant::purified) << " bits (purified)\n";
    return 0;
}
