// Discrete-log identification: a prover who knows e with y = x^e always
// convinces the verifier; an imposter survives t rounds with probability
// about 2^-t.

#include <cstdio>

#include "otkex/params.hpp"
#include "otkex/zkp.hpp"

using namespace otkex;

int main() {
    Rng rng(7);
    GroupParams gp = generate_params(64, rng);
    BigNat e = rand_unit_exponent(gp.p, rng);
    ZkPublic pub = make_zk_public(gp.p, gp.x, e);
    std::printf("public: p=%s x=%s y=%s\n\n", pub.p.str().c_str(), pub.x.str().c_str(),
                pub.y.str().c_str());

    HonestProver honest(e);
    ImposterProver imposter;

    int honest_ok = 0, imposter_ok = 0;
    const int trials = 1000;
    const unsigned t = 8;
    for (int i = 0; i < trials; ++i) {
        Rng r1 = rng.fork(), r2 = rng.fork();
        honest_ok += run_protocol(honest, pub, t, r1);
        imposter_ok += run_protocol(imposter, pub, t, r2);
    }
    std::printf("t = %u rounds, %d trials each\n", t, trials);
    std::printf("honest prover accepted:  %d/%d\n", honest_ok, trials);
    std::printf("imposter accepted:       %d/%d (expected ~%.1f)\n", imposter_ok, trials,
                trials / 256.0);
    return 0;
}
