#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <thread>

#include "otkex/ot12.hpp"
#include "otkex/session.hpp"
#include "test_util.hpp"

using namespace otkex;
using testutil::tiny_params;
using testutil::unit_exponents;

namespace {

struct OtRun {
    OtRound1 r1;
    OtRound2 r2;
    OtRound3 r3;
    SymmetricKey kB, k1, k2;
};

OtRun run_ot(const GroupParams& gp, OtChoice choice, const BigNat& nA1, const BigNat& nA2,
             const BigNat& nB, const BigNat& nB1) {
    OtRun r;
    auto [alice, r1] = alice_ot_round1(gp, nA1);
    r.r1 = r1;
    auto [bob, r2] = bob_ot_round2(gp, r1, choice, nB, nB1);
    r.r2 = r2;
    r.r3 = alice_ot_round3(alice, r2, nA2);
    r.kB = bob_ot_key(bob, r.r3);
    auto [k1, k2] = alice_ot_keys(alice);
    r.k1 = k1;
    r.k2 = k2;
    return r;
}

}  // namespace

TEST_CASE("ot worked values") {
    OtRun r = run_ot(tiny_params(), OtChoice::First, 5, 4, 7, 9);
    CHECK(r.r1.a == 16);   // 5^(3+5)
    CHECK(r.r2.b1 == 17);  // 20^19
    CHECK(r.r2.b2 == 17);  // 5^7
    CHECK(r.r3.m == 8);    // 17^4
    CHECK(r.kB.value == 16);  // 8^inv(9,22) = 8^5
    CHECK(r.k1.value == 16);  // 17^20
    CHECK(r.k2.value == 3);   // 17^((3-20+5)*4 mod 22) = 17^18
    CHECK(r.kB == r.k1);
}

TEST_CASE("ot choice binds the root") {
    GroupParams gp = tiny_params();
    auto [a, r1] = alice_ot_round1(gp, 5);
    auto [bob1, x] = bob_ot_round2(gp, r1, OtChoice::First, 7, 9);
    CHECK(bob1.gB == gp.g1);
    auto [bob2, y] = bob_ot_round2(gp, r1, OtChoice::Second, 7, 9);
    CHECK(bob2.gB == gp.g2);
}

TEST_CASE("ot identity exponents behave") {
    GroupParams gp = tiny_params();
    auto [alice, r1] = alice_ot_round1(gp, 5);
    auto [bob, r2] = bob_ot_round2(gp, r1, OtChoice::First, 7, 1);  // nB1 = 1
    auto r3 = alice_ot_round3(alice, r2, 1);                        // nA2 = 1
    CHECK(r3.m == r2.b1);
    CHECK(bob_ot_key(bob, r3).value == r3.m);  // kB = m^(1/1)
}

TEST_CASE("ot input contracts") {
    GroupParams gp = tiny_params();
    CHECK_THROWS_AS(alice_ot_round1(gp, 4), InvalidScalar);   // non-unit nA1
    CHECK_THROWS_AS(alice_ot_round1(gp, 11), InvalidScalar);
    auto [alice, r1] = alice_ot_round1(gp, 5);
    CHECK_THROWS_AS(bob_ot_round2(gp, r1, OtChoice::First, 7, 2), InvalidScalar);  // nB1
    CHECK_THROWS_AS(bob_ot_round2(gp, OtRound1{0}, OtChoice::First, 7, 9),
                    MalformedElement);
    CHECK_THROWS_AS(alice_ot_round3(alice, OtRound2{23, 17}, 4), MalformedElement);
}

TEST_CASE("ot correctness over the exhaustive unit sweep") {
    GroupParams gp = tiny_params();
    const auto units = unit_exponents(23);
    for (OtChoice choice : {OtChoice::First, OtChoice::Second})
        for (const BigNat& nA1 : units)
            for (const BigNat& nA2 : units)
                for (const BigNat& nB : units)
                    for (const BigNat& nB1 : units) {
                        OtRun r = run_ot(gp, choice, nA1, nA2, nB, nB1);
                        const SymmetricKey& want = choice == OtChoice::First ? r.k1 : r.k2;
                        const SymmetricKey& other = choice == OtChoice::First ? r.k2 : r.k1;
                        REQUIRE(r.kB == want);
                        REQUIRE(r.kB != other);
                        REQUIRE(r.k1 != r.k2);
                        // closed form for Bob's key
                        BigNat gB = choice == OtChoice::First ? gp.g1 : gp.g2;
                        BigNat e = mul_mod(mul_mod(add_mod(sub_mod(gp.g1, gB, 22), nA1, 22),
                                                   nB, 22),
                                           nA2, 22);
                        REQUIRE(r.kB.value == mod_exp(gp.x, e, gp.p));
                    }
}

TEST_CASE("ot sender view: b2 marginal is choice-independent, b1 is not") {
    // The b2 component of Bob's message never depends on the choice. The b1
    // component does leak it: with unit exponents, g1-gB+nA1 is odd for
    // choice=First and even for choice=Second, so b1 lands on a quadratic
    // non-residue exactly when Bob wants the first secret. An observer who
    // computes Legendre symbols reads the choice straight off the wire.
    GroupParams gp = tiny_params();
    const auto units = unit_exponents(23);
    const BigNat nA1 = 5;

    std::set<BigNat> qrs;
    for (BigNat g = 1; g < 23; ++g) qrs.insert(mul_mod(g, g, gp.p));

    std::multiset<BigNat> b2_first, b2_second;
    for (const BigNat& nB : units)
        for (const BigNat& nB1 : units) {
            auto [a, r1] = alice_ot_round1(gp, nA1);
            auto [bobF, rF] = bob_ot_round2(gp, r1, OtChoice::First, nB, nB1);
            auto [bobS, rS] = bob_ot_round2(gp, r1, OtChoice::Second, nB, nB1);
            b2_first.insert(rF.b2);
            b2_second.insert(rS.b2);
            CHECK(qrs.count(rF.b1) == 0);  // non-residue
            CHECK(qrs.count(rS.b1) == 1);  // residue
        }
    CHECK(b2_first == b2_second);
}

TEST_CASE("ot ciphertexts open only under the chosen key") {
    GroupParams gp = tiny_params();
    const Bytes s1 = to_bytes("first secret"), s2 = to_bytes("second secret");
    for (OtChoice choice : {OtChoice::First, OtChoice::Second}) {
        auto [alice, r1] = alice_ot_round1(gp, 5);
        alice.secrets = {s1, s2};
        auto [bob, r2] = bob_ot_round2(gp, r1, choice, 7, 9);
        auto r3 = alice_ot_round3(alice, r2, 4);
        SymmetricKey kB = bob_ot_key(bob, r3);
        auto [k1, k2] = alice_ot_keys(alice);
        OtCiphertexts cts = alice_ot_send(alice, k1, k2);

        const Bytes& want = choice == OtChoice::First ? s1 : s2;
        const Bytes& other = choice == OtChoice::First ? s2 : s1;
        CHECK(bob_ot_recv(cts, kB, choice) == want);
        Bytes other_attempt = choice == OtChoice::First
                                  ? f_decrypt(cts.ct2, kB, kCtxOtSecret2)
                                  : f_decrypt(cts.ct1, kB, kCtxOtSecret1);
        CHECK(other_attempt != other);
    }
}

TEST_CASE("ot handles empty secrets") {
    GroupParams gp = tiny_params();
    auto [alice, r1] = alice_ot_round1(gp, 5);
    alice.secrets = {{}, to_bytes("x")};
    auto [bob, r2] = bob_ot_round2(gp, r1, OtChoice::First, 7, 9);
    auto r3 = alice_ot_round3(alice, r2, 4);
    SymmetricKey kB = bob_ot_key(bob, r3);
    auto [k1, k2] = alice_ot_keys(alice);
    CHECK(bob_ot_recv(alice_ot_send(alice, k1, k2), kB, OtChoice::First).empty());
}

TEST_CASE("ot session over channels") {
    GroupParams gp = tiny_params();
    const Bytes s1 = to_bytes("route north"), s2 = to_bytes("route south");
    for (OtChoice choice : {OtChoice::First, OtChoice::Second}) {
        ChannelPair pair = memory_channel_pair();
        Rng master(53);
        OtAliceRole alice(gp, {s1, s2}, std::nullopt, master.fork());
        OtBobRole bob(gp, choice, std::nullopt, master.fork());
        const Bytes fp = params_hash(gp);

        Transcript ta, tb;
        std::thread t([&] { drive_session(bob, *pair.second, tb, fp); });
        drive_session(alice, *pair.first, ta, fp);
        t.join();

        REQUIRE(bob.received_secret());
        CHECK(*bob.received_secret() == (choice == OtChoice::First ? s1 : s2));
        CHECK(alice.done());
    }
}
