#pragma once

// Statistical harness: seeded trial loops measuring the protocols' claimed
// probabilities (match rate 1/2, double failure 1/4, coin fairness 1/2,
// imposter acceptance 2^-t), with optional per-trial CSV output.

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

#include "otkex/coinflip.hpp"
#include "otkex/mutual.hpp"
#include "otkex/ot12.hpp"
#include "otkex/params.hpp"
#include "otkex/rng.hpp"
#include "otkex/zkp.hpp"

namespace otkex {

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw Error("cannot open csv file '" + path + "'");
        out_ << "trial,protocol,matched,bob_wins,rounds,accepted\n";
    }

    void row(std::uint64_t trial, const std::string& protocol, std::optional<bool> matched,
             std::optional<bool> bob_wins, std::optional<unsigned> rounds,
             std::optional<bool> accepted) {
        auto b = [](std::optional<bool> v) { return v ? (*v ? "1" : "0") : ""; };
        out_ << trial << ',' << protocol << ',' << b(matched) << ',' << b(bob_wins) << ',';
        if (rounds) out_ << *rounds;
        out_ << ',' << b(accepted) << '\n';
    }

  private:
    std::ofstream out_;
};

struct MutualStats {
    std::uint64_t trials = 0;
    std::uint64_t bob_got_sa = 0;    // direction-1 match: Bob received K_A
    std::uint64_t alice_got_sb = 0;  // direction-2 match
    std::uint64_t both_failed = 0;

    double match_rate() const { return double(bob_got_sa) / double(trials); }
    double both_failed_rate() const { return double(both_failed) / double(trials); }
};

inline MutualStats simulate_mutual(const GroupParams& gp, std::uint64_t trials,
                                   std::uint64_t seed, CsvWriter* csv = nullptr) {
    Rng master(seed);
    MutualStats s;
    s.trials = trials;
    for (std::uint64_t i = 0; i < trials; ++i) {
        Rng trial_rng = master.fork();
        Bytes sa = trial_rng.bytes(16), sb = trial_rng.bytes(16);
        SessionOutcome out = run_mutual(gp, {}, sa, {}, sb, trial_rng.next_u64());
        s.bob_got_sa += out.bobGotSA;
        s.alice_got_sb += out.aliceGotSB;
        s.both_failed += !out.bobGotSA && !out.aliceGotSB;
        if (csv) csv->row(i, "mutual", out.bobGotSA, std::nullopt, std::nullopt, std::nullopt);
    }
    return s;
}

struct CoinStats {
    std::uint64_t trials = 0;
    std::uint64_t bob_wins = 0;

    double bob_win_rate() const { return double(bob_wins) / double(trials); }
};

// Key-exchange rounds 1-6 plus declare/adjudicate, no channel machinery.
inline CoinStats simulate_coinflip(const GroupParams& gp, std::uint64_t trials,
                                   std::uint64_t seed, CsvWriter* csv = nullptr) {
    Rng master(seed);
    CoinStats s;
    s.trials = trials;
    for (std::uint64_t i = 0; i < trials; ++i) {
        Rng rng = master.fork();
        OwnerChoices oc = detail::draw_owner(gp, rng);
        ReceiverChoices rc = detail::draw_receiver(gp, rng);
        auto [alice, a1] = alice_round1(gp, oc.g, oc.n1, oc.n2);
        auto [bob, b1] = bob_round2(gp, a1, rc.g, rc.n);
        alice_compute_key(alice, b1);
        auto [winner, reveal] = alice_adjudicate(alice, bob_declare(bob));
        const bool bob_won = winner == CoinWinner::BobWins;
        s.bob_wins += bob_won;
        if (csv) csv->row(i, "coinflip", std::nullopt, bob_won, std::nullopt, std::nullopt);
    }
    return s;
}

struct OtStats {
    std::uint64_t trials = 0;
    std::uint64_t chosen_recovered = 0;
    std::uint64_t unchosen_leaked = 0;  // decryption of the other ct equals the other secret
};

inline OtStats simulate_ot(const GroupParams& gp, std::uint64_t trials, std::uint64_t seed,
                           CsvWriter* csv = nullptr) {
    Rng master(seed);
    OtStats s;
    s.trials = trials;
    for (std::uint64_t i = 0; i < trials; ++i) {
        Rng rng = master.fork();
        Bytes s1 = rng.bytes(32), s2 = rng.bytes(32);
        OtChoice choice = rng.bit() ? OtChoice::Second : OtChoice::First;
        BigNat nA1 = rand_unit_exponent(gp.p, rng), nA2 = rand_unit_exponent(gp.p, rng);
        BigNat nB = rand_unit_exponent(gp.p, rng), nB1 = rand_unit_exponent(gp.p, rng);

        auto [alice, r1] = alice_ot_round1(gp, nA1);
        alice.secrets = {s1, s2};
        auto [bob, r2] = bob_ot_round2(gp, r1, choice, nB, nB1);
        auto r3 = alice_ot_round3(alice, r2, nA2);
        SymmetricKey kB = bob_ot_key(bob, r3);
        auto [k1, k2] = alice_ot_keys(alice);
        OtCiphertexts cts = alice_ot_send(alice, k1, k2);

        const Bytes& want = choice == OtChoice::First ? s1 : s2;
        const Bytes& other = choice == OtChoice::First ? s2 : s1;
        const bool got = bob_ot_recv(cts, kB, choice) == want;
        // opening the other ciphertext with kB must NOT yield the other secret
        Bytes other_attempt = choice == OtChoice::First ? f_decrypt(cts.ct2, kB, kCtxOtSecret2)
                                                        : f_decrypt(cts.ct1, kB, kCtxOtSecret1);
        s.chosen_recovered += got;
        s.unchosen_leaked += other_attempt == other;
        if (csv) csv->row(i, "ot", got, std::nullopt, std::nullopt, std::nullopt);
    }
    return s;
}

struct CheatStats {
    std::uint64_t trials = 0;
    std::uint64_t recovered = 0;
};

// Direction-1 exchange followed by claims; Bob aborts before the final
// ciphertext and Alice attempts recovery from his claim with her own key.
inline CheatStats simulate_cheat(const GroupParams& gp, std::uint64_t trials, std::uint64_t seed,
                                 bool force_match, CsvWriter* csv = nullptr) {
    Rng master(seed);
    CheatStats s;
    s.trials = trials;
    for (std::uint64_t i = 0; i < trials; ++i) {
        Rng rng = master.fork();
        Bytes sb = rng.bytes(32);
        OwnerChoices oc = detail::draw_owner(gp, rng);
        BigNat gB = force_match ? oc.g : (oc.g == gp.g1 ? gp.g2 : gp.g1);
        BigNat nB = rand_unit_exponent(gp.p, rng);

        auto [alice, a1] = alice_round1(gp, oc.g, oc.n1, oc.n2);
        auto [bob, b1] = bob_round2(gp, a1, gB, nB);
        bob.secret = sb;
        SymmetricKey kA = alice_compute_key(alice, b1);
        auto confirm = bob_challenge(bob, rng);
        bob_check(bob, alice_confirm_reply(kA, confirm));
        MutualClaim bob_claim = claim(bob);

        const bool got = recover_on_cheat(bob_claim, kA) == sb;
        s.recovered += got;
        if (csv) csv->row(i, "mutual-cheat", bob.matched, std::nullopt, std::nullopt, got);
    }
    return s;
}

struct ZkStats {
    std::uint64_t trials = 0;
    std::uint64_t accepted = 0;

    double accept_rate() const { return double(accepted) / double(trials); }
};

inline ZkStats simulate_zkp(const ZkPublic& pub, const std::optional<BigNat>& honest_e,
                            unsigned t, std::uint64_t trials, std::uint64_t seed,
                            CsvWriter* csv = nullptr) {
    Rng master(seed);
    ZkStats s;
    s.trials = trials;
    for (std::uint64_t i = 0; i < trials; ++i) {
        Rng rng = master.fork();
        bool ok;
        if (honest_e) {
            HonestProver prover(*honest_e);
            ok = run_protocol(prover, pub, t, rng);
        } else {
            ImposterProver prover;
            ok = run_protocol(prover, pub, t, rng);
        }
        s.accepted += ok;
        if (csv) csv->row(i, "zkp", std::nullopt, std::nullopt, t, ok);
    }
    return s;
}

}  // namespace otkex
