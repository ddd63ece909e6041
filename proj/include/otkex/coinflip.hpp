#pragma once

// Coin flipping on top of the oblivious key exchange: Bob wins the toss iff
// the key he computed equals Alice's. Bob declares his key outright (no
// confirm round), Alice adjudicates and reveals her choices, and Bob verifies
// the reveal against the recorded transcript. Bob never discloses gB or nB.

#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "otkex/bignat.hpp"
#include "otkex/errors.hpp"
#include "otkex/frame.hpp"
#include "otkex/mutual.hpp"
#include "otkex/numtheory.hpp"
#include "otkex/params.hpp"
#include "otkex/rng.hpp"
#include "otkex/session.hpp"
#include "otkex/transcript.hpp"

namespace otkex {

enum class CoinMsg : std::uint8_t {
    A1 = 1,
    B1 = 2,
    Declare = 3,
    Result = 4,
};

enum class CoinWinner : std::uint8_t { BobWins = 1, AliceWins = 2 };

struct CoinReveal {
    BigNat gA, nA1, nA2;
};

struct CoinDeclare {
    BigNat key;
};
struct CoinResult {
    CoinWinner winner;
    CoinReveal reveal;
};

namespace wire {

inline Frame to_coin_frame(const MutualA1& m) {
    PayloadWriter w;
    w.put_bignat(m.a1);
    w.put_bignat(m.a2);
    return make_frame(Proto::Coinflip, static_cast<std::uint8_t>(CoinMsg::A1), w.take());
}
inline Frame to_coin_frame(const MutualB1& m) {
    PayloadWriter w;
    w.put_bignat(m.b1);
    return make_frame(Proto::Coinflip, static_cast<std::uint8_t>(CoinMsg::B1), w.take());
}
inline Frame to_frame(const CoinDeclare& m) {
    PayloadWriter w;
    w.put_bignat(m.key);
    return make_frame(Proto::Coinflip, static_cast<std::uint8_t>(CoinMsg::Declare), w.take());
}
inline Frame to_frame(const CoinResult& m) {
    PayloadWriter w;
    w.put_u8(static_cast<std::uint8_t>(m.winner));
    w.put_bignat(m.reveal.gA);
    w.put_bignat(m.reveal.nA1);
    w.put_bignat(m.reveal.nA2);
    return make_frame(Proto::Coinflip, static_cast<std::uint8_t>(CoinMsg::Result), w.take());
}

inline CoinDeclare parse_declare(const Frame& f) {
    PayloadReader r(f.payload);
    CoinDeclare m{r.bignat()};
    r.expect_end();
    return m;
}
inline CoinResult parse_result(const Frame& f) {
    PayloadReader r(f.payload);
    const std::uint8_t w = r.u8();
    if (w != 1 && w != 2) throw MalformedElement("bad winner code");
    CoinResult m{static_cast<CoinWinner>(w), {r.bignat(), r.bignat(), r.bignat()}};
    r.expect_end();
    return m;
}

}  // namespace wire

// Bob reveals only the key value, none of his choices.
inline BigNat bob_declare(const BobMutualState& st) {
    if (!st.kPrime) throw ProtocolViolation("bob_declare before key computation");
    return st.kPrime->value;
}

inline std::pair<CoinWinner, CoinReveal> alice_adjudicate(const AliceMutualState& st,
                                                          const BigNat& declared) {
    if (!st.kA) throw ProtocolViolation("alice_adjudicate before key computation");
    detail::require_element(st.params, declared, "declared key");
    CoinWinner winner = declared == st.kA->value ? CoinWinner::BobWins : CoinWinner::AliceWins;
    return {winner, CoinReveal{st.gA, st.nA1, st.nA2}};
}

// Recomputes Alice's frames from the reveal, recomputes what her key must
// have been from Bob's own b1, and checks the verdict follows. Any mismatch,
// including a reveal that fails its own preconditions, verifies false.
inline bool bob_verify(const CoinReveal& reveal, CoinWinner verdict, const Transcript& transcript,
                       const BobMutualState& st) {
    const Frame* a1_frame =
        transcript.find(Direction::Received, Proto::Coinflip, static_cast<std::uint8_t>(CoinMsg::A1));
    if (!a1_frame) throw IncompleteTranscript("no received A1 frame in transcript");
    const Frame* b1_frame =
        transcript.find(Direction::Sent, Proto::Coinflip, static_cast<std::uint8_t>(CoinMsg::B1));
    if (!b1_frame) throw IncompleteTranscript("no sent B1 frame in transcript");

    PayloadReader ra(a1_frame->payload);
    const BigNat a1 = ra.bignat(), a2 = ra.bignat();
    PayloadReader rb(b1_frame->payload);
    const BigNat b1 = rb.bignat();

    const GroupParams& gp = st.params;
    const BigNat m = gp.p - 1;
    if (reveal.gA != gp.g1 && reveal.gA != gp.g2) return false;
    if (boost::multiprecision::gcd(reveal.nA1, m) != 1) return false;
    if (mod_exp(gp.x, add_mod(reveal.gA, reveal.nA1, m), gp.p) != a1) return false;
    if (mod_exp(gp.x, reveal.nA2, gp.p) != a2) return false;

    const BigNat kA = mod_exp(b1, mul_mod(reveal.nA2, mod_inv(reveal.nA1, m), m), gp.p);
    const CoinWinner expected =
        bob_declare(st) == kA ? CoinWinner::BobWins : CoinWinner::AliceWins;
    return verdict == expected;
}

// --------------------------------------------------------------------------
// Session roles. Ladder: a:A1 -> b:B1 + Declare -> a:Result.
// --------------------------------------------------------------------------

class CoinAliceRole final : public Role {
  public:
    CoinAliceRole(GroupParams gp, std::optional<OwnerChoices> choices, Rng rng)
        : gp_(std::move(gp)), choices_(std::move(choices)), rng_(rng) {}

    Proto protocol() const override { return Proto::Coinflip; }
    bool done() const override { return done_; }

    std::vector<Frame> start() override {
        OwnerChoices oc = choices_ ? *choices_ : detail::draw_owner(gp_, rng_);
        auto [st, a1] = alice_round1(gp_, oc.g, oc.n1, oc.n2);
        st_ = std::move(st);
        return {wire::to_coin_frame(a1)};
    }

    std::vector<Frame> on_frame(const Frame& f) override {
        switch (static_cast<CoinMsg>(f.msg_type)) {
            case CoinMsg::B1:
                if (st_->kA) break;
                alice_compute_key(*st_, wire::parse_b1(f));
                return {};
            case CoinMsg::Declare: {
                if (!st_->kA || done_) break;
                auto [winner, reveal] = alice_adjudicate(*st_, wire::parse_declare(f).key);
                winner_ = winner;
                done_ = true;
                return {wire::to_frame(CoinResult{winner, reveal})};
            }
            default:
                break;
        }
        throw ProtocolViolation("unexpected coinflip frame type " + std::to_string(f.msg_type));
    }

    std::optional<CoinWinner> winner() const { return winner_; }

  private:
    GroupParams gp_;
    std::optional<OwnerChoices> choices_;
    Rng rng_;
    std::optional<AliceMutualState> st_;
    std::optional<CoinWinner> winner_;
    bool done_ = false;
};

class CoinBobRole final : public Role {
  public:
    // `transcript` must be the same object drive_session records into; the
    // verification step replays it.
    CoinBobRole(GroupParams gp, std::optional<ReceiverChoices> choices, Rng rng,
                const Transcript* transcript)
        : gp_(std::move(gp)), choices_(std::move(choices)), rng_(rng), transcript_(transcript) {}

    Proto protocol() const override { return Proto::Coinflip; }
    bool done() const override { return done_; }

    std::vector<Frame> start() override { return {}; }

    std::vector<Frame> on_frame(const Frame& f) override {
        switch (static_cast<CoinMsg>(f.msg_type)) {
            case CoinMsg::A1: {
                if (st_) break;
                ReceiverChoices rc = choices_ ? *choices_ : detail::draw_receiver(gp_, rng_);
                // B1 goes on the coinflip protocol id so the transcript is
                // self-contained for verification
                auto [st, b1] = bob_round2(gp_, wire::parse_a1(f), rc.g, rc.n);
                st_ = std::move(st);
                return {wire::to_coin_frame(b1), wire::to_frame(CoinDeclare{bob_declare(*st_)})};
            }
            case CoinMsg::Result: {
                if (!st_ || done_) break;
                auto res = wire::parse_result(f);
                winner_ = res.winner;
                verified_ = bob_verify(res.reveal, res.winner, *transcript_, *st_);
                done_ = true;
                return {};
            }
            default:
                break;
        }
        throw ProtocolViolation("unexpected coinflip frame type " + std::to_string(f.msg_type));
    }

    std::optional<CoinWinner> winner() const { return winner_; }
    bool verified() const { return verified_; }

  private:
    GroupParams gp_;
    std::optional<ReceiverChoices> choices_;
    Rng rng_;
    const Transcript* transcript_;
    std::optional<BobMutualState> st_;
    std::optional<CoinWinner> winner_;
    bool verified_ = false;
    bool done_ = false;
};

}  // namespace otkex
