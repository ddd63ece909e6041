#pragma once

// Mutual exchange of secrets over an obliviously exchanged key.
//
// One direction transfers key kA from its owner (the "Alice" role) to the
// receiver (the "Bob" role), who ends up with the same key exactly when both
// picked the same root of c:
//
//   owner:    a1 = x^(gA+nA1), a2 = x^nA2
//   receiver: b1 = (a1 / x^gB)^nB,  kPrime = a2^nB
//   owner:    kA = b1^(nA2 / nA1)        (exponent arithmetic mod p-1)
//
// then a confirm round tells the receiver whether the keys matched, both
// sides exchange key claims (key bytes or their complement, masking their
// secret), and finally the secrets themselves encrypted under each owner
// key. The full session runs the exchange once in each direction.

#include <cstdint>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "otkex/bignat.hpp"
#include "otkex/channel.hpp"
#include "otkex/cipher.hpp"
#include "otkex/errors.hpp"
#include "otkex/frame.hpp"
#include "otkex/numtheory.hpp"
#include "otkex/params.hpp"
#include "otkex/rng.hpp"
#include "otkex/session.hpp"
#include "otkex/transcript.hpp"

namespace otkex {

enum class MutualMsg : std::uint8_t {
    A1 = 1,
    B1 = 2,
    Confirm = 3,
    ConfirmReply = 4,
    Claim = 5,
    SecretCt = 6,
};

struct MutualA1 {
    BigNat a1, a2;
};
struct MutualB1 {
    BigNat b1;
};
struct MutualConfirm {
    Bytes c;
};
struct MutualConfirmReply {
    Bytes y;
};
struct MutualClaim {
    Bytes masked;
};
struct MutualSecretCt {
    Bytes ct;
};

namespace wire {

inline Frame to_frame(const MutualA1& m) {
    PayloadWriter w;
    w.put_bignat(m.a1);
    w.put_bignat(m.a2);
    return make_frame(Proto::Mutual, static_cast<std::uint8_t>(MutualMsg::A1), w.take());
}
inline Frame to_frame(const MutualB1& m) {
    PayloadWriter w;
    w.put_bignat(m.b1);
    return make_frame(Proto::Mutual, static_cast<std::uint8_t>(MutualMsg::B1), w.take());
}
inline Frame to_frame(const MutualConfirm& m) {
    PayloadWriter w;
    w.put_bytes(m.c);
    return make_frame(Proto::Mutual, static_cast<std::uint8_t>(MutualMsg::Confirm), w.take());
}
inline Frame to_frame(const MutualConfirmReply& m) {
    PayloadWriter w;
    w.put_bytes(m.y);
    return make_frame(Proto::Mutual, static_cast<std::uint8_t>(MutualMsg::ConfirmReply),
                      w.take());
}
inline Frame to_frame(const MutualClaim& m) {
    PayloadWriter w;
    w.put_bytes(m.masked);
    return make_frame(Proto::Mutual, static_cast<std::uint8_t>(MutualMsg::Claim), w.take());
}
inline Frame to_frame(const MutualSecretCt& m) {
    PayloadWriter w;
    w.put_bytes(m.ct);
    return make_frame(Proto::Mutual, static_cast<std::uint8_t>(MutualMsg::SecretCt), w.take());
}

inline MutualA1 parse_a1(const Frame& f) {
    PayloadReader r(f.payload);
    MutualA1 m{r.bignat(), r.bignat()};
    r.expect_end();
    return m;
}
inline MutualB1 parse_b1(const Frame& f) {
    PayloadReader r(f.payload);
    MutualB1 m{r.bignat()};
    r.expect_end();
    return m;
}
inline MutualConfirm parse_confirm(const Frame& f) {
    PayloadReader r(f.payload);
    MutualConfirm m{r.bytes()};
    r.expect_end();
    return m;
}
inline MutualConfirmReply parse_confirm_reply(const Frame& f) {
    PayloadReader r(f.payload);
    MutualConfirmReply m{r.bytes()};
    r.expect_end();
    return m;
}
inline MutualClaim parse_claim(const Frame& f) {
    PayloadReader r(f.payload);
    MutualClaim m{r.bytes()};
    r.expect_end();
    return m;
}
inline MutualSecretCt parse_secret_ct(const Frame& f) {
    PayloadReader r(f.payload);
    MutualSecretCt m{r.bytes()};
    r.expect_end();
    return m;
}

}  // namespace wire

enum class AlicePhase : std::uint8_t { Init, Sent1, HaveKey, Confirmed, Claimed, Done };
enum class BobPhase : std::uint8_t { Init, Sent2, Challenged, KnowsMatch, Claimed, Done };

// Key owner's half of one exchange direction.
struct AliceMutualState {
    GroupParams params;
    BigNat gA, nA1, nA2;
    AlicePhase phase = AlicePhase::Init;
    std::optional<SymmetricKey> kA;
    Bytes secret;
};

// Receiver's half of one exchange direction.
struct BobMutualState {
    GroupParams params;
    BigNat gB, nB;
    BobPhase phase = BobPhase::Init;
    std::optional<SymmetricKey> kPrime;
    Bytes confirmMsg;
    bool matched = false;
    Bytes secret;
};

namespace detail {

inline void require_root(const GroupParams& gp, const BigNat& g, const char* who) {
    if (g != gp.g1 && g != gp.g2)
        throw InvalidScalar(std::string(who) + " must be one of the agreed roots");
}

inline void require_element(const GroupParams& gp, const BigNat& v, const char* what) {
    if (v < 1 || v >= gp.p)
        throw MalformedElement(std::string(what) + " outside [1, p-1]");
}

inline void require_unit(const GroupParams& gp, const BigNat& n, const char* what) {
    if (boost::multiprecision::gcd(n, gp.p - 1) != 1)
        throw InvalidScalar(std::string(what) + " is not a unit mod p-1");
}

}  // namespace detail

inline std::pair<AliceMutualState, MutualA1> alice_round1(const GroupParams& gp, const BigNat& gA,
                                                          const BigNat& nA1, const BigNat& nA2) {
    detail::require_root(gp, gA, "gA");
    detail::require_unit(gp, nA1, "nA1");
    const BigNat m = gp.p - 1;
    MutualA1 msg{mod_exp(gp.x, add_mod(gA, nA1, m), gp.p), mod_exp(gp.x, nA2, gp.p)};
    AliceMutualState st{gp, gA, nA1, nA2, AlicePhase::Sent1, std::nullopt, {}};
    return {std::move(st), std::move(msg)};
}

inline std::pair<BobMutualState, MutualB1> bob_round2(const GroupParams& gp, const MutualA1& msg,
                                                      const BigNat& gB, const BigNat& nB) {
    detail::require_root(gp, gB, "gB");
    detail::require_element(gp, msg.a1, "a1");
    detail::require_element(gp, msg.a2, "a2");
    BigNat base = mul_mod(msg.a1, mod_inv(mod_exp(gp.x, gB, gp.p), gp.p), gp.p);
    MutualB1 out{mod_exp(base, nB, gp.p)};
    BobMutualState st{gp, gB, nB, BobPhase::Sent2,
                      group_key(mod_exp(msg.a2, nB, gp.p), gp), {}, false, {}};
    return {std::move(st), std::move(out)};
}

inline SymmetricKey alice_compute_key(AliceMutualState& st, const MutualB1& msg) {
    if (st.phase != AlicePhase::Sent1) throw ProtocolViolation("alice_compute_key out of phase");
    detail::require_element(st.params, msg.b1, "b1");
    const BigNat m = st.params.p - 1;
    const BigNat e = mul_mod(st.nA2, mod_inv(st.nA1, m), m);
    st.kA = group_key(mod_exp(msg.b1, e, st.params.p), st.params);
    st.phase = AlicePhase::HaveKey;
    return *st.kA;
}

inline MutualConfirm bob_challenge(BobMutualState& st, Rng& rng) {
    if (st.phase != BobPhase::Sent2) throw ProtocolViolation("bob_challenge out of phase");
    st.confirmMsg = rng.bytes(32);
    st.phase = BobPhase::Challenged;
    return {f_encrypt(st.confirmMsg, *st.kPrime, kCtxConfirm)};
}

inline MutualConfirmReply alice_confirm_reply(const SymmetricKey& kA, const MutualConfirm& msg) {
    return {f_decrypt(msg.c, kA, kCtxConfirm)};
}

inline bool bob_check(BobMutualState& st, const MutualConfirmReply& msg) {
    if (st.phase != BobPhase::Challenged) throw ProtocolViolation("bob_check out of phase");
    st.matched = msg.y == st.confirmMsg;
    st.phase = BobPhase::KnowsMatch;
    return st.matched;
}

// The owner always holds its own key, so its claim is always "matched".
inline MutualClaim claim(AliceMutualState& st) {
    if (st.phase != AlicePhase::HaveKey && st.phase != AlicePhase::Confirmed)
        throw ProtocolViolation("alice claim out of phase");
    st.phase = AlicePhase::Claimed;
    return {mask_secret(st.secret, make_claim(*st.kA, true))};
}

inline MutualClaim claim(BobMutualState& st) {
    if (st.phase != BobPhase::KnowsMatch) throw ProtocolViolation("bob claim out of phase");
    st.phase = BobPhase::Claimed;
    return {mask_secret(st.secret, make_claim(*st.kPrime, st.matched))};
}

// In the bidirectional session a party claims from its receiver state but
// encrypts its final ciphertext from its owner state, so the owner state may
// arrive here straight from HaveKey/Confirmed.
inline MutualSecretCt final_exchange(AliceMutualState& st) {
    if (st.phase == AlicePhase::Init || st.phase == AlicePhase::Sent1 ||
        st.phase == AlicePhase::Done)
        throw ProtocolViolation("alice final out of phase");
    st.phase = AlicePhase::Done;
    return {f_encrypt(st.secret, *st.kA, kCtxSecret)};
}

inline MutualSecretCt final_exchange(BobMutualState& st) {
    if (st.phase != BobPhase::KnowsMatch && st.phase != BobPhase::Claimed)
        throw ProtocolViolation("bob final out of phase");
    st.phase = BobPhase::Done;
    return {f_encrypt(st.secret, *st.kPrime, kCtxSecret)};
}

inline Bytes open_secret(const MutualSecretCt& msg, const SymmetricKey& key) {
    return f_decrypt(msg.ct, key, kCtxSecret);
}

// After an abort, the wronged party unmasks the cheater's claim with the key
// it owns. Correct exactly when the cheater's claim used the matched key —
// and a cheater who aborted after taking the final ciphertext did match.
inline Bytes recover_on_cheat(const MutualClaim& claim_msg, const SymmetricKey& known_key) {
    return mask_secret(claim_msg.masked, make_claim(known_key, true));
}

// ---------------------------------------------------------------------------
// Bidirectional session roles.
//
// Frame ladder (a = initiator/Alice, b = responder/Bob):
//   a1:A1  ->   [direction 1: Alice owns kA]
//   <- b:B1, b:Confirm
//   a:ConfirmReply ->
//   <- b:A1'        [direction 2: Bob owns kB]
//   a:B1', a:Confirm' ->
//   <- b:ConfirmReply'
//   a:Claim ->
//   <- b:Claim
//   a:SecretCt ->
//   <- b:SecretCt
// ---------------------------------------------------------------------------

struct OwnerChoices {
    BigNat g, n1, n2;
};
struct ReceiverChoices {
    BigNat g, n;
};

// Per-party forced choices; anything unset is drawn from the role's rng.
struct MutualPartyChoices {
    std::optional<OwnerChoices> owner;
    std::optional<ReceiverChoices> receiver;
};

namespace detail {

inline OwnerChoices draw_owner(const GroupParams& gp, Rng& rng) {
    return {rng.bit() ? gp.g2 : gp.g1, rand_unit_exponent(gp.p, rng),
            rand_unit_exponent(gp.p, rng)};
}

inline ReceiverChoices draw_receiver(const GroupParams& gp, Rng& rng) {
    return {rng.bit() ? gp.g2 : gp.g1, rand_unit_exponent(gp.p, rng)};
}

}  // namespace detail

class MutualRoleBase : public Role {
  public:
    Proto protocol() const override { return Proto::Mutual; }
    bool done() const override { return step_ == kDone; }

    // Set when this party's receiving direction matched and the final
    // ciphertext decrypted.
    bool received_key_matched() const { return recv_matched_; }
    const std::optional<Bytes>& peer_secret() const { return peer_secret_; }
    const std::optional<MutualClaim>& peer_claim() const { return peer_claim_; }

  protected:
    static constexpr int kDone = 100;

    int step_ = 0;
    bool recv_matched_ = false;
    std::optional<Bytes> peer_secret_;
    std::optional<MutualClaim> peer_claim_;

    static MutualMsg msg_type(const Frame& f) {
        return static_cast<MutualMsg>(f.msg_type);
    }

    [[noreturn]] static void unexpected(const Frame& f) {
        throw ProtocolViolation("unexpected mutual frame type " + std::to_string(f.msg_type));
    }

    void expect(const Frame& f, MutualMsg want) {
        if (msg_type(f) != want) unexpected(f);
    }
};

class MutualAliceRole final : public MutualRoleBase {
  public:
    MutualAliceRole(GroupParams gp, MutualPartyChoices choices, Bytes secret, Rng rng)
        : gp_(std::move(gp)), choices_(std::move(choices)), secret_(std::move(secret)),
          rng_(rng) {}

    std::vector<Frame> start() override {
        OwnerChoices oc = choices_.owner ? *choices_.owner : detail::draw_owner(gp_, rng_);
        auto [st, a1] = alice_round1(gp_, oc.g, oc.n1, oc.n2);
        own_ = std::move(st);
        own_->secret = secret_;
        step_ = 1;
        return {wire::to_frame(a1)};
    }

    std::vector<Frame> on_frame(const Frame& f) override {
        switch (step_) {
            case 1:  // direction 1 key computation
                expect(f, MutualMsg::B1);
                alice_compute_key(*own_, wire::parse_b1(f));
                step_ = 2;
                return {};
            case 2: {
                expect(f, MutualMsg::Confirm);
                auto reply = alice_confirm_reply(*own_->kA, wire::parse_confirm(f));
                own_->phase = AlicePhase::Confirmed;
                step_ = 3;
                return {wire::to_frame(reply)};
            }
            case 3: {  // direction 2 opens: Bob's A1'
                expect(f, MutualMsg::A1);
                ReceiverChoices rc =
                    choices_.receiver ? *choices_.receiver : detail::draw_receiver(gp_, rng_);
                auto [st, b1] = bob_round2(gp_, wire::parse_a1(f), rc.g, rc.n);
                recv_ = std::move(st);
                recv_->secret = secret_;
                auto confirm = bob_challenge(*recv_, rng_);
                step_ = 4;
                return {wire::to_frame(b1), wire::to_frame(confirm)};
            }
            case 4: {
                expect(f, MutualMsg::ConfirmReply);
                recv_matched_ = bob_check(*recv_, wire::parse_confirm_reply(f));
                step_ = 5;
                return {wire::to_frame(claim(*recv_))};
            }
            case 5:
                expect(f, MutualMsg::Claim);
                peer_claim_ = wire::parse_claim(f);
                step_ = 6;
                return {wire::to_frame(final_exchange(*own_))};
            case 6: {
                expect(f, MutualMsg::SecretCt);
                if (recv_matched_)
                    peer_secret_ = open_secret(wire::parse_secret_ct(f), *recv_->kPrime);
                step_ = kDone;
                return {};
            }
            default:
                unexpected(f);
        }
    }

    const AliceMutualState& owner_state() const { return *own_; }
    const BobMutualState& receiver_state() const { return *recv_; }

  private:
    GroupParams gp_;
    MutualPartyChoices choices_;
    Bytes secret_;
    Rng rng_;
    std::optional<AliceMutualState> own_;   // direction 1, key kA
    std::optional<BobMutualState> recv_;    // direction 2, receives kB
};

class MutualBobRole final : public MutualRoleBase {
  public:
    MutualBobRole(GroupParams gp, MutualPartyChoices choices, Bytes secret, Rng rng,
                  bool abort_before_final = false)
        : gp_(std::move(gp)), choices_(std::move(choices)), secret_(std::move(secret)),
          rng_(rng), abort_before_final_(abort_before_final) {}

    std::vector<Frame> start() override {
        step_ = 1;
        return {};
    }

    std::vector<Frame> on_frame(const Frame& f) override {
        switch (step_) {
            case 1: {  // direction 1: receive Alice's A1
                expect(f, MutualMsg::A1);
                ReceiverChoices rc =
                    choices_.receiver ? *choices_.receiver : detail::draw_receiver(gp_, rng_);
                auto [st, b1] = bob_round2(gp_, wire::parse_a1(f), rc.g, rc.n);
                recv_ = std::move(st);
                recv_->secret = secret_;
                auto confirm = bob_challenge(*recv_, rng_);
                step_ = 2;
                return {wire::to_frame(b1), wire::to_frame(confirm)};
            }
            case 2: {
                expect(f, MutualMsg::ConfirmReply);
                recv_matched_ = bob_check(*recv_, wire::parse_confirm_reply(f));
                // direction 2: now Bob owns a key of his own
                OwnerChoices oc =
                    choices_.owner ? *choices_.owner : detail::draw_owner(gp_, rng_);
                auto [st, a1] = alice_round1(gp_, oc.g, oc.n1, oc.n2);
                own_ = std::move(st);
                own_->secret = secret_;
                step_ = 3;
                return {wire::to_frame(a1)};
            }
            case 3:
                expect(f, MutualMsg::B1);
                alice_compute_key(*own_, wire::parse_b1(f));
                step_ = 4;
                return {};
            case 4: {
                expect(f, MutualMsg::Confirm);
                auto reply = alice_confirm_reply(*own_->kA, wire::parse_confirm(f));
                own_->phase = AlicePhase::Confirmed;
                step_ = 5;
                return {wire::to_frame(reply)};
            }
            case 5:
                expect(f, MutualMsg::Claim);
                peer_claim_ = wire::parse_claim(f);
                step_ = 6;
                return {wire::to_frame(claim(*recv_))};
            case 6: {
                expect(f, MutualMsg::SecretCt);
                if (recv_matched_)
                    peer_secret_ = open_secret(wire::parse_secret_ct(f), *recv_->kPrime);
                step_ = kDone;
                if (abort_before_final_) return {};  // takes the secret and walks away
                return {wire::to_frame(final_exchange(*own_))};
            }
            default:
                unexpected(f);
        }
    }

    const AliceMutualState& owner_state() const { return *own_; }
    const BobMutualState& receiver_state() const { return *recv_; }

  private:
    GroupParams gp_;
    MutualPartyChoices choices_;
    Bytes secret_;
    Rng rng_;
    bool abort_before_final_;
    std::optional<BobMutualState> recv_;    // direction 1, receives kA
    std::optional<AliceMutualState> own_;   // direction 2, key kB
};

struct SessionOutcome {
    bool aliceGotSB = false;
    bool bobGotSA = false;
    Transcript aliceTranscript;
    Transcript bobTranscript;
};

// Full bidirectional run over a channel pair, one thread per role. Outcome
// flags compare the decrypted bytes against the true secrets.
inline SessionOutcome run_mutual(const GroupParams& gp, const MutualPartyChoices& alice_choices,
                                 ByteView secret_a, const MutualPartyChoices& bob_choices,
                                 ByteView secret_b, Channel& alice_ch, Channel& bob_ch,
                                 std::uint64_t seed) {
    Rng master(seed);
    MutualAliceRole alice(gp, alice_choices, Bytes(secret_a.begin(), secret_a.end()),
                          master.fork());
    MutualBobRole bob(gp, bob_choices, Bytes(secret_b.begin(), secret_b.end()), master.fork());

    SessionOutcome out;
    const Bytes fp = params_hash(gp);
    std::exception_ptr bob_error;
    std::thread bob_thread([&] {
        try {
            drive_session(bob, bob_ch, out.bobTranscript, fp);
        } catch (...) {
            bob_error = std::current_exception();
        }
    });
    std::exception_ptr alice_error;
    try {
        drive_session(alice, alice_ch, out.aliceTranscript, fp);
    } catch (...) {
        alice_error = std::current_exception();
    }
    bob_thread.join();
    if (alice_error) std::rethrow_exception(alice_error);
    if (bob_error) std::rethrow_exception(bob_error);

    out.aliceGotSB = alice.peer_secret() &&
                     *alice.peer_secret() == Bytes(secret_b.begin(), secret_b.end());
    out.bobGotSA = bob.peer_secret() &&
                   *bob.peer_secret() == Bytes(secret_a.begin(), secret_a.end());
    return out;
}

inline SessionOutcome run_mutual(const GroupParams& gp, const MutualPartyChoices& alice_choices,
                                 ByteView secret_a, const MutualPartyChoices& bob_choices,
                                 ByteView secret_b, std::uint64_t seed) {
    ChannelPair pair = memory_channel_pair();
    return run_mutual(gp, alice_choices, secret_a, bob_choices, secret_b, *pair.first,
                      *pair.second, seed);
}

}  // namespace otkex
