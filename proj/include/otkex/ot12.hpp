#pragma once

// 1-out-of-2 oblivious transfer. Alice holds secrets (S1, S2) keyed to the
// announced binding K1<->g1, K2<->g2; Bob picks a root and ends up able to
// open exactly the matching ciphertext:
//
//   alice: a  = x^(g1+nA1)
//   bob:   b1 = (a / x^gB)^(nB*nB1),  b2 = x^nB
//   alice: m  = b1^nA2
//   bob:   kB = m^(1/nB1) = (a / x^gB)^(nB*nA2)
//   alice: K1 = b2^(nA1*nA2),  K2 = b2^((g1-g2+nA1)*nA2)
//
// All exponent arithmetic mod p-1.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "otkex/bignat.hpp"
#include "otkex/cipher.hpp"
#include "otkex/errors.hpp"
#include "otkex/frame.hpp"
#include "otkex/mutual.hpp"
#include "otkex/numtheory.hpp"
#include "otkex/params.hpp"
#include "otkex/rng.hpp"
#include "otkex/session.hpp"

namespace otkex {

enum class OtChoice : std::uint8_t { First = 1, Second = 2 };

// Announced in the session hello.
inline constexpr std::uint8_t kOtKeyBinding = 1;  // K1 <-> g1, K2 <-> g2

enum class OtMsg : std::uint8_t {
    Round1 = 1,
    Round2 = 2,
    Round3 = 3,
    Ciphertexts = 4,
};

struct OtRound1 {
    BigNat a;
};
struct OtRound2 {
    BigNat b1, b2;
};
struct OtRound3 {
    BigNat m;
};
struct OtCiphertexts {
    Bytes ct1, ct2;
};

namespace wire {

inline Frame to_frame(const OtRound1& m) {
    PayloadWriter w;
    w.put_bignat(m.a);
    return make_frame(Proto::Ot12, static_cast<std::uint8_t>(OtMsg::Round1), w.take());
}
inline Frame to_frame(const OtRound2& m) {
    PayloadWriter w;
    w.put_bignat(m.b1);
    w.put_bignat(m.b2);
    return make_frame(Proto::Ot12, static_cast<std::uint8_t>(OtMsg::Round2), w.take());
}
inline Frame to_frame(const OtRound3& m) {
    PayloadWriter w;
    w.put_bignat(m.m);
    return make_frame(Proto::Ot12, static_cast<std::uint8_t>(OtMsg::Round3), w.take());
}
inline Frame to_frame(const OtCiphertexts& m) {
    PayloadWriter w;
    w.put_bytes(m.ct1);
    w.put_bytes(m.ct2);
    return make_frame(Proto::Ot12, static_cast<std::uint8_t>(OtMsg::Ciphertexts), w.take());
}

inline OtRound1 parse_ot1(const Frame& f) {
    PayloadReader r(f.payload);
    OtRound1 m{r.bignat()};
    r.expect_end();
    return m;
}
inline OtRound2 parse_ot2(const Frame& f) {
    PayloadReader r(f.payload);
    OtRound2 m{r.bignat(), r.bignat()};
    r.expect_end();
    return m;
}
inline OtRound3 parse_ot3(const Frame& f) {
    PayloadReader r(f.payload);
    OtRound3 m{r.bignat()};
    r.expect_end();
    return m;
}
inline OtCiphertexts parse_ot_cts(const Frame& f) {
    PayloadReader r(f.payload);
    OtCiphertexts m;
    m.ct1 = r.bytes();
    m.ct2 = r.bytes();
    r.expect_end();
    return m;
}

}  // namespace wire

enum class OtAlicePhase : std::uint8_t { Init, Sent1, Sent3, Done };
enum class OtBobPhase : std::uint8_t { Init, Sent2, HaveKey, Done };

struct OtAliceState {
    GroupParams params;
    BigNat nA1, nA2;
    BigNat b2;  // Bob's x^nB, retained for the key computations
    OtAlicePhase phase = OtAlicePhase::Init;
    std::pair<Bytes, Bytes> secrets;
};

struct OtBobState {
    GroupParams params;
    OtChoice choice;
    BigNat gB, nB, nB1;
    OtBobPhase phase = OtBobPhase::Init;
    std::optional<SymmetricKey> kB;
};

inline std::pair<OtAliceState, OtRound1> alice_ot_round1(const GroupParams& gp,
                                                         const BigNat& nA1) {
    detail::require_unit(gp, nA1, "nA1");
    const BigNat m = gp.p - 1;
    // always g1 here: the roots enter through Bob's divisor
    OtRound1 msg{mod_exp(gp.x, add_mod(gp.g1, nA1, m), gp.p)};
    OtAliceState st{gp, nA1, 0, 0, OtAlicePhase::Sent1, {}};
    return {std::move(st), std::move(msg)};
}

inline std::pair<OtBobState, OtRound2> bob_ot_round2(const GroupParams& gp, const OtRound1& msg,
                                                     OtChoice choice, const BigNat& nB,
                                                     const BigNat& nB1) {
    detail::require_element(gp, msg.a, "a");
    detail::require_unit(gp, nB1, "nB1");
    const BigNat m = gp.p - 1;
    const BigNat gB = choice == OtChoice::First ? gp.g1 : gp.g2;
    BigNat base = mul_mod(msg.a, mod_inv(mod_exp(gp.x, gB, gp.p), gp.p), gp.p);
    OtRound2 out{mod_exp(base, mul_mod(nB, nB1, m), gp.p), mod_exp(gp.x, nB, gp.p)};
    OtBobState st{gp, choice, gB, nB, nB1, OtBobPhase::Sent2, std::nullopt};
    return {std::move(st), std::move(out)};
}

inline OtRound3 alice_ot_round3(OtAliceState& st, const OtRound2& msg, const BigNat& nA2) {
    if (st.phase != OtAlicePhase::Sent1) throw ProtocolViolation("alice_ot_round3 out of phase");
    detail::require_element(st.params, msg.b1, "b1");
    detail::require_element(st.params, msg.b2, "b2");
    st.nA2 = nA2;
    st.b2 = msg.b2;
    st.phase = OtAlicePhase::Sent3;
    return {mod_exp(msg.b1, nA2, st.params.p)};
}

inline SymmetricKey bob_ot_key(OtBobState& st, const OtRound3& msg) {
    if (st.phase != OtBobPhase::Sent2) throw ProtocolViolation("bob_ot_key out of phase");
    detail::require_element(st.params, msg.m, "m");
    const BigNat m = st.params.p - 1;
    st.kB = group_key(mod_exp(msg.m, mod_inv(st.nB1, m), st.params.p), st.params);
    st.phase = OtBobPhase::HaveKey;
    return *st.kB;
}

inline std::pair<SymmetricKey, SymmetricKey> alice_ot_keys(const OtAliceState& st) {
    if (st.phase != OtAlicePhase::Sent3 && st.phase != OtAlicePhase::Done)
        throw ProtocolViolation("alice_ot_keys out of phase");
    const GroupParams& gp = st.params;
    const BigNat m = gp.p - 1;
    BigNat k1 = mod_exp(st.b2, mul_mod(st.nA1, st.nA2, m), gp.p);
    BigNat e2 = mul_mod(add_mod(sub_mod(gp.g1, gp.g2, m), st.nA1, m), st.nA2, m);
    BigNat k2 = mod_exp(st.b2, e2, gp.p);
    return {group_key(k1, gp), group_key(k2, gp)};
}

inline OtCiphertexts alice_ot_send(OtAliceState& st, const SymmetricKey& k1,
                                   const SymmetricKey& k2) {
    if (st.phase != OtAlicePhase::Sent3) throw ProtocolViolation("alice_ot_send out of phase");
    st.phase = OtAlicePhase::Done;
    return {f_encrypt(st.secrets.first, k1, kCtxOtSecret1),
            f_encrypt(st.secrets.second, k2, kCtxOtSecret2)};
}

// Bob opens only the ciphertext bound to his choice.
inline Bytes bob_ot_recv(const OtCiphertexts& msg, const SymmetricKey& kB, OtChoice choice) {
    return choice == OtChoice::First ? f_decrypt(msg.ct1, kB, kCtxOtSecret1)
                                     : f_decrypt(msg.ct2, kB, kCtxOtSecret2);
}

// --------------------------------------------------------------------------
// Session roles. Ladder: a:Round1 -> b:Round2 -> a:Round3 + Ciphertexts.
// --------------------------------------------------------------------------

struct OtSenderChoices {
    BigNat n1, n2;
};
struct OtReceiverChoices {
    BigNat n, n1;
};

class OtAliceRole final : public Role {
  public:
    OtAliceRole(GroupParams gp, std::pair<Bytes, Bytes> secrets,
                std::optional<OtSenderChoices> choices, Rng rng)
        : gp_(std::move(gp)), secrets_(std::move(secrets)), choices_(std::move(choices)),
          rng_(rng) {}

    Proto protocol() const override { return Proto::Ot12; }
    std::uint8_t hello_extra() const override { return kOtKeyBinding; }
    bool done() const override { return done_; }

    std::vector<Frame> start() override {
        if (!choices_)
            choices_ = OtSenderChoices{rand_unit_exponent(gp_.p, rng_),
                                       rand_unit_exponent(gp_.p, rng_)};
        auto [st, r1] = alice_ot_round1(gp_, choices_->n1);
        st_ = std::move(st);
        st_->secrets = secrets_;
        return {wire::to_frame(r1)};
    }

    std::vector<Frame> on_frame(const Frame& f) override {
        if (static_cast<OtMsg>(f.msg_type) != OtMsg::Round2 || done_)
            throw ProtocolViolation("unexpected ot frame type " + std::to_string(f.msg_type));
        auto r3 = alice_ot_round3(*st_, wire::parse_ot2(f), choices_->n2);
        auto [k1, k2] = alice_ot_keys(*st_);
        auto cts = alice_ot_send(*st_, k1, k2);
        done_ = true;
        return {wire::to_frame(r3), wire::to_frame(cts)};
    }

    const OtAliceState& state() const { return *st_; }

  private:
    GroupParams gp_;
    std::pair<Bytes, Bytes> secrets_;
    std::optional<OtSenderChoices> choices_;
    Rng rng_;
    std::optional<OtAliceState> st_;
    bool done_ = false;
};

class OtBobRole final : public Role {
  public:
    OtBobRole(GroupParams gp, OtChoice choice, std::optional<OtReceiverChoices> choices, Rng rng)
        : gp_(std::move(gp)), choice_(choice), choices_(std::move(choices)), rng_(rng) {}

    Proto protocol() const override { return Proto::Ot12; }
    std::uint8_t hello_extra() const override { return kOtKeyBinding; }
    bool done() const override { return done_; }

    std::vector<Frame> start() override { return {}; }

    std::vector<Frame> on_frame(const Frame& f) override {
        switch (static_cast<OtMsg>(f.msg_type)) {
            case OtMsg::Round1: {
                if (st_) break;
                if (!choices_)
                    choices_ = OtReceiverChoices{rand_unit_exponent(gp_.p, rng_),
                                                 rand_unit_exponent(gp_.p, rng_)};
                auto [st, r2] = bob_ot_round2(gp_, wire::parse_ot1(f), choice_, choices_->n,
                                              choices_->n1);
                st_ = std::move(st);
                return {wire::to_frame(r2)};
            }
            case OtMsg::Round3:
                if (!st_ || st_->kB) break;
                bob_ot_key(*st_, wire::parse_ot3(f));
                return {};
            case OtMsg::Ciphertexts:
                if (!st_ || !st_->kB) break;
                received_ = bob_ot_recv(wire::parse_ot_cts(f), *st_->kB, choice_);
                done_ = true;
                return {};
            default:
                break;
        }
        throw ProtocolViolation("unexpected ot frame type " + std::to_string(f.msg_type));
    }

    const std::optional<Bytes>& received_secret() const { return received_; }
    const OtBobState& state() const { return *st_; }

  private:
    GroupParams gp_;
    OtChoice choice_;
    std::optional<OtReceiverChoices> choices_;
    Rng rng_;
    std::optional<OtBobState> st_;
    std::optional<Bytes> received_;
    bool done_ = false;
};

}  // namespace otkex
