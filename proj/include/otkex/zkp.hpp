#pragma once

// Zero-knowledge identification for knowledge of the discrete log e with
// y = x^e mod p. Cut-and-choose rounds:
//
//   P: X = y^n              (fresh unit n per round)
//   V: b random bit; b=1 also sends M = x^m
//   P: b=0 -> n, b=1 -> Y = M^e
//   V: b=0 -> check X = y^n, b=1 -> check Y = y^m
//
// An imposter passes the b=0 half for free and must guess the b=1 half, so
// t rounds push the cheat probability to about 2^-t.

#include <cstdint>
#include <optional>
#include <vector>

#include "otkex/bignat.hpp"
#include "otkex/errors.hpp"
#include "otkex/frame.hpp"
#include "otkex/numtheory.hpp"
#include "otkex/params.hpp"
#include "otkex/rng.hpp"
#include "otkex/session.hpp"

namespace otkex {

struct ZkPublic {
    BigNat p, x, y;
};

inline ZkPublic make_zk_public(const BigNat& p, const BigNat& x, const BigNat& e) {
    return {p, x, mod_exp(x, e, p)};
}

enum class ZkMsg : std::uint8_t {
    Commit = 1,
    Challenge = 2,
    Response = 3,
    Result = 4,
};

struct ZkCommit {
    BigNat X;
};

// b=0 carries no M; on the wire that is an absent field, never a literal 0.
struct ZkChallenge {
    bool b;
    std::optional<BigNat> M;
};

struct ZkResponse {
    bool for_b1;  // variant tag; must match the challenge bit
    BigNat value; // n when for_b1 is false, Y when true
};

namespace wire {

inline Frame to_frame(const ZkCommit& m) {
    PayloadWriter w;
    w.put_bignat(m.X);
    return make_frame(Proto::Zkp, static_cast<std::uint8_t>(ZkMsg::Commit), w.take());
}
inline Frame to_frame(const ZkChallenge& m) {
    PayloadWriter w;
    w.put_u8(m.b ? 1 : 0);
    if (m.b) w.put_bignat(*m.M);
    return make_frame(Proto::Zkp, static_cast<std::uint8_t>(ZkMsg::Challenge), w.take());
}
inline Frame to_frame(const ZkResponse& m) {
    PayloadWriter w;
    w.put_u8(m.for_b1 ? 1 : 0);
    w.put_bignat(m.value);
    return make_frame(Proto::Zkp, static_cast<std::uint8_t>(ZkMsg::Response), w.take());
}
inline Frame to_zk_result_frame(bool accepted) {
    PayloadWriter w;
    w.put_u8(accepted ? 1 : 0);
    return make_frame(Proto::Zkp, static_cast<std::uint8_t>(ZkMsg::Result), w.take());
}

inline ZkCommit parse_commit(const Frame& f) {
    PayloadReader r(f.payload);
    ZkCommit m{r.bignat()};
    r.expect_end();
    return m;
}
inline ZkChallenge parse_challenge(const Frame& f) {
    PayloadReader r(f.payload);
    ZkChallenge m;
    m.b = r.u8() != 0;
    if (m.b) m.M = r.bignat();
    r.expect_end();
    return m;
}
inline ZkResponse parse_response(const Frame& f) {
    PayloadReader r(f.payload);
    ZkResponse m;
    m.for_b1 = r.u8() != 0;
    m.value = r.bignat();
    r.expect_end();
    return m;
}
inline bool parse_zk_result(const Frame& f) {
    PayloadReader r(f.payload);
    bool accepted = r.u8() != 0;
    r.expect_end();
    return accepted;
}

}  // namespace wire

// P step 1. n is drawn as a unit mod p-1 so X pins n uniquely given y.
inline std::pair<BigNat, ZkCommit> prover_commit(const ZkPublic& pub, Rng& rng) {
    BigNat n = rand_unit_exponent(pub.p, rng);
    return {n, ZkCommit{mod_exp(pub.y, n, pub.p)}};
}

// V step 2. Returns the verifier's round secret m (present iff b=1).
inline std::pair<std::optional<BigNat>, ZkChallenge> verifier_challenge(const ZkPublic& pub,
                                                                        Rng& rng) {
    if (rng.bit()) {
        BigNat m = rand_below(pub.p - 2, rng) + 1;  // uniform in [1, p-2]
        return {m, ZkChallenge{true, mod_exp(pub.x, m, pub.p)}};
    }
    return {std::nullopt, ZkChallenge{false, std::nullopt}};
}

// P step 3.
inline ZkResponse prover_respond(const ZkPublic& pub, const BigNat& e, const BigNat& n,
                                 const ZkChallenge& ch) {
    if (!ch.b) return {false, n};
    if (!ch.M) throw ProtocolViolation("challenge b=1 without M");
    return {true, mod_exp(*ch.M, e, pub.p)};
}

// V step 4.
inline bool verifier_check(const ZkPublic& pub, const BigNat& X,
                           const std::optional<BigNat>& m, bool b, const ZkResponse& resp) {
    if (resp.for_b1 != b) return false;
    if (!b) return mod_exp(pub.y, resp.value, pub.p) == X;
    if (!m) throw ProtocolViolation("verifier lost its round secret");
    return resp.value == mod_exp(pub.y, *m, pub.p);
}

// Prover strategies for the runner: the honest prover answers with e, the
// imposter passes b=0 by construction and guesses a uniform group element
// for b=1.
class ProverStrategy {
  public:
    virtual ~ProverStrategy() = default;
    virtual ZkCommit commit(const ZkPublic& pub, Rng& rng) = 0;
    virtual ZkResponse respond(const ZkPublic& pub, const ZkChallenge& ch, Rng& rng) = 0;
};

class HonestProver final : public ProverStrategy {
  public:
    explicit HonestProver(BigNat e) : e_(std::move(e)) {}

    ZkCommit commit(const ZkPublic& pub, Rng& rng) override {
        auto [n, c] = prover_commit(pub, rng);
        n_ = std::move(n);
        return c;
    }

    ZkResponse respond(const ZkPublic& pub, const ZkChallenge& ch, Rng&) override {
        if (!ch.b) return {false, n_};
        if (!ch.M) throw ProtocolViolation("challenge b=1 without M");
        return {true, mod_exp(*ch.M, e_, pub.p)};
    }

  private:
    BigNat e_;
    BigNat n_;
};

class ImposterProver final : public ProverStrategy {
  public:
    ZkCommit commit(const ZkPublic& pub, Rng& rng) override {
        auto [n, c] = prover_commit(pub, rng);  // needs no e
        n_ = std::move(n);
        return c;
    }

    ZkResponse respond(const ZkPublic& pub, const ZkChallenge& ch, Rng& rng) override {
        if (!ch.b) return {false, n_};
        return {true, rand_below(pub.p - 1, rng) + 1};  // blind guess in [1, p-1]
    }

  private:
    BigNat n_;
};

// Runs t rounds prover-vs-honest-verifier in process; accept iff every
// round accepts.
inline bool run_protocol(ProverStrategy& prover, const ZkPublic& pub, unsigned t, Rng& rng) {
    for (unsigned i = 0; i < t; ++i) {
        ZkCommit commit = prover.commit(pub, rng);
        auto [m, ch] = verifier_challenge(pub, rng);
        ZkResponse resp = prover.respond(pub, ch, rng);
        if (!verifier_check(pub, commit.X, m, ch.b, resp)) return false;
    }
    return true;
}

// --------------------------------------------------------------------------
// Session roles. Per round: p:Commit -> v:Challenge -> p:Response (+ next
// Commit unless last); verifier ends with Result.
// --------------------------------------------------------------------------

class ZkProverRole final : public Role {
  public:
    ZkProverRole(ZkPublic pub, ProverStrategy& strategy, unsigned t, Rng rng)
        : pub_(std::move(pub)), strategy_(&strategy), t_(t), rng_(rng) {}

    Proto protocol() const override { return Proto::Zkp; }
    bool done() const override { return done_; }

    std::vector<Frame> start() override {
        round_ = 1;
        return {wire::to_frame(strategy_->commit(pub_, rng_))};
    }

    std::vector<Frame> on_frame(const Frame& f) override {
        switch (static_cast<ZkMsg>(f.msg_type)) {
            case ZkMsg::Challenge: {
                if (round_ == 0 || round_ > t_) break;
                auto resp = strategy_->respond(pub_, wire::parse_challenge(f), rng_);
                std::vector<Frame> out{wire::to_frame(resp)};
                ++round_;
                if (round_ <= t_) out.push_back(wire::to_frame(strategy_->commit(pub_, rng_)));
                return out;
            }
            case ZkMsg::Result:
                accepted_ = wire::parse_zk_result(f);
                done_ = true;
                return {};
            default:
                break;
        }
        throw ProtocolViolation("unexpected zkp frame type " + std::to_string(f.msg_type));
    }

    std::optional<bool> accepted() const { return accepted_; }

  private:
    ZkPublic pub_;
    ProverStrategy* strategy_;
    unsigned t_;
    Rng rng_;
    unsigned round_ = 0;
    std::optional<bool> accepted_;
    bool done_ = false;
};

class ZkVerifierRole final : public Role {
  public:
    ZkVerifierRole(ZkPublic pub, unsigned t, Rng rng)
        : pub_(std::move(pub)), t_(t), rng_(rng) {}

    Proto protocol() const override { return Proto::Zkp; }
    bool done() const override { return done_; }

    std::vector<Frame> start() override { return {}; }

    std::vector<Frame> on_frame(const Frame& f) override {
        switch (static_cast<ZkMsg>(f.msg_type)) {
            case ZkMsg::Commit: {
                if (awaiting_response_ || round_ >= t_) break;
                commit_ = wire::parse_commit(f).X;
                auto [m, ch] = verifier_challenge(pub_, rng_);
                m_ = std::move(m);
                b_ = ch.b;
                awaiting_response_ = true;
                return {wire::to_frame(ch)};
            }
            case ZkMsg::Response: {
                if (!awaiting_response_) break;
                awaiting_response_ = false;
                ++round_;
                const bool ok =
                    verifier_check(pub_, commit_, m_, b_, wire::parse_response(f));
                if (!ok || round_ == t_) {
                    accepted_ = ok;
                    done_ = true;
                    return {wire::to_zk_result_frame(ok)};
                }
                return {};
            }
            default:
                break;
        }
        throw ProtocolViolation("unexpected zkp frame type " + std::to_string(f.msg_type));
    }

    bool accepted() const { return accepted_; }
    unsigned rounds_run() const { return round_; }

  private:
    ZkPublic pub_;
    unsigned t_;
    Rng rng_;
    unsigned round_ = 0;
    bool awaiting_response_ = false;
    BigNat commit_;
    std::optional<BigNat> m_;
    bool b_ = false;
    bool accepted_ = false;
    bool done_ = false;
};

}  // namespace otkex
