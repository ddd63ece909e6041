#pragma once

// Session driver: pumps one protocol role over a channel until it finishes,
// recording every frame in a transcript. Sessions open with a control hello
// (protocol id, params fingerprint, and the OT key-binding byte); any
// violation is answered with a control abort before the error propagates.

#include <cstdint>
#include <vector>

#include "otkex/bytes.hpp"
#include "otkex/channel.hpp"
#include "otkex/errors.hpp"
#include "otkex/frame.hpp"
#include "otkex/transcript.hpp"

namespace otkex {

enum class ControlMsg : std::uint8_t { Hello = 1, Abort = 2 };

enum class AbortReason : std::uint8_t {
    ProtocolError = 1,
    PeerClosed = 2,
    ParamsMismatch = 3,
};

struct Hello {
    std::uint8_t protocol_id;
    Bytes params_fingerprint;
    std::uint8_t extra;  // OT key-binding announcement; 0 elsewhere

    bool operator==(const Hello&) const = default;
};

inline Frame make_hello(const Hello& h) {
    PayloadWriter w;
    w.put_u8(h.protocol_id);
    w.put_bytes(h.params_fingerprint);
    w.put_u8(h.extra);
    return make_frame(Proto::Control, static_cast<std::uint8_t>(ControlMsg::Hello), w.take());
}

inline Hello parse_hello(const Frame& f) {
    PayloadReader r(f.payload);
    Hello h;
    h.protocol_id = r.u8();
    h.params_fingerprint = r.bytes();
    h.extra = r.u8();
    r.expect_end();
    return h;
}

inline Frame make_abort(AbortReason reason) {
    PayloadWriter w;
    w.put_u8(static_cast<std::uint8_t>(reason));
    return make_frame(Proto::Control, static_cast<std::uint8_t>(ControlMsg::Abort), w.take());
}

// One side of a two-party protocol. start() yields any opening frames;
// on_frame() consumes one inbound frame and yields the replies; done()
// reports the terminal phase.
class Role {
  public:
    virtual ~Role() = default;
    virtual Proto protocol() const = 0;
    virtual std::uint8_t hello_extra() const { return 0; }
    virtual std::vector<Frame> start() = 0;
    virtual std::vector<Frame> on_frame(const Frame& frame) = 0;
    virtual bool done() const = 0;
};

// Runs `role` over `channel` to completion. Throws ProtocolViolation on a
// bad or unexpected frame (after sending an abort) and TransportError if the
// peer vanishes mid-protocol; both leave an abort record in the transcript.
inline void drive_session(Role& role, Channel& channel, Transcript& transcript,
                          const Bytes& params_fingerprint) {
    auto send = [&](const Frame& f) {
        channel.send(f);
        transcript.record(Direction::Sent, f);
    };

    send(make_hello({static_cast<std::uint8_t>(role.protocol()), params_fingerprint,
                     role.hello_extra()}));
    for (const Frame& f : role.start()) send(f);

    bool got_hello = false;
    while (!role.done()) {
        auto f = channel.receive();
        if (!f) {
            transcript.record(Direction::Received, make_abort(AbortReason::PeerClosed));
            throw TransportError("peer closed mid-protocol");
        }
        transcript.record(Direction::Received, *f);

        if (f->protocol_id == static_cast<std::uint8_t>(Proto::Control)) {
            if (f->msg_type == static_cast<std::uint8_t>(ControlMsg::Hello)) {
                Hello h = parse_hello(*f);
                Hello want{static_cast<std::uint8_t>(role.protocol()), params_fingerprint,
                           role.hello_extra()};
                if (h != want) {
                    send(make_abort(AbortReason::ParamsMismatch));
                    channel.close();
                    throw ProtocolViolation("hello mismatch: peer runs different session");
                }
                got_hello = true;
                continue;
            }
            if (f->msg_type == static_cast<std::uint8_t>(ControlMsg::Abort)) {
                channel.close();
                PayloadReader r(f->payload);
                throw ProtocolViolation("peer aborted, reason " + std::to_string(r.u8()));
            }
            send(make_abort(AbortReason::ProtocolError));
            channel.close();
            throw ProtocolViolation("unknown control frame");
        }

        if (!got_hello) {
            send(make_abort(AbortReason::ProtocolError));
            channel.close();
            throw ProtocolViolation("protocol frame before hello");
        }

        std::vector<Frame> out;
        try {
            out = role.on_frame(*f);
        } catch (const ProtocolViolation&) {
            send(make_abort(AbortReason::ProtocolError));
            channel.close();
            throw;
        } catch (const MalformedElement& e) {
            send(make_abort(AbortReason::ProtocolError));
            channel.close();
            throw ProtocolViolation(std::string("malformed frame: ") + e.what());
        }
        for (const Frame& g : out) send(g);
    }
    channel.close();
}

}  // namespace otkex
