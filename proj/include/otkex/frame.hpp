#pragma once

// Wire format. A frame is:
//   u32 BE length (= 2 + |payload|) | u8 protocol_id | u8 msg_type | payload
// Big integers inside payloads are a u16 BE byte count followed by the
// big-endian magnitude with no leading zero byte (zero encodes as count 0).
// Byte strings are a u32 BE length followed by the raw bytes.

#include <cstdint>
#include <optional>

#include "otkex/bignat.hpp"
#include "otkex/bytes.hpp"
#include "otkex/errors.hpp"

namespace otkex {

inline constexpr std::size_t kMaxFrameLen = 1u << 24;

enum class Proto : std::uint8_t {
    Control = 0,
    Mutual = 1,
    Ot12 = 2,
    Coinflip = 3,
    Zkp = 4,
};

struct Frame {
    std::uint8_t protocol_id;
    std::uint8_t msg_type;
    Bytes payload;

    bool operator==(const Frame&) const = default;
};

inline Frame make_frame(Proto p, std::uint8_t msg_type, Bytes payload = {}) {
    return Frame{static_cast<std::uint8_t>(p), msg_type, std::move(payload)};
}

inline Bytes encode_frame(const Frame& f) {
    const std::size_t len = 2 + f.payload.size();
    if (len > kMaxFrameLen) throw OversizeFrame();
    Bytes out;
    out.reserve(4 + len);
    out.push_back(static_cast<Byte>(len >> 24));
    out.push_back(static_cast<Byte>(len >> 16));
    out.push_back(static_cast<Byte>(len >> 8));
    out.push_back(static_cast<Byte>(len));
    out.push_back(f.protocol_id);
    out.push_back(f.msg_type);
    out.insert(out.end(), f.payload.begin(), f.payload.end());
    return out;
}

// Incremental decode from a buffer. Returns nullopt when more bytes are
// needed; on success advances `offset` past the frame. Throws OversizeFrame
// as soon as the length field is readable, before any payload buffering.
inline std::optional<Frame> try_decode_frame(ByteView buf, std::size_t& offset) {
    if (buf.size() - offset < 4) return std::nullopt;
    const std::size_t len = std::size_t(buf[offset]) << 24 | std::size_t(buf[offset + 1]) << 16 |
                            std::size_t(buf[offset + 2]) << 8 | std::size_t(buf[offset + 3]);
    if (len > kMaxFrameLen) throw OversizeFrame();
    if (len < 2) throw MalformedElement("frame length below header size");
    if (buf.size() - offset < 4 + len) return std::nullopt;
    Frame f;
    f.protocol_id = buf[offset + 4];
    f.msg_type = buf[offset + 5];
    f.payload.assign(buf.begin() + offset + 6, buf.begin() + offset + 4 + len);
    offset += 4 + len;
    return f;
}

// Whole-buffer convenience; requires exactly one frame.
inline Frame decode_frame(ByteView buf) {
    std::size_t offset = 0;
    auto f = try_decode_frame(buf, offset);
    if (!f) throw MalformedElement("truncated frame");
    if (offset != buf.size()) throw MalformedElement("trailing bytes after frame");
    return *f;
}

class PayloadWriter {
  public:
    void put_u8(std::uint8_t v) { out_.push_back(v); }

    void put_u16(std::uint16_t v) {
        out_.push_back(static_cast<Byte>(v >> 8));
        out_.push_back(static_cast<Byte>(v));
    }

    void put_u32(std::uint32_t v) {
        out_.push_back(static_cast<Byte>(v >> 24));
        out_.push_back(static_cast<Byte>(v >> 16));
        out_.push_back(static_cast<Byte>(v >> 8));
        out_.push_back(static_cast<Byte>(v));
    }

    void put_bignat(const BigNat& n) {
        Bytes mag = to_bytes_be(n);
        if (mag.size() > 0xFFFF) throw Error("put_bignat: integer too wide for wire format");
        put_u16(static_cast<std::uint16_t>(mag.size()));
        out_.insert(out_.end(), mag.begin(), mag.end());
    }

    void put_bytes(ByteView data) {
        if (data.size() > 0xFFFFFFFFull) throw Error("put_bytes: too long");
        put_u32(static_cast<std::uint32_t>(data.size()));
        out_.insert(out_.end(), data.begin(), data.end());
    }

    Bytes take() { return std::move(out_); }

  private:
    Bytes out_;
};

class PayloadReader {
  public:
    explicit PayloadReader(ByteView data) : data_(data) {}

    std::uint8_t u8() { return need(1)[0]; }

    std::uint16_t u16() {
        ByteView b = need(2);
        return std::uint16_t(b[0]) << 8 | b[1];
    }

    std::uint32_t u32() {
        ByteView b = need(4);
        return std::uint32_t(b[0]) << 24 | std::uint32_t(b[1]) << 16 | std::uint32_t(b[2]) << 8 |
               b[3];
    }

    BigNat bignat() {
        const std::uint16_t count = u16();
        ByteView mag = need(count);
        if (count > 0 && mag[0] == 0) throw MalformedElement("non-canonical integer encoding");
        return from_bytes_be(mag);
    }

    Bytes bytes() {
        const std::uint32_t len = u32();
        ByteView b = need(len);
        return Bytes(b.begin(), b.end());
    }

    void expect_end() const {
        if (pos_ != data_.size()) throw MalformedElement("trailing bytes in payload");
    }

  private:
    ByteView need(std::size_t n) {
        if (data_.size() - pos_ < n) throw MalformedElement("truncated payload");
        ByteView v = data_.subspan(pos_, n);
        pos_ += n;
        return v;
    }

    ByteView data_;
    std::size_t pos_ = 0;
};

}  // namespace otkex
