#pragma once

// Append-only record of every frame a session endpoint sent or received.
// Coin-flip verification replays it; tests diff it across transports.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "otkex/bytes.hpp"
#include "otkex/frame.hpp"

namespace otkex {

enum class Direction : std::uint8_t { Sent, Received };

struct TranscriptEntry {
    std::uint64_t seq;
    Direction dir;
    Frame frame;
};

class Transcript {
  public:
    void record(Direction dir, const Frame& frame) {
        entries_.push_back({next_seq_++, dir, frame});
    }

    const std::vector<TranscriptEntry>& entries() const { return entries_; }

    std::size_t size() const { return entries_.size(); }

    // First frame matching (protocol, msg_type) in the given direction.
    const Frame* find(Direction dir, Proto protocol, std::uint8_t msg_type) const {
        for (const auto& e : entries_) {
            if (e.dir == dir && e.frame.protocol_id == static_cast<std::uint8_t>(protocol) &&
                e.frame.msg_type == msg_type)
                return &e.frame;
        }
        return nullptr;
    }

    // One line per frame: `seq dir protocol msg_type hex(payload)`.
    std::string to_text() const {
        std::string out;
        for (const auto& e : entries_) {
            out += std::to_string(e.seq);
            out += e.dir == Direction::Sent ? " sent " : " recv ";
            out += std::to_string(e.frame.protocol_id);
            out += ' ';
            out += std::to_string(e.frame.msg_type);
            out += ' ';
            out += e.frame.payload.empty() ? "-" : to_hex(e.frame.payload);
            out += '\n';
        }
        return out;
    }

  private:
    std::vector<TranscriptEntry> entries_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace otkex
