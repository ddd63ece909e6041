#pragma once

// SHA-256 (FIPS 180-4). Used as the PRF behind the keystream and for
// parameter fingerprints in session hellos.

#include <array>
#include <cstdint>
#include <cstring>

#include "otkex/bytes.hpp"

namespace otkex {

class Sha256 {
  public:
    static constexpr std::size_t kDigestSize = 32;

    Sha256() { reset(); }

    void reset() {
        state_ = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                  0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
        buffered_ = 0;
        total_ = 0;
    }

    void update(ByteView data) {
        total_ += data.size();
        std::size_t i = 0;
        if (buffered_ > 0) {
            while (buffered_ < 64 && i < data.size()) buf_[buffered_++] = data[i++];
            if (buffered_ == 64) {
                compress(buf_.data());
                buffered_ = 0;
            }
        }
        while (data.size() - i >= 64) {
            compress(data.data() + i);
            i += 64;
        }
        while (i < data.size()) buf_[buffered_++] = data[i++];
    }

    Bytes finish() {
        std::uint64_t bits = total_ * 8;
        Byte pad = 0x80;
        update(ByteView(&pad, 1));
        static constexpr Byte zero = 0;
        while (buffered_ != 56) update(ByteView(&zero, 1));
        Byte len[8];
        for (int i = 0; i < 8; ++i) len[i] = static_cast<Byte>(bits >> (56 - 8 * i));
        update(ByteView(len, 8));
        Bytes out(kDigestSize);
        for (int i = 0; i < 8; ++i) {
            out[4 * i + 0] = static_cast<Byte>(state_[i] >> 24);
            out[4 * i + 1] = static_cast<Byte>(state_[i] >> 16);
            out[4 * i + 2] = static_cast<Byte>(state_[i] >> 8);
            out[4 * i + 3] = static_cast<Byte>(state_[i]);
        }
        return out;
    }

    static Bytes hash(ByteView data) {
        Sha256 h;
        h.update(data);
        return h.finish();
    }

  private:
    static std::uint32_t rotr(std::uint32_t x, int n) { return x >> n | x << (32 - n); }

    void compress(const Byte* block) {
        static constexpr std::uint32_t k[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
            0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
            0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
            0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
            0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
            0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
            0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
            0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
            0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
            0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = std::uint32_t(block[4 * i]) << 24 | std::uint32_t(block[4 * i + 1]) << 16 |
                   std::uint32_t(block[4 * i + 2]) << 8 | std::uint32_t(block[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        auto [a, b, c, d, e, f, g, h] = std::tuple{state_[0], state_[1], state_[2], state_[3],
                                                   state_[4], state_[5], state_[6], state_[7]};
        for (int i = 0; i < 64; ++i) {
            std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            std::uint32_t ch = (e & f) ^ (~e & g);
            std::uint32_t t1 = h + s1 + ch + k[i] + w[i];
            std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            std::uint32_t t2 = s0 + maj;
            h = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        state_[0] += a; state_[1] += b; state_[2] += c; state_[3] += d;
        state_[4] += e; state_[5] += f; state_[6] += g; state_[7] += h;
    }

    std::array<std::uint32_t, 8> state_;
    std::array<Byte, 64> buf_;
    std::size_t buffered_ = 0;
    std::uint64_t total_ = 0;
};

}  // namespace otkex
