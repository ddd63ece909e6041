#pragma once

// Deterministic random source. Every randomized operation takes an Rng&
// explicitly so seeded runs replay byte-for-byte. Not a CSPRNG: this is a
// protocol-logic artifact, and reproducibility is the contract that the
// tests and the statistical harness rely on.

#include <cstdint>
#include <random>
#include <span>

#include "otkex/bytes.hpp"

namespace otkex {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    Rng() : gen_(std::random_device{}()) {}

    std::uint64_t next_u64() { return gen_(); }

    bool bit() { return (gen_() & 1) != 0; }

    void fill(std::span<Byte> out) {
        std::size_t i = 0;
        while (i < out.size()) {
            std::uint64_t w = gen_();
            for (int b = 0; b < 8 && i < out.size(); ++b, ++i)
                out[i] = static_cast<Byte>(w >> (8 * b));
        }
    }

    Bytes bytes(std::size_t n) {
        Bytes out(n);
        fill(out);
        return out;
    }

    // Derives an independent child stream; used to hand each protocol role
    // its own deterministic source from one session seed.
    Rng fork() { return Rng(split_mix(next_u64())); }

  private:
    static std::uint64_t split_mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
};

}  // namespace otkex
