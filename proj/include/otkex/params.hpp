#pragma once

// Group parameters shared by both parties: a safe prime p = 2q+1, a
// primitive root x, and the square-root pair (g1, g2) of the agreed
// residue c. Generation, validation, and the text file format live here.

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "otkex/bignat.hpp"
#include "otkex/errors.hpp"
#include "otkex/numtheory.hpp"
#include "otkex/rng.hpp"
#include "otkex/sha256.hpp"

namespace otkex {

struct GroupParams {
    BigNat p;   // safe prime modulus
    BigNat x;   // primitive root mod p
    BigNat c;   // agreed quadratic residue, c = g1^2 = g2^2 (mod p)
    BigNat g1;  // smaller root of c
    BigNat g2;  // p - g1
    BigNat q;   // (p-1)/2, prime

    bool operator==(const GroupParams&) const = default;
};

namespace detail {

// Searches a window of candidates q = q0 + 2k for q and 2q+1 both prime,
// sieving both sequences by small primes before any Miller–Rabin work.
// Sieve primes are capped below the candidate range so a candidate can
// never be struck out by itself (q >= 2^(qbits-1) > r always).
inline bool safe_prime_window(const BigNat& q0, std::size_t window, unsigned qbits,
                              BigNat& q_out) {
    std::vector<bool> bad(window, false);
    const auto& primes = small_primes();
    const std::uint64_t r_cap =
        qbits >= 18 ? std::uint64_t(1) << 32 : std::uint64_t(1) << (qbits - 1);
    for (std::size_t idx = 1; idx < primes.size(); ++idx) {  // skip 2; q0 is odd
        const std::uint32_t r = primes[idx];
        if (r >= r_cap) break;
        const std::uint32_t q0r = static_cast<std::uint32_t>(q0 % r);
        const std::uint32_t inv2 = (r + 1) / 2;
        // q0 + 2k = 0 (mod r)
        std::uint64_t k = std::uint64_t(r - q0r) % r * inv2 % r;
        for (; k < window; k += r) bad[static_cast<std::size_t>(k)] = true;
        // 2(q0 + 2k) + 1 = 0 (mod r)
        const std::uint32_t inv4 = std::uint64_t(inv2) * inv2 % r;
        std::uint64_t c = (2 * std::uint64_t(q0r) + 1) % r;
        k = (r - c) % r * inv4 % r;
        for (; k < window; k += r) bad[static_cast<std::size_t>(k)] = true;
    }
    for (std::size_t k = 0; k < window; ++k) {
        if (bad[k]) continue;
        BigNat q = q0 + 2 * BigNat(k);
        if (!is_probable_prime(q, 2)) continue;
        BigNat p = 2 * q + 1;
        if (!is_probable_prime(p, 2)) continue;
        if (!is_probable_prime(q, 40) || !is_probable_prime(p, 40)) continue;
        q_out = std::move(q);
        return true;
    }
    return false;
}

}  // namespace detail

// Safe prime with exactly `bits` bits (so q has bits-1, top bit set).
inline BigNat generate_safe_prime(unsigned bits, Rng& rng) {
    if (bits < 16) throw Error("generate_safe_prime: bits must be >= 16");
    const unsigned qbits = bits - 1;
    const std::size_t window = std::max<std::size_t>(1024, std::size_t(bits) * bits / 4);
    for (;;) {
        BigNat q0 = rand_below(BigNat(1) << (qbits - 1), rng);
        q0 |= BigNat(1) << (qbits - 1);  // exact size
        q0 |= 1;                         // odd
        // keep the window inside the q-bit range
        if (bit_length(q0 + 2 * BigNat(window)) > qbits) continue;
        BigNat q;
        if (detail::safe_prime_window(q0, window, qbits, q)) return 2 * q + 1;
    }
}

inline GroupParams generate_params(unsigned bits, Rng& rng) {
    if (bits < 16) throw Error("generate_params: bits must be >= 16");
    GroupParams gp;
    gp.p = generate_safe_prime(bits, rng);
    gp.q = (gp.p - 1) / 2;

    const std::vector<BigNat> factors{2, gp.q};
    do {
        gp.x = rand_below(gp.p - 3, rng) + 2;
    } while (!is_primitive_root(gp.x, gp.p, factors));

    // Roots of 1 are excluded by the [2, p-2] range; q is excluded as
    // degenerate. g1 < g2 by normalization, and g1 = g2 cannot happen for
    // odd p.
    do {
        gp.g1 = rand_below(gp.p - 3, rng) + 2;
    } while (gp.g1 == gp.q);
    BigNat other = gp.p - gp.g1;
    if (other < gp.g1) std::swap(gp.g1, other);
    gp.g2 = other;
    gp.c = mul_mod(gp.g1, gp.g1, gp.p);
    return gp;
}

// Checks every GroupParams invariant and reports all violations.
inline std::vector<std::string> validate_params(const GroupParams& gp) {
    std::vector<std::string> v;
    if (gp.p < 23) v.push_back("p is too small (< 23)");
    if (!is_probable_prime(gp.p)) v.push_back("p is not prime");
    if (gp.p != 2 * gp.q + 1) v.push_back("p != 2q + 1");
    if (!is_probable_prime(gp.q)) v.push_back("q is not prime");
    if (gp.x < 2 || gp.x > gp.p - 2) {
        v.push_back("x out of range [2, p-2]");
    } else if (gp.p == 2 * gp.q + 1 && !is_primitive_root(gp.x, gp.p, {2, gp.q})) {
        v.push_back("x is not a primitive root");
    }
    if (gp.c < 1 || gp.c >= gp.p) v.push_back("c out of range [1, p-1]");
    if (!(gp.g1 > 1 && gp.g1 < gp.g2 && gp.g2 < gp.p - 1))
        v.push_back("roots must satisfy 1 < g1 < g2 < p-1");
    if (gp.g1 + gp.g2 != gp.p) v.push_back("g1 + g2 != p");
    if (mul_mod(gp.g1, gp.g1, gp.p) != gp.c) v.push_back("g1^2 != c (mod p)");
    if (mul_mod(gp.g2, gp.g2, gp.p) != gp.c) v.push_back("g2^2 != c (mod p)");
    return v;
}

// File format: one key=value per line, decimal values, keys p x c g1 g2 q,
// '#' lines ignored, order-insensitive, surrounding whitespace tolerated.
inline std::string serialize_params(const GroupParams& gp) {
    std::string out;
    out += "p=" + gp.p.str() + "\n";
    out += "x=" + gp.x.str() + "\n";
    out += "c=" + gp.c.str() + "\n";
    out += "g1=" + gp.g1.str() + "\n";
    out += "g2=" + gp.g2.str() + "\n";
    out += "q=" + gp.q.str() + "\n";
    return out;
}

inline GroupParams parse_params(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
            s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.remove_suffix(1);
        return s;
    };

    GroupParams gp;
    bool seen[6] = {};
    const std::string_view keys[6] = {"p", "x", "c", "g1", "g2", "q"};
    BigNat* slots[6] = {&gp.p, &gp.x, &gp.c, &gp.g1, &gp.g2, &gp.q};

    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);

        std::string_view t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string_view::npos) throw MalformedField(line_no, "expected key=value");
        std::string_view key = trim(t.substr(0, eq));
        std::string_view val = trim(t.substr(eq + 1));

        int slot = -1;
        for (int i = 0; i < 6; ++i)
            if (key == keys[i]) slot = i;
        if (slot < 0) throw MalformedField(line_no, "unknown key '" + std::string(key) + "'");
        if (seen[slot]) throw MalformedField(line_no, "duplicate key '" + std::string(key) + "'");
        if (val.empty()) throw MalformedField(line_no, "empty value");
        for (char ch : val)
            if (ch < '0' || ch > '9') throw MalformedField(line_no, "value is not a decimal number");
        *slots[slot] = BigNat(std::string(val));
        seen[slot] = true;
    }
    for (int i = 0; i < 6; ++i)
        if (!seen[i]) throw MalformedField(0, "missing key '" + std::string(keys[i]) + "'");
    return gp;
}

// Fingerprint for session hellos: SHA-256 of the canonical file text.
inline Bytes params_hash(const GroupParams& gp) {
    return Sha256::hash(to_bytes(serialize_params(gp)));
}

}  // namespace otkex
