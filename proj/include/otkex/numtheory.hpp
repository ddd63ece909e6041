#pragma once

// Modular arithmetic over BigNat: exponentiation, inverses, primality,
// square roots mod a prime, primitive-root testing, and unbiased sampling.
// Everything here is a pure function of its arguments (plus the explicit
// Rng where noted).

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "otkex/bignat.hpp"
#include "otkex/errors.hpp"
#include "otkex/rng.hpp"

namespace otkex {

inline BigNat mod_exp(const BigNat& base, const BigNat& exp, const BigNat& modulus) {
    if (modulus < 2) throw InvalidModulus();
    BigNat b = base % modulus;
    return boost::multiprecision::powm(b, exp, modulus);
}

// Residue-ring helpers; all results canonical in [0, m).
inline BigNat add_mod(const BigNat& a, const BigNat& b, const BigNat& m) {
    return (a % m + b % m) % m;
}
inline BigNat sub_mod(const BigNat& a, const BigNat& b, const BigNat& m) {
    return (a % m + m - b % m) % m;
}
inline BigNat mul_mod(const BigNat& a, const BigNat& b, const BigNat& m) {
    return (a % m) * (b % m) % m;
}

// Extended Euclid: returns (g, s, t) with a*s + b*t = g. s and t are signed.
struct EgcdResult {
    BigNat g;
    BigNat s;
    BigNat t;
};

inline EgcdResult egcd(BigNat a, BigNat b) {
    BigNat s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (b != 0) {
        BigNat q = a / b;
        BigNat r = a - q * b;
        a = std::move(b);
        b = std::move(r);
        BigNat s2 = s0 - q * s1;
        s0 = std::move(s1);
        s1 = std::move(s2);
        BigNat t2 = t0 - q * t1;
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    return {std::move(a), std::move(s0), std::move(t0)};
}

inline BigNat mod_inv(const BigNat& a, const BigNat& modulus) {
    if (modulus < 2) throw InvalidModulus();
    BigNat r = a % modulus;
    EgcdResult e = egcd(r, modulus);
    if (e.g != 1) throw NotInvertible(e.g);
    BigNat inv = e.s % modulus;
    if (inv < 0) inv += modulus;
    return inv;
}

// Primes below 2^16, sieved once.
inline const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = [] {
        constexpr std::uint32_t limit = 1u << 16;
        std::vector<bool> composite(limit, false);
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 2; i < limit; ++i) {
            if (composite[i]) continue;
            out.push_back(i);
            for (std::uint64_t j = std::uint64_t(i) * i; j < limit; j += i)
                composite[static_cast<std::size_t>(j)] = true;
        }
        return out;
    }();
    return primes;
}

namespace detail {

inline std::uint64_t split_mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline bool miller_rabin_witness(const BigNat& n, const BigNat& a, const BigNat& d, unsigned s) {
    BigNat x = boost::multiprecision::powm(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned i = 1; i < s; ++i) {
        x = x * x % n;
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace detail

// Miller–Rabin. Deterministically correct for n < 2^64 (fixed witness set);
// above that, `rounds` witnesses derived deterministically from n, false
// positive rate < 4^-rounds.
inline bool is_probable_prime(const BigNat& n, unsigned rounds = 40) {
    if (rounds < 1) throw Error("is_probable_prime: rounds must be >= 1");
    if (n < 2) return false;
    const auto& primes = small_primes();
    if (n < (1u << 16)) {
        auto v = static_cast<std::uint32_t>(n);
        return std::binary_search(primes.begin(), primes.end(), v);
    }
    for (std::uint32_t p : primes)
        if (n % p == 0) return false;

    BigNat d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }

    if (bit_length(n) <= 64) {
        // Complete for n < 3.3e24, which covers everything <= 64 bits.
        static constexpr std::uint32_t witnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
        for (std::uint32_t w : witnesses)
            if (!detail::miller_rabin_witness(n, w, d, s)) return false;
        return true;
    }

    std::uint64_t seed = static_cast<std::uint64_t>(n & 0xffffffffffffffffull);
    const std::size_t words = (bit_length(n) + 63) / 64;
    for (unsigned r = 0; r < rounds; ++r) {
        BigNat a = 0;
        for (std::size_t w = 0; w < words; ++w) {
            seed = detail::split_mix(seed);
            a = (a << 64) | seed;
        }
        a = a % (n - 3) + 2;  // in [2, n-2]
        if (!detail::miller_rabin_witness(n, a, d, s)) return false;
    }
    return true;
}

// Both square roots of c mod an odd prime p, ordered (r, p-r) with r < p-r.
// Direct exponent for p = 3 (mod 4), Tonelli–Shanks otherwise.
inline std::pair<BigNat, BigNat> sqrt_mod_prime(const BigNat& c, const BigNat& p) {
    if (p < 3 || (p & 1) == 0) throw InvalidPrime("sqrt_mod_prime: p must be an odd prime");
    BigNat a = c % p;
    if (boost::multiprecision::powm(a, (p - 1) / 2, p) != 1) throw NotAResidue();

    BigNat r;
    if (p % 4 == 3) {
        r = boost::multiprecision::powm(a, (p + 1) / 4, p);
    } else {
        // Tonelli–Shanks: p - 1 = q * 2^s with q odd.
        BigNat q = p - 1;
        unsigned s = 0;
        while ((q & 1) == 0) {
            q >>= 1;
            ++s;
        }
        BigNat z = 2;
        while (boost::multiprecision::powm(z, (p - 1) / 2, p) != p - 1) ++z;
        BigNat m = s;
        BigNat cc = boost::multiprecision::powm(z, q, p);
        BigNat t = boost::multiprecision::powm(a, q, p);
        r = boost::multiprecision::powm(a, (q + 1) / 2, p);
        while (t != 1) {
            BigNat t2 = t;
            unsigned i = 0;
            while (t2 != 1) {
                t2 = t2 * t2 % p;
                ++i;
            }
            BigNat b = cc;
            for (BigNat j = 0; j < m - i - 1; ++j) b = b * b % p;
            r = r * b % p;
            cc = b * b % p;
            t = t * cc % p;
            m = i;
        }
    }
    BigNat r2 = p - r;
    return r < r2 ? std::make_pair(r, r2) : std::make_pair(r2, r);
}

// True iff x has order exactly p-1. The factor list must contain every
// distinct prime factor of p-1; an incomplete list is undetectable here and
// is the caller's contract to uphold.
inline bool is_primitive_root(const BigNat& x, const BigNat& p,
                              const std::vector<BigNat>& factors_of_p_minus_1) {
    BigNat r = x % p;
    if (r == 0) return false;
    for (const BigNat& q : factors_of_p_minus_1)
        if (boost::multiprecision::powm(r, (p - 1) / q, p) == 1) return false;
    return true;
}

// Uniform in [0, upper). Rejection sampling from fixed-width blocks, so no
// modulo bias.
inline BigNat rand_below(const BigNat& upper, Rng& rng) {
    if (upper < 1) throw Error("rand_below: upper must be >= 1");
    if (upper == 1) return 0;
    const std::size_t bits = bit_length(upper - 1);
    const std::size_t nbytes = (bits + 7) / 8;
    const Byte top_mask = bits % 8 ? static_cast<Byte>((1u << (bits % 8)) - 1) : 0xFF;
    for (;;) {
        Bytes block = rng.bytes(nbytes);
        block[0] &= top_mask;
        BigNat v = from_bytes_be(block);
        if (v < upper) return v;
    }
}

// Uniform over {n in [2, p-2] : gcd(n, p-1) = 1}; these are the exponents
// every protocol draws, so "division" in the exponent is always defined.
inline BigNat rand_unit_exponent(const BigNat& p, Rng& rng) {
    if (p < 5) throw Error("rand_unit_exponent: p must be >= 5");
    const BigNat m = p - 1;
    for (;;) {
        BigNat n = rand_below(p - 3, rng) + 2;
        if (boost::multiprecision::gcd(n, m) == 1) return n;
    }
}

}  // namespace otkex
