#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "errors.hpp"

namespace semifield {

using u32 = std::uint32_t;
using u64 = std::uint64_t;

namespace num {

constexpr bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

/// b^e, throwing when the result leaves 64 bits.
inline u64 checked_pow(u64 b, unsigned e) {
    u64 r = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (b != 0 && r > UINT64_MAX / b) throw Error(Errc::OrderTooLarge, "integer power overflows 64 bits");
        r *= b;
    }
    return r;
}

/// 2-adic valuation, n > 0.
constexpr unsigned v2(u64 n) {
    unsigned k = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++k;
    }
    return k;
}

inline std::vector<u64> prime_factors(u64 n) {
    std::vector<u64> out;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

constexpr u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

constexpr u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

/// inverse of a modulo prime p; a must be nonzero mod p
inline u64 inv_mod(u64 a, u64 p) {
    if (a % p == 0) throw Error(Errc::DivisionByZero, "inverse of zero mod p");
    return powmod(a, p - 2, p);
}

}  // namespace num
}  // namespace semifield
