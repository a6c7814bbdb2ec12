#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "number.hpp"

namespace semifield {

/// Dense polynomials over GF(p), coefficients low to high.
namespace poly {

using Poly = std::vector<u32>;

inline void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int degree(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly sub(Poly a, const Poly& b, u32 p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
    trim(a);
    return a;
}

/// remainder of a modulo f (f nonzero)
inline Poly mod(Poly a, const Poly& f, u32 p) {
    trim(a);
    Poly g = f;
    trim(g);
    if (g.empty()) throw Error(Errc::DivisionByZero, "polynomial division by zero");
    const int dg = degree(g);
    const u64 lead_inv = num::inv_mod(g.back(), p);
    while (degree(a) >= dg) {
        const int shift = degree(a) - dg;
        const u64 c = num::mulmod(a.back(), lead_inv, p);
        for (int i = 0; i <= dg; ++i) {
            u64 t = num::mulmod(c, g[i], p);
            a[i + shift] = static_cast<u32>((a[i + shift] + p - t) % p);
        }
        trim(a);
    }
    return a;
}

inline Poly mulmod(const Poly& a, const Poly& b, const Poly& f, u32 p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = static_cast<u32>((r[i + j] + num::mulmod(a[i], b[j], p)) % p);
    return mod(std::move(r), f, p);
}

inline Poly powmod(Poly a, u64 e, const Poly& f, u32 p) {
    Poly r{1};
    r = mod(r, f, p);
    a = mod(a, f, p);
    while (e) {
        if (e & 1) r = mulmod(r, a, f, p);
        a = mulmod(a, a, f, p);
        e >>= 1;
    }
    return r;
}

inline Poly gcd(Poly a, Poly b, u32 p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

/// Ben-Or test: f of degree m is irreducible iff gcd(f, t^(p^i) - t) = 1 for i <= m/2.
inline bool is_irreducible(const Poly& f, u32 p) {
    const int m = degree(f);
    if (m < 1) return false;
    if (m == 1) return true;
    const Poly t{0, 1};
    Poly h = t;
    for (int i = 1; i <= m / 2; ++i) {
        h = powmod(h, p, f, p);
        Poly g = gcd(f, sub(h, t, p), p);
        if (degree(g) > 0) return false;
    }
    return true;
}

}  // namespace poly

/// A field element: the base-p digits of `packed` are the polynomial
/// coefficients, lowest digit = constant term.
struct Element {
    u32 packed = 0;
    friend constexpr auto operator<=>(const Element&, const Element&) = default;
};

struct FieldSpec {
    u32 p = 0;
    unsigned m = 0;
    std::vector<u32> modulus;  // monic, degree m, low to high
};

struct FieldOptions {
    u64 log_table_limit = u64{1} << 16;  // build log/exp/frobenius tables up to this order
    u64 add_table_limit = 1024;          // build an addition table up to this order
};

class FieldCtx;
using FieldPtr = std::shared_ptr<const FieldCtx>;

/// Arithmetic in GF(p^m) = GF(p)[t]/(f).  Immutable after construction.
class FieldCtx {
public:
    static constexpr u64 max_order = u64{1} << 24;

    explicit FieldCtx(FieldSpec spec, FieldOptions opts = {}) : spec_(std::move(spec)) {
        const u32 p = spec_.p;
        const unsigned m = spec_.m;
        if (!num::is_prime(p)) throw Error(Errc::NotPrime, "p = " + std::to_string(p) + " is not prime");
        if (m == 0) throw Error(Errc::DegreeMismatch, "extension degree must be positive");
        const u64 q = num::checked_pow(p, m);
        if (q > max_order) throw Error(Errc::OrderTooLarge, "field order exceeds 2^24");
        q_ = static_cast<u32>(q);
        if (spec_.modulus.size() != m + 1)
            throw Error(Errc::DegreeMismatch, "modulus must have degree m");
        for (auto& c : spec_.modulus) c %= p;
        if (spec_.modulus.back() != 1) throw Error(Errc::DegreeMismatch, "modulus must be monic");
        if (!poly::is_irreducible(spec_.modulus, p))
            throw Error(Errc::ReducibleModulus, "modulus is reducible over GF(p)");

        pow_.resize(m + 1);
        pow_[0] = 1;
        for (unsigned i = 1; i <= m; ++i) pow_[i] = pow_[i - 1] * p;

        generator_ = find_generator();

        if (q <= opts.log_table_limit) {
            exp_.resize(q_ - 1);
            log_.assign(q_, 0);
            u32 x = 1;
            for (u32 k = 0; k + 1 < q_; ++k) {
                exp_[k] = x;
                log_[x] = k;
                x = mul_poly(Element{x}, generator_).packed;
            }
            frob_.resize(m);
            for (unsigned s = 0; s < m; ++s) {
                auto& t = frob_[s];
                t.assign(q_, 0);
                const u64 ps = pow_[s];
                for (u32 x = 1; x < q_; ++x) t[x] = exp_[num::mulmod(log_[x], ps, q_ - 1)];
            }
        }
        if (q <= opts.add_table_limit) {
            add_.resize(u64{q_} * q_);
            neg_.resize(q_);
            for (u32 x = 0; x < q_; ++x) {
                neg_[x] = neg_digits(x);
                for (u32 y = 0; y < q_; ++y) add_[u64{x} * q_ + y] = add_digits(x, y);
            }
        }
    }

    const FieldSpec& spec() const { return spec_; }
    u32 p() const { return spec_.p; }
    unsigned m() const { return spec_.m; }
    u32 order() const { return q_; }
    bool has_log_table() const { return !exp_.empty(); }

    Element zero() const { return {}; }
    Element one() const { return {1}; }
    Element generator() const { return generator_; }

    Element from_int(long long v) const {
        long long r = v % static_cast<long long>(p());
        if (r < 0) r += p();
        return {static_cast<u32>(r)};
    }

    Element from_coeffs(std::span<const u32> c) const {
        if (c.size() > m()) throw Error(Errc::DegreeMismatch, "too many coefficients");
        u32 v = 0;
        for (std::size_t i = 0; i < c.size(); ++i) v += (c[i] % p()) * pow_[i];
        return {v};
    }

    std::vector<u32> coeffs(Element x) const {
        check(x);
        std::vector<u32> c(m());
        for (unsigned i = 0; i < m(); ++i) c[i] = (x.packed / pow_[i]) % p();
        return c;
    }

    /// position in the lexicographic order comparing coefficients low to high
    u32 lex_rank(Element x) const {
        u32 r = 0;
        for (unsigned i = 0; i < m(); ++i) r = r * p() + (x.packed / pow_[i]) % p();
        return r;
    }

    Element from_lex_rank(u32 r) const {
        u32 v = 0;
        for (unsigned i = m(); i-- > 0;) {
            v += (r % p()) * pow_[i];
            r /= p();
        }
        return {v};
    }

    Element add(Element x, Element y) const {
        if (!add_.empty()) return {add_[u64{x.packed} * q_ + y.packed]};
        if (p() == 2) return {x.packed ^ y.packed};
        return {add_digits(x.packed, y.packed)};
    }

    Element neg(Element x) const {
        if (!neg_.empty()) return {neg_[x.packed]};
        if (p() == 2) return x;
        return {neg_digits(x.packed)};
    }

    Element sub(Element x, Element y) const { return add(x, neg(y)); }

    Element mul(Element x, Element y) const {
        if (x.packed == 0 || y.packed == 0) return {};
        if (!exp_.empty()) {
            u32 k = log_[x.packed] + log_[y.packed];
            if (k >= q_ - 1) k -= q_ - 1;
            return {exp_[k]};
        }
        return mul_poly(x, y);
    }

    /// Schoolbook multiplication followed by reduction; the table-free reference path.
    Element mul_poly(Element x, Element y) const {
        const u32 p = spec_.p;
        const unsigned m = spec_.m;
        std::array<u64, 64> r{};
        std::array<u32, 32> a{}, b{};
        unpack(x.packed, a);
        unpack(y.packed, b);
        for (unsigned i = 0; i < m; ++i) {
            if (!a[i]) continue;
            for (unsigned j = 0; j < m; ++j) r[i + j] = (r[i + j] + u64{a[i]} * b[j]) % p;
        }
        for (unsigned k = 2 * m - 1; k-- > m;) {
            const u64 c = r[k];
            if (!c) continue;
            r[k] = 0;
            // t^m = -(f_0 + ... + f_{m-1} t^{m-1})
            for (unsigned i = 0; i < m; ++i)
                r[k - m + i] = (r[k - m + i] + (p - spec_.modulus[i]) % p * c) % p;
        }
        u32 v = 0;
        for (unsigned i = 0; i < m; ++i) v += static_cast<u32>(r[i]) * pow_[i];
        return {v};
    }

    Element pow(Element x, u64 e) const {
        if (x.packed == 0) return e == 0 ? one() : zero();
        if (!exp_.empty()) return {exp_[num::mulmod(log_[x.packed], e % (q_ - 1), q_ - 1)]};
        e %= (q_ - 1);
        Element r = one();
        while (e) {
            if (e & 1) r = mul_poly(r, x);
            x = mul_poly(x, x);
            e >>= 1;
        }
        return r;
    }

    Element inv(Element x) const {
        if (x.packed == 0) throw Error(Errc::DivisionByZero, "inverse of zero");
        if (!exp_.empty()) return {exp_[(q_ - 1 - log_[x.packed]) % (q_ - 1)]};
        return pow(x, q_ - 2);
    }

    Element div(Element x, Element y) const { return mul(x, inv(y)); }

    /// x^(p^s), 0 <= s < m
    Element frobenius(Element x, unsigned s) const {
        if (s >= m()) throw Error(Errc::IndexOutOfRange, "frobenius index out of range");
        if (!frob_.empty()) return {frob_[s][x.packed]};
        return pow(x, pow_[s]);
    }

    /// x^(p^s) for any s >= 0
    Element frobenius_any(Element x, u64 s) const { return frobenius(x, static_cast<unsigned>(s % m())); }

    /// trace onto the subfield GF(p^d)
    Element trace_to(Element x, unsigned d) const {
        if (d == 0 || m() % d != 0) throw Error(Errc::NotADivisor, "subfield degree must divide m");
        Element r = zero();
        for (unsigned i = 0; i < m() / d; ++i) r = add(r, frobenius(x, i * d));
        return r;
    }

    Element norm_to(Element x, unsigned d) const {
        if (d == 0 || m() % d != 0) throw Error(Errc::NotADivisor, "subfield degree must divide m");
        Element r = one();
        for (unsigned i = 0; i < m() / d; ++i) r = mul(r, frobenius(x, i * d));
        return r;
    }

    bool in_subfield(Element x, unsigned d) const { return frobenius_any(x, d) == x; }

    std::optional<u32> log(Element x) const {
        if (exp_.empty() || x.packed == 0) return std::nullopt;
        return log_[x.packed];
    }

    /// multiplicative order of a nonzero element
    u64 order_of(Element x) const {
        if (x.packed == 0) throw Error(Errc::ZeroArgument, "order of zero");
        u64 o = q_ - 1;
        for (u64 r : num::prime_factors(q_ - 1))
            while (o % r == 0 && pow(x, o / r) == one()) o /= r;
        return o;
    }

    /// x in (F*)^k
    bool in_power_subgroup(Element x, u64 k) const {
        if (x.packed == 0) throw Error(Errc::ZeroArgument, "power-subgroup test of zero");
        const u64 n = q_ - 1;
        const u64 g = std::gcd(k % n, n);  // gcd(0, n) = n
        const bool r = pow(x, n / g) == one();
        if (!exp_.empty() && r != (log_[x.packed] % g == 0))
            throw Error(Errc::InternalMismatch, "power-subgroup test disagrees with log table");
        return r;
    }

    /// x in the product of the cyclic subgroups of F* with the given orders
    bool in_product_subgroup(Element x, std::span<const u64> orders) const {
        if (x.packed == 0) throw Error(Errc::ZeroArgument, "product-subgroup test of zero");
        const u64 n = q_ - 1;
        u64 l = 1;
        for (u64 o : orders) {
            if (o == 0 || n % o != 0) throw Error(Errc::OrderNotDividing, "subgroup order must divide q-1");
            l = std::lcm(l, o);
        }
        const bool r = pow(x, l) == one();
        if (!exp_.empty() && r != (log_[x.packed] % (n / l) == 0))
            throw Error(Errc::InternalMismatch, "product-subgroup test disagrees with log table");
        return r;
    }

    bool is_square(Element x) const { return x.packed == 0 || p() == 2 || in_power_subgroup(x, 2); }

    /// some square root of x, or nothing
    std::optional<Element> sqrt(Element x) const {
        if (x.packed == 0) return zero();
        if (p() == 2) return pow(x, q_ / 2);
        if (!is_square(x)) return std::nullopt;
        // Tonelli-Shanks
        u64 Q = q_ - 1;
        unsigned S = 0;
        while (Q % 2 == 0) {
            Q /= 2;
            ++S;
        }
        Element z = one();
        for (u32 r = 1; r < q_; ++r) {
            if (!is_square(Element{r})) {
                z = Element{r};
                break;
            }
        }
        Element c = pow(z, Q);
        Element t = pow(x, Q);
        Element R = pow(x, (Q + 1) / 2);
        unsigned M = S;
        while (t != one()) {
            unsigned i = 0;
            Element tt = t;
            while (tt != one()) {
                tt = mul(tt, tt);
                ++i;
            }
            Element b = c;
            for (unsigned j = 0; j + i + 1 < M; ++j) b = mul(b, b);
            M = i;
            c = mul(b, b);
            t = mul(t, c);
            R = mul(R, b);
        }
        return R;
    }

    /// the smaller (lexicographically) of the two square roots
    std::optional<Element> sqrt_lex_min(Element x) const {
        auto r = sqrt(x);
        if (!r) return r;
        Element o = neg(*r);
        return lex_rank(o) < lex_rank(*r) ? o : *r;
    }

    /// elements of the subfield GF(p^d), in packed order
    std::vector<Element> subfield_elements(unsigned d) const {
        if (d == 0 || m() % d != 0) throw Error(Errc::NotADivisor, "subfield degree must divide m");
        std::vector<Element> out;
        for (u32 x = 0; x < q_; ++x)
            if (in_subfield(Element{x}, d)) out.push_back(Element{x});
        return out;
    }

    void check(Element x) const {
        if (x.packed >= q_) throw Error(Errc::IndexOutOfRange, "element index out of range");
    }

private:
    template <std::size_t N>
    void unpack(u32 v, std::array<u32, N>& d) const {
        for (unsigned i = 0; i < spec_.m; ++i) {
            d[i] = v % spec_.p;
            v /= spec_.p;
        }
    }

    u32 add_digits(u32 x, u32 y) const {
        const u32 p = spec_.p;
        u32 r = 0;
        for (unsigned i = 0; i < spec_.m; ++i) {
            u32 s = x % p + y % p;
            if (s >= p) s -= p;
            r += s * pow_[i];
            x /= p;
            y /= p;
        }
        return r;
    }

    u32 neg_digits(u32 x) const {
        const u32 p = spec_.p;
        u32 r = 0;
        for (unsigned i = 0; i < spec_.m; ++i) {
            u32 d = x % p;
            r += (d ? p - d : 0) * pow_[i];
            x /= p;
        }
        return r;
    }

    Element pow_poly(Element x, u64 e) const {
        Element r = one();
        while (e) {
            if (e & 1) r = mul_poly(r, x);
            x = mul_poly(x, x);
            e >>= 1;
        }
        return r;
    }

    Element find_generator() const {
        if (q_ == 2) return one();
        const auto primes = num::prime_factors(q_ - 1);
        for (u32 r = 1; r < q_; ++r) {
            Element x = from_lex_rank(r);
            if (x.packed == 0) continue;
            bool full = true;
            for (u64 f : primes) {
                if (pow_poly(x, (q_ - 1) / f) == one()) {
                    full = false;
                    break;
                }
            }
            if (full) return x;
        }
        throw Error(Errc::InternalMismatch, "no primitive element found");
    }

    FieldSpec spec_;
    u32 q_ = 0;
    std::vector<u32> pow_;
    Element generator_;
    std::vector<u32> exp_, log_;
    std::vector<std::vector<u32>> frob_;
    std::vector<u32> add_, neg_;
};

/// The lexicographically smallest monic irreducible of degree m over GF(p),
/// coefficients compared from the constant term upward.
inline std::vector<u32> default_modulus(u32 p, unsigned m) {
    if (!num::is_prime(p)) throw Error(Errc::NotPrime, "p = " + std::to_string(p) + " is not prime");
    const u64 count = num::checked_pow(p, m);
    for (u64 r = 0; r < count; ++r) {
        poly::Poly f(m + 1, 0);
        f[m] = 1;
        u64 v = r;
        for (unsigned i = m; i-- > 0;) {
            f[i] = static_cast<u32>(v % p);  // f[0] varies slowest
            v /= p;
        }
        if (poly::is_irreducible(f, p)) return f;
    }
    throw Error(Errc::ReducibleModulus, "no irreducible polynomial found");
}

inline FieldPtr build_field(u32 p, unsigned m, std::optional<std::vector<u32>> modulus = std::nullopt,
                            FieldOptions opts = {}) {
    if (!num::is_prime(p)) throw Error(Errc::NotPrime, "p = " + std::to_string(p) + " is not prime");
    if (m == 0) throw Error(Errc::DegreeMismatch, "extension degree must be positive");
    if (num::checked_pow(p, m) > FieldCtx::max_order) throw Error(Errc::OrderTooLarge, "field order exceeds 2^24");
    FieldSpec spec{p, m, modulus ? *modulus : default_modulus(p, m)};
    return std::make_shared<const FieldCtx>(std::move(spec), opts);
}

}  // namespace semifield
