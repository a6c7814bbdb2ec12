#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semifield.hpp"

namespace semifield::theory {

// ---------------------------------------------------------------- number facts

/// Closed forms for p odd, 1 <= s < m, each also computed directly (gcds by the Euclidean
/// algorithm, subgroup statements by enumerating L).
struct NumberFacts {
    u32 p = 0;
    unsigned m = 0, s = 0, d = 0;  // d = gcd(s, m)
    unsigned v2_s = 0, v2_m = 0;
    u64 gcd_pm_plus_ps_plus = 0;   // gcd(p^m + 1, p^s + 1)
    unsigned gcd_2s_m = 0;
    u64 gcd_pm_minus_ps_plus = 0;  // gcd(p^m - 1, p^s + 1)
    u64 index = 0;                 // [L^(sigma-1) cap L^(sigma+1) : L^(sigma^2-1)]
    bool neg_half_power_in = false;  // -n^((sigma-1)/2) in L^(sigma-1), n a non-square
    bool half_power_in = false;      //  n^((sigma-1)/2) in L^(sigma-1)
};

namespace detail {

inline std::vector<bool> power_image(const FieldCtx& L, u64 k) {
    std::vector<bool> in(L.order(), false);
    for (u32 t = 1; t < L.order(); ++t) in[L.pow(Element{t}, k).packed] = true;
    return in;
}

inline Element first_non_square(const FieldCtx& L) {
    for (u32 r = 0; r < L.order(); ++r) {
        const Element x = L.from_lex_rank(r);
        if (x.packed && !L.is_square(x)) return x;
    }
    throw Error(Errc::InvalidParams, "no non-square");
}

inline void require_odd_s(u32 p, unsigned m, unsigned s) {
    if (p == 2) throw Error(Errc::CharTwoUnsupported, "needs odd p");
    if (s == 0 || s >= m) throw Error(Errc::SigmaOutOfRange, "needs 1 <= s < m");
}

}  // namespace detail

inline NumberFacts number_facts(u32 p, unsigned m, unsigned s) {
    detail::require_odd_s(p, m, s);
    using num::checked_pow;
    NumberFacts f;
    f.p = p;
    f.m = m;
    f.s = s;
    f.d = std::gcd(s, m);
    f.v2_s = num::v2(s);
    f.v2_m = num::v2(m);
    const unsigned v2_d = num::v2(f.d);
    const u64 pm = checked_pow(p, m), ps = checked_pow(p, s), pd = checked_pow(p, f.d);
    const bool same = v2_d == f.v2_m;

    auto mismatch = [&](const char* what) {
        throw Error(Errc::LemmaMismatch, std::string(what) + " disagrees at p=" + std::to_string(p) +
                                             " m=" + std::to_string(m) + " s=" + std::to_string(s));
    };

    f.gcd_pm_plus_ps_plus = std::gcd(pm + 1, ps + 1);
    if (f.gcd_pm_plus_ps_plus != (f.v2_s != f.v2_m ? 2 : pd + 1)) mismatch("gcd(p^m+1, p^s+1)");
    f.gcd_2s_m = std::gcd(2 * s, m);
    if (f.gcd_2s_m != (same ? f.d : 2 * f.d)) mismatch("gcd(2s, m)");
    f.gcd_pm_minus_ps_plus = std::gcd(pm - 1, ps + 1);
    if (f.gcd_pm_minus_ps_plus != (same ? 2 : pd + 1)) mismatch("gcd(p^m-1, p^s+1)");

    auto L = build_field(p, m);
    const u64 sigma = ps;
    const auto minus = detail::power_image(*L, sigma - 1);
    const auto plus = detail::power_image(*L, sigma + 1);
    const auto both = detail::power_image(*L, sigma * sigma - 1);
    u64 cap = 0, sq = 0;
    for (u32 x = 1; x < L->order(); ++x) {
        cap += minus[x] && plus[x];
        sq += both[x];
    }
    if (cap % sq != 0) mismatch("subgroup intersection");
    f.index = cap / sq;
    if (f.index != (same ? 1u : 2u)) mismatch("index of L^(sigma^2-1)");

    const Element n = detail::first_non_square(*L);
    const Element half = L->pow(n, (sigma - 1) / 2);
    f.neg_half_power_in = minus[L->neg(half).packed];
    f.half_power_in = minus[half.packed];
    const bool s_odd = (s / f.d) % 2 == 1, m_odd = (m / f.d) % 2 == 1;
    if (f.neg_half_power_in != (s_odd && m_odd)) mismatch("-n^((sigma-1)/2) membership");
    if (f.half_power_in != !s_odd) mismatch("n^((sigma-1)/2) membership");
    return f;
}

// ---------------------------------------------------------------- commutativity criteria

/// C(p,m,s,l,R) is isotopic to a commutative semifield iff l^(sigma+1) R^(sigma-1) lies in L^(sigma^2-1).
inline bool c_comm_criterion(const FieldCtx& L, const CParams& c) {
    if (auto v = c_validity(L, c); !v) throw Error(Errc::InvalidParams, "not a valid C instance: " + v.detail);
    const u64 sigma = num::checked_pow(L.p(), c.s);
    const Element x = L.mul(L.mul(L.frobenius(c.l, c.s), c.l), L.div(L.frobenius(c.R, c.s), c.R));
    return L.in_power_subgroup(x, sigma * sigma - 1);
}

struct BCommResult {
    bool holds = false;
    std::string via;  // "special_case_i", "special_case_ii", "search" or "none"
    std::optional<Coords> v;
};

/// Both equations in (v0, v1), with f = n v0 + l n v0^sigma - l n N v1^sigma:
///   l f^sigma = nN v0 + l nN v0^sigma - nN v1
///   v0 = l v0^sigma + n v1 - l n N v1^sigma
inline bool b_comm_equations(const FieldCtx& L, const BParams& b, Element v0, Element v1) {
    const unsigned s = b.s;
    const Element n = b.n, N = b.N, l = b.l;
    const Element nN = L.mul(n, N), ln = L.mul(l, n), lnN = L.mul(ln, N);
    const Element v0s = L.frobenius(v0, s), v1s = L.frobenius(v1, s);
    const Element f = L.sub(L.add(L.mul(n, v0), L.mul(ln, v0s)), L.mul(lnN, v1s));
    const Element lhs1 = L.mul(l, L.frobenius(f, s));
    const Element rhs1 = L.sub(L.add(L.mul(nN, v0), L.mul(L.mul(l, nN), v0s)), L.mul(nN, v1));
    const Element rhs2 = L.sub(L.add(L.mul(l, v0s), L.mul(n, v1)), L.mul(lnN, v1s));
    return lhs1 == rhs1 && v0 == rhs2;
}

/// Exhaustive search over (v0, v1) != (0, 0) in increasing packed order.
inline std::optional<Coords> b_comm_solve(const FieldCtx& L, const BParams& b) {
    for (u32 v1 = 0; v1 < L.order(); ++v1)
        for (u32 v0 = 0; v0 < L.order(); ++v0) {
            if (v0 == 0 && v1 == 0) continue;
            if (b_comm_equations(L, b, Element{v0}, Element{v1})) return Coords{Element{v0}, Element{v1}};
        }
    return std::nullopt;
}

inline BCommResult b_comm_criterion(const FieldCtx& L, const BParams& b) {
    if (auto v = b_validity(L, b); !v) throw Error(Errc::InvalidParams, "not a valid B instance: " + v.detail);
    const u64 sm1 = num::checked_pow(L.p(), b.s) - 1;
    const Element n_sm1 = L.div(L.frobenius(b.n, b.s), b.n);
    if (L.mul(b.N, b.N) == n_sm1 && L.in_power_subgroup(L.mul(b.l, b.N), sm1)) return {true, "special_case_i", {}};
    if (b.N == n_sm1 && L.in_power_subgroup(b.l, sm1)) return {true, "special_case_ii", {}};
    if (auto v = b_comm_solve(L, b)) return {true, "search", v};
    return {false, "none", {}};
}

// ---------------------------------------------------------------- commutative catalogs

struct CommutativeC {
    unsigned s = 0;
    unsigned canonical_s = 0;  // min(s, m - s); C(s) and C(m - s) are isotopic
    int subfamily = 0;         // 1: m/d odd, l = 1, R a non-square of K_1;  2: m/d even, l = 1/N, R = nN
    CParams params;
};

/// The commutative member of C(p,m,s,.,.) up to isotopy.
inline CommutativeC commutative_C_representative(u32 p, unsigned m, unsigned s) {
    detail::require_odd_s(p, m, s);
    const unsigned d = std::gcd(s, m);
    CommutativeC out;
    out.s = s;
    out.canonical_s = std::min(s, m - s);
    if ((m / d) % 2 == 1) {
        auto L = build_field(p, m);
        const u64 half = (num::checked_pow(p, d) - 1) / 2;
        for (u32 r = 0; r < L->order(); ++r) {
            const Element x = L->from_lex_rank(r);
            if (x.packed && L->in_subfield(x, d) && L->pow(x, half) != L->one()) {
                out.subfamily = 1;
                out.params = CParams{s, L->one(), x};
                return out;
            }
        }
        throw Error(Errc::InternalMismatch, "K_1 has no non-square");
    }
    auto tw = build_tower(p, m, s);
    const FieldCtx& L = *tw->L();
    out.subfamily = 2;
    out.params = CParams{s, L.inv(tw->N()), L.mul(tw->n(), tw->N())};
    return out;
}

/// One representative per s <= m/2; floor(m/2) of them.
inline std::vector<CommutativeC> classify_commutative_C(u32 p, unsigned m) {
    std::vector<CommutativeC> out;
    for (unsigned s = 1; 2 * s <= m; ++s) out.push_back(commutative_C_representative(p, m, s));
    return out;
}

struct CatalogEntry {
    int subfamily = 0;       // 1..4 of the exceptional B cases; 5 for the (1, n, n^(sigma-1)) polynomial form
    BParams params;
    bool valid = false;      // b_validity
    bool shortcut = false;   // a closed-form sufficient condition for validity holds (subfamilies 3, 4 only)
    bool alt_polynomial_ok = false;  // subfamily 4/5 only: t^(sigma+1) + (n^sigma - n) t + n - n^2 has no root
};

inline bool k1_non_square(const FieldCtx& L, unsigned d, Element x) {
    if (x.packed == 0 || !L.in_subfield(x, d)) return false;
    return L.pow(x, (num::checked_pow(L.p(), d) - 1) / 2) != L.one();
}

/// Exceptional commutative cases of the B family at (p, m, s), with validity side conditions evaluated.
inline std::vector<CatalogEntry> commutative_catalog(u32 p, unsigned m, unsigned s) {
    detail::require_odd_s(p, m, s);
    auto L = build_field(p, m);
    const FieldCtx& f = *L;
    const unsigned d = std::gcd(s, m);
    const bool m_odd = (m / d) % 2 == 1, s_odd = (s / d) % 2 == 1;
    const u64 half = (num::checked_pow(p, s) - 1) / 2;
    std::vector<CatalogEntry> out;
    std::set<std::tuple<u32, u32, u32>> seen;
    auto push = [&](int fam, BParams b, bool shortcut) {
        if (!seen.insert({b.l.packed, b.n.packed, b.N.packed + 100000u * fam}).second) return;
        CatalogEntry e{fam, b, static_cast<bool>(b_validity(f, b)), shortcut, false};
        out.push_back(e);
    };
    for (u32 x = 1; x < f.order(); ++x) {
        const Element n{x};
        if (f.is_square(n)) continue;
        const Element N = f.pow(n, half);
        if (!m_odd || !s_odd) push(1, BParams{s, f.inv(N), n, N}, false);
        if (s_odd) push(2, BParams{s, f.neg(f.inv(N)), n, f.neg(N)}, false);
    }
    if (m_odd) {
        for (u32 x = 1; x < f.order(); ++x) {
            const Element v{x};
            const Element v2 = f.mul(v, v);
            push(3, BParams{s, f.one(), v2, f.div(f.frobenius(v, s), v)},
                 f.in_subfield(v, d) && k1_non_square(f, d, f.sub(v2, f.one())));
        }
        for (u32 x = 1; x < f.order(); ++x) {
            const Element n{x};
            const Element N = f.div(f.frobenius(n, s), n);
            const bool shortcut = f.in_subfield(n, d) && k1_non_square(f, d, f.sub(f.one(), f.inv(n)));
            push(4, BParams{s, f.one(), n, N}, shortcut);
            // the alternative polynomial form of the same subfamily
            const Element g = f.sub(f.frobenius(n, s), n), c = f.sub(n, f.mul(n, n));
            bool root = false;
            for (u32 t = 0; t < f.order() && !root; ++t) {
                const Element T{t};
                root = f.add(f.add(f.mul(f.frobenius(T, s), T), f.mul(g, T)), c).packed == 0;
            }
            out.back().alt_polynomial_ok = !root;
        }
    }
    return out;
}

// ---------------------------------------------------------------- nuclei predictions

/// Prime-field dimension bounds; lo == hi for an exact prediction.
struct DimBound {
    unsigned lo = 0, hi = 0;
    bool exact() const { return lo == hi; }
    bool admits(unsigned v) const { return lo <= v && v <= hi; }
};

struct Prediction {
    Family family = Family::Custom;
    std::string branch;  // which closed form fired
    DimBound left, middle, right, center;
    unsigned k1_dim = 0, k2_dim = 0;
    bool containment_only = false;  // lower bounds, not equality
    std::optional<unsigned> w_kernel_dim;
    std::vector<std::string> notes;
    bool applicable() const { return !branch.empty() && branch != "none"; }
};

/// The K_1-linear map t -> (1+n a0) t + (1+n a1+nN a0^s) t^s + (n a2+nN a1^s) t^(s^2) + nN a2^s t^(s^3).
struct WKernelSpec {
    Element alpha0, alpha1, alpha2;
};

inline WKernelSpec w_kernel_spec(const FieldCtx& L, unsigned s, Element n, Element N) {
    const Element ns = L.frobenius(n, s);
    const Element nN = L.mul(n, N), N2 = L.mul(N, N), n2N2 = L.mul(L.mul(n, n), N2);
    const Element den = L.mul(n, L.sub(L.mul(n, N2), ns));
    if (den.packed == 0) throw Error(Errc::UnsupportedBranch, "N^2 = n^(sigma-1): no kernel spec");
    WKernelSpec w;
    w.alpha0 = L.div(L.sub(ns, n2N2), den);
    w.alpha1 = L.div(L.sub(L.sub(L.add(ns, n2N2), nN), L.mul(L.mul(ns, n), N)), den);
    w.alpha2 = L.div(L.mul(nN, L.sub(ns, L.one())), den);
    return w;
}

inline Subspace w_kernel(const FieldCtx& L, unsigned s, Element n, Element N) {
    const WKernelSpec w = w_kernel_spec(L, s, n, N);
    const unsigned m = L.m();
    const Element nN = L.mul(n, N);
    auto fr = [&](Element x, unsigned k) { return L.frobenius(x, (k * s) % m); };
    const Element c0 = L.add(L.one(), L.mul(n, w.alpha0));
    const Element c1 = L.add(L.add(L.one(), L.mul(n, w.alpha1)), L.mul(nN, fr(w.alpha0, 1)));
    const Element c2 = L.add(L.mul(n, w.alpha2), L.mul(nN, fr(w.alpha1, 1)));
    const Element c3 = L.mul(nN, fr(w.alpha2, 1));
    VectorSpace sp(L.p(), m);
    auto map = LinearMap::from_function(sp, sp, [&](u32 t) {
        const Element T{t};
        Element r = L.mul(c0, T);
        r = L.add(r, L.mul(c1, fr(T, 1)));
        r = L.add(r, L.mul(c2, fr(T, 2)));
        return L.add(r, L.mul(c3, fr(T, 3))).packed;
    });
    return map.kernel();
}

namespace detail {

inline DimBound exact(unsigned v) { return {v, v}; }

/// x in K_1* L*^(sigma+1)
inline bool in_k1_times_plus(const FieldCtx& L, unsigned s, Element x) {
    const unsigned d = std::gcd(s, L.m());
    const u64 q1 = L.order() - 1;
    const u64 sp1 = num::checked_pow(L.p(), s) + 1;
    std::vector<u64> orders{num::checked_pow(L.p(), d) - 1, q1 / std::gcd(sp1, q1)};
    return L.in_product_subgroup(x, orders);
}

inline Prediction predict_bc(const FieldCtx& L, Family fam, const XParams& X) {
    const unsigned m = L.m(), s = X.s;
    const unsigned d1 = std::gcd(s, m), d2 = std::gcd(2 * s, m);
    const bool half_degree = d2 == m;  // sigma^2 = 1 on L
    Prediction pr;
    pr.family = fam;
    pr.k1_dim = d1;
    pr.k2_dim = d2;
    pr.left = pr.right = exact(d1);
    pr.center = exact(d1);
    const bool is_c = X.v.packed == 0;
    if (!is_c && X.v != L.one()) throw Error(Errc::InternalMismatch, "X with v != 0, 1 must be rescaled first");
    if (is_c) {
        const Element R = L.neg(L.mul(X.n, X.N));
        if (half_degree) {
            pr.branch = "c_half_degree_middle_is_L";
            pr.middle = exact(m);
        } else {
            const bool ext = in_k1_times_plus(L, s, R);
            pr.branch = ext ? "c_middle_quadratic_over_K2" : "c_middle_is_K2";
            pr.middle = exact(ext ? 2 * d2 : d2);
        }
        return pr;
    }
    const Element n_sm1 = L.div(L.frobenius(X.n, s), X.n);
    if (X.N == n_sm1) {
        const bool ext = in_k1_times_plus(L, s, L.sub(L.one(), L.inv(X.n)));
        pr.branch = ext ? "b_power_N_middle_quadratic_over_K2" : "b_power_N_middle_is_K2";
        pr.middle = exact(ext ? 2 * d2 : d2);
        return pr;
    }
    if (half_degree) {
        pr.branch = "b_half_degree_middle_quadratic_over_K1";
        pr.middle = exact(2 * d1);
        return pr;
    }
    if (L.mul(X.N, X.N) == n_sm1) {
        pr.branch = "b_square_N_middle_interval";
        pr.middle = {d1, 3 * d1};
        pr.notes.push_back("exact middle nucleus not determined in closed form; measured value is beyond-closed-form data");
        return pr;
    }
    const unsigned w = w_kernel(L, s, X.n, X.N).dim();
    pr.branch = "b_middle_from_w_kernel";
    pr.w_kernel_dim = w;
    pr.middle = exact(d1 + w);
    return pr;
}

}  // namespace detail

/// Closed-form nuclei for the family of P, as prime-field dimensions.
inline Prediction predict_nuclei(const Presemifield& P) {
    const auto& ctx = P.context();
    const Family fam = P.family();
    Prediction pr;
    pr.family = fam;
    pr.branch = "none";
    if (fam == Family::Field) {
        const unsigned n = P.space().dim();
        pr.branch = "field";
        pr.left = pr.middle = pr.right = pr.center = detail::exact(n);
        return pr;
    }
    if (fam == Family::Twisted) {
        const FieldCtx& L = *ctx.L;
        const auto& t = std::get<TwistedParams>(P.provenance().params);
        const unsigned m = L.m();
        const unsigned d1 = std::gcd(t.s, m), d2 = std::gcd(2 * t.s, m);
        pr.k1_dim = d1;
        pr.k2_dim = d2;
        if (d2 == m) {
            pr.branch = "twisted_sigma_squared_trivial_is_field";
            pr.left = pr.middle = pr.right = pr.center = detail::exact(m);
        } else {
            pr.branch = "twisted_albert";
            pr.left = pr.right = pr.center = detail::exact(d1);
            pr.middle = detail::exact(d2);
        }
        return pr;
    }
    if (fam == Family::B || fam == Family::C || fam == Family::X) {
        const FieldCtx& L = *ctx.L;
        if (L.p() == 2) throw Error(Errc::UnsupportedBranch, "no closed form in characteristic 2");
        XParams X = as_x_params(L, P.provenance().params);
        if (X.v.packed != 0 && X.v != L.one()) {
            // rescale (a,b) -> (a, b v): X(v) is isotopic to B with n v^2, N v^(sigma-1)
            const Element v = X.v;
            X = XParams{X.s, L.one(), X.l, L.mul(X.n, L.mul(v, v)), L.mul(X.N, L.div(L.frobenius(v, X.s), v))};
            auto pr2 = detail::predict_bc(L, fam, X);
            pr2.notes.push_back("predicted through the isotopic B instance");
            return pr2;
        }
        return detail::predict_bc(L, fam, X);
    }
    if (fam == Family::A) {
        const Tower& tw = *ctx.tower;
        const FieldCtx& F = *tw.F();
        const unsigned s = std::get<AParams>(P.provenance().params).s;
        const unsigned M = F.m();
        // {z : conj(z) = z^sigma = z^(1/sigma)}
        std::vector<u32> members;
        for (u32 z = 0; z < F.order(); ++z) {
            const Element Z{z};
            const Element zs = F.frobenius(Z, s % M);
            if (tw.conj(Z) == zs && F.frobenius(zs, s % M) == Z) members.push_back(z);
        }
        const Subspace mid = Subspace::span(tw.F_space(), members);
        if (mid.size() != members.size()) throw Error(Errc::InternalMismatch, "fixed set is not a subspace");
        pr.branch = "a_containment";
        pr.containment_only = true;
        pr.left = pr.right = pr.center = {1, M};
        pr.middle = {mid.dim(), M};
        pr.notes.push_back("lower bounds only");
        return pr;
    }
    return pr;
}

enum class Agree { Match, Mismatch, NotApplicable };

constexpr const char* to_string(Agree a) {
    switch (a) {
        case Agree::Match: return "match";
        case Agree::Mismatch: return "mismatch";
        case Agree::NotApplicable: return "not-applicable";
    }
    return "not-applicable";
}

struct AgreementReport {
    Agree left = Agree::NotApplicable, middle = Agree::NotApplicable, right = Agree::NotApplicable,
          center = Agree::NotApplicable, overall = Agree::NotApplicable;
};

inline AgreementReport compare(const Prediction& pr, const NucleiReport& r) {
    AgreementReport a;
    if (!pr.applicable()) return a;
    auto one = [](const DimBound& b, const NucleusInfo& n) {
        if (b.hi == 0) return Agree::NotApplicable;
        return b.admits(n.dim()) && n.is_subfield() ? Agree::Match : Agree::Mismatch;
    };
    a.left = one(pr.left, r.left);
    a.middle = one(pr.middle, r.middle);
    a.right = one(pr.right, r.right);
    a.center = one(pr.center, r.center);
    a.overall = Agree::Match;
    for (Agree x : {a.left, a.middle, a.right, a.center})
        if (x == Agree::Mismatch) a.overall = Agree::Mismatch;
    return a;
}

}  // namespace semifield::theory
