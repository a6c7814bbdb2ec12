#pragma once

#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "presemifield.hpp"

namespace semifield {

struct Validity {
    bool ok = true;
    Errc reason = Errc::InvalidParams;
    std::string detail;

    explicit operator bool() const { return ok; }
    static Validity fail(Errc e, std::string d) { return {false, e, std::move(d)}; }
    void raise() const {
        if (!ok) throw Error(reason, detail);
    }
};

namespace detail {

inline u64 frob_exponent(const FieldCtx& K, unsigned s) { return num::checked_pow(K.p(), s); }

/// -l in L^(sigma-1)?  sigma = p^s acting on L.
inline bool neg_l_in_sigma_minus_one(const FieldCtx& L, Element l, u64 s) {
    return L.in_power_subgroup(L.neg(l), num::checked_pow(L.p(), static_cast<unsigned>(s)) - 1);
}

inline Validity check_s_in_open_range(const FieldCtx& L, unsigned s) {
    if (s == 0 || s >= L.m()) return Validity::fail(Errc::SigmaOutOfRange, "need 0 < s < m");
    return {};
}

inline Validity check_odd(const FieldCtx& L) {
    if (L.p() == 2) return Validity::fail(Errc::CharTwoUnsupported, "family needs odd p");
    return {};
}

}  // namespace detail

// ---------------------------------------------------------------- validity

inline Validity twisted_validity(const FieldCtx& L, unsigned s, Element l) {
    if (s >= L.m()) return Validity::fail(Errc::SigmaOutOfRange, "need 0 <= s < m");
    if (l.packed == 0) return Validity::fail(Errc::InvalidL, "l must be nonzero");
    if (detail::neg_l_in_sigma_minus_one(L, l, s)) return Validity::fail(Errc::InvalidL, "-l lies in L^(sigma-1)");
    return {};
}

/// Orders of the subgroups L* and F*^(sigma+1) of F*.
inline std::vector<u64> a_mu_subgroup_orders(const Tower& tw) {
    const u64 Q1 = tw.F()->order() - 1;
    const u64 sp1 = num::checked_pow(tw.p(), tw.s()) + 1;
    return {tw.q() - 1, Q1 / std::gcd(sp1 % Q1, Q1)};
}

inline Validity a_validity(const Tower& tw, Element l, Element mu) {
    const FieldCtx& L = *tw.L();
    const FieldCtx& F = *tw.F();
    if (tw.s() == 0 || tw.s() >= 2 * tw.m()) return Validity::fail(Errc::SigmaOutOfRange, "need 1 <= s < 2m");
    if (l.packed == 0) return Validity::fail(Errc::InvalidL, "l must be nonzero");
    if (detail::neg_l_in_sigma_minus_one(L, l, tw.s())) return Validity::fail(Errc::InvalidL, "-l lies in L^(sigma-1)");
    if (mu.packed == 0) return Validity::fail(Errc::InvalidMu, "mu must be nonzero");
    const auto orders = a_mu_subgroup_orders(tw);
    if (F.in_product_subgroup(mu, orders)) return Validity::fail(Errc::InvalidMu, "mu lies in L* F*^(sigma+1)");
    return {};
}

/// first root in L of t^(sigma+1) - v t^sigma - (v/N) t + 1/(nN)
inline std::optional<Element> x_polynomial_root(const FieldCtx& L, unsigned s, Element v, Element n, Element N) {
    const Element vN = L.div(v, N);
    const Element c = L.inv(L.mul(n, N));
    for (u32 t = 0; t < L.order(); ++t) {
        const Element T{t};
        const Element ts = L.frobenius(T, s);
        Element val = L.sub(L.mul(ts, T), L.mul(v, ts));
        val = L.add(L.sub(val, L.mul(vN, T)), c);
        if (val.packed == 0) return T;
    }
    return std::nullopt;
}

/// first root in L of x^(sigma+1) + (1 - 1/N) x + (1/n - 1)/N
inline std::optional<Element> b_polynomial_root(const FieldCtx& L, unsigned s, Element n, Element N) {
    const Element g = L.sub(L.one(), L.inv(N));
    const Element f = L.div(L.sub(L.inv(n), L.one()), N);
    for (u32 x = 0; x < L.order(); ++x) {
        const Element X{x};
        Element val = L.add(L.add(L.mul(L.frobenius(X, s), X), L.mul(g, X)), f);
        if (val.packed == 0) return X;
    }
    return std::nullopt;
}

inline Validity x_validity(const FieldCtx& L, const XParams& P) {
    if (auto v = detail::check_odd(L); !v) return v;
    if (auto v = detail::check_s_in_open_range(L, P.s); !v) return v;
    if (P.l.packed == 0) return Validity::fail(Errc::InvalidL, "l must be nonzero");
    if (P.n.packed == 0 || P.N.packed == 0) return Validity::fail(Errc::InvalidParams, "n and N must be nonzero");
    if (detail::neg_l_in_sigma_minus_one(L, P.l, P.s)) return Validity::fail(Errc::InvalidL, "-l lies in L^(sigma-1)");
    if (auto r = x_polynomial_root(L, P.s, P.v, P.n, P.N))
        return Validity::fail(Errc::PolynomialHasRoot, "polynomial has root with packed index " + std::to_string(r->packed));
    return {};
}

inline Validity b_validity(const FieldCtx& L, const BParams& P) {
    if (auto v = detail::check_odd(L); !v) return v;
    if (auto v = detail::check_s_in_open_range(L, P.s); !v) return v;
    if (P.l.packed == 0) return Validity::fail(Errc::InvalidL, "l must be nonzero");
    if (P.n.packed == 0 || P.N.packed == 0) return Validity::fail(Errc::InvalidParams, "n and N must be nonzero");
    if (detail::neg_l_in_sigma_minus_one(L, P.l, P.s)) return Validity::fail(Errc::InvalidL, "-l lies in L^(sigma-1)");
    if (auto r = b_polynomial_root(L, P.s, P.n, P.N))
        return Validity::fail(Errc::PolynomialHasRoot, "polynomial has root with packed index " + std::to_string(r->packed));
    return {};
}

inline Validity c_validity(const FieldCtx& L, const CParams& P) {
    if (auto v = detail::check_odd(L); !v) return v;
    if (auto v = detail::check_s_in_open_range(L, P.s); !v) return v;
    if (P.l.packed == 0) return Validity::fail(Errc::InvalidL, "l must be nonzero");
    if (P.R.packed == 0) return Validity::fail(Errc::InvalidParams, "R must be nonzero");
    if (detail::neg_l_in_sigma_minus_one(L, P.l, P.s)) return Validity::fail(Errc::InvalidL, "-l lies in L^(sigma-1)");
    if (L.in_power_subgroup(P.R, detail::frob_exponent(L, P.s) + 1))
        return Validity::fail(Errc::RInPowerSubgroup, "R lies in L^(sigma+1)");
    return {};
}

/// t^(sigma+1) + t g - f has no root in L
inline Validity knuth_validity(const FieldCtx& L, const KnuthParams& P) {
    if (P.s >= L.m()) return Validity::fail(Errc::SigmaOutOfRange, "need 0 <= s < m");
    for (u32 t = 0; t < L.order(); ++t) {
        const Element T{t};
        Element val = L.sub(L.add(L.mul(L.frobenius(T, P.s), T), L.mul(T, P.g)), P.f);
        if (val.packed == 0)
            return Validity::fail(Errc::ConditionViolated, "t^(sigma+1) + tg - f vanishes at packed index " + std::to_string(t));
    }
    return {};
}

/// X, B and C all as X parameters (B: v = 1; C: v = 0, n = 1, N = -R).
inline XParams as_x_params(const FieldCtx& L, const FamilyParams& fp) {
    if (auto x = std::get_if<XParams>(&fp)) return *x;
    if (auto b = std::get_if<BParams>(&fp)) return {b->s, L.one(), b->l, b->n, b->N};
    if (auto c = std::get_if<CParams>(&fp)) return {c->s, L.zero(), c->l, L.one(), L.neg(c->R)};
    throw Error(Errc::WrongFamily, "not an X, B or C instance");
}

// ---------------------------------------------------------------- products

/// (a,b)*(c,d) = (h(a,b,c,d), ad + bc) on pairs of L packed as a + q b
struct XProduct {
    FieldPtr L;
    unsigned s = 1;
    u32 q = 0;
    Element l, N, nN, nv, nvl;

    XProduct(FieldPtr field, const XParams& P) : L(std::move(field)), s(P.s), q(L->order()), l(P.l), N(P.N) {
        nN = L->mul(P.n, P.N);
        nv = L->mul(P.n, P.v);
        nvl = L->mul(nv, P.l);
    }

    Element h(Element a, Element b, Element c, Element d) const {
        const FieldCtx& f = *L;
        const Element as = f.frobenius(a, s), bs = f.frobenius(b, s), cs = f.frobenius(c, s), ds = f.frobenius(d, s);
        Element r = f.sub(f.mul(a, cs), f.mul(nN, f.mul(b, ds)));
        r = f.add(r, f.mul(l, f.sub(f.mul(as, c), f.mul(nN, f.mul(bs, d)))));
        if (nv.packed != 0) {
            r = f.add(r, f.mul(nv, f.sub(f.mul(N, f.mul(a, ds)), f.mul(b, cs))));
            r = f.add(r, f.mul(nvl, f.sub(f.mul(as, d), f.mul(N, f.mul(bs, c)))));
        }
        return r;
    }

    u32 operator()(u32 x, u32 y) const {
        const FieldCtx& f = *L;
        const Element a{x % q}, b{x / q}, c{y % q}, d{y / q};
        return h(a, b, c, d).packed + q * f.add(f.mul(a, d), f.mul(b, c)).packed;
    }
};

/// x y^sigma + l x^sigma y on L
struct TwistedProduct {
    FieldPtr L;
    unsigned s;
    Element l;
    u32 operator()(u32 x, u32 y) const {
        const FieldCtx& f = *L;
        const Element X{x}, Y{y};
        return f.add(f.mul(X, f.frobenius(Y, s)), f.mul(l, f.mul(f.frobenius(X, s), Y))).packed;
    }
};

/// Odd p: T(w x y) + T(w mu (conj(x) o y)) w.  p = 2: T(mu (conj(x) o y)) + T(x y) mu.
/// Here x o y = x y^sigma + l x^sigma y on F and T(x) = x + conj(x).
struct AProduct {
    TowerPtr tw;
    Element lF, mu;

    Element twisted(Element x, Element y) const {
        const FieldCtx& F = *tw->F();
        return F.add(F.mul(x, tw->sigma_F(y)), F.mul(lF, F.mul(tw->sigma_F(x), y)));
    }

    u32 operator()(u32 x, u32 y) const {
        const FieldCtx& F = *tw->F();
        const Element X{x}, Y{y};
        const Element t2 = F.mul(mu, twisted(tw->conj(X), Y));
        const Element xy = F.mul(X, Y);
        if (tw->p() == 2) return F.add(tw->rel_trace(t2), F.mul(tw->rel_trace(xy), mu)).packed;
        const Element w = tw->omega();
        return F.add(tw->rel_trace(F.mul(w, xy)), F.mul(tw->rel_trace(F.mul(w, t2)), w)).packed;
    }
};

// ---------------------------------------------------------------- constructors

inline Presemifield make_twisted(const FieldPtr& L, unsigned s, Element l, Materialize mat = Materialize::Auto) {
    twisted_validity(*L, s, l).raise();
    Provenance prov{Family::Twisted, TwistedParams{s, l}, {}};
    if ((2 * s) % L->m() == 0) prov.flags.push_back("sigma_squared_is_identity");
    return Presemifield::certify(VectorSpace(L->p(), L->m()), TwistedProduct{L, s, l}, std::move(prov),
                                 {Carrier::L, L, nullptr}, mat);
}

/// A(p,m,s,l,mu) on F; sigma = p^s acts on F with 1 <= s < 2m (s is taken from the tower).
inline Presemifield make_A(const TowerPtr& tw, Element l, Element mu, Materialize mat = Materialize::Auto) {
    a_validity(*tw, l, mu).raise();
    Provenance prov{Family::A, AParams{tw->s(), l, mu}, {}};
    if ((2 * tw->s()) % tw->m() == 0) prov.flags.push_back("twisted_ingredient_is_field");
    if (tw->s() % tw->m() == 0) prov.flags.push_back("sigma_trivial_on_L");
    return Presemifield::certify(VectorSpace(tw->p(), 2 * tw->m()), AProduct{tw, tw->embed(l), mu}, std::move(prov),
                                 {Carrier::F, tw->L(), tw}, mat);
}

inline Presemifield make_X(const FieldPtr& L, const XParams& P, Materialize mat = Materialize::Auto) {
    x_validity(*L, P).raise();
    return Presemifield::certify(VectorSpace(L->p(), 2 * L->m()), XProduct(L, P), Provenance{Family::X, P, {}},
                                 {Carrier::Coords, L, nullptr}, mat);
}

inline Presemifield make_B(const FieldPtr& L, const BParams& P, Materialize mat = Materialize::Auto) {
    b_validity(*L, P).raise();
    return Presemifield::certify(VectorSpace(L->p(), 2 * L->m()), XProduct(L, as_x_params(*L, P)),
                                 Provenance{Family::B, P, {}}, {Carrier::Coords, L, nullptr}, mat);
}

inline Presemifield make_C(const FieldPtr& L, const CParams& P, Materialize mat = Materialize::Auto) {
    c_validity(*L, P).raise();
    return Presemifield::certify(VectorSpace(L->p(), 2 * L->m()), XProduct(L, as_x_params(*L, P)),
                                 Provenance{Family::C, P, {}}, {Carrier::Coords, L, nullptr}, mat);
}

/// (ac + n (bd)^sigma, ad + bc) with n the tower's non-square
inline Presemifield make_dickson(const TowerPtr& tw, unsigned s, Materialize mat = Materialize::Auto) {
    const FieldPtr L = tw->L();
    if (L->p() == 2) throw Error(Errc::CharTwoUnsupported, "Dickson semifields need odd p");
    if (s == 0 || s >= L->m()) throw Error(Errc::ConditionViolated, "need 0 < s < m");
    const Element n = tw->n();
    const u32 q = L->order();
    auto fn = [L, n, s, q](u32 x, u32 y) {
        const FieldCtx& f = *L;
        const Element a{x % q}, b{x / q}, c{y % q}, d{y / q};
        const Element first = f.add(f.mul(a, c), f.mul(n, f.frobenius(f.mul(b, d), s)));
        return first.packed + q * f.add(f.mul(a, d), f.mul(b, c)).packed;
    };
    return Presemifield::certify(VectorSpace(L->p(), 2 * L->m()), fn, Provenance{Family::Dickson, DicksonParams{s}, {}},
                                 {Carrier::Coords, L, tw}, mat);
}

/// (ac + l b^q d, a^q d + bc) with q = p^(m/2), l in L outside GF(q)
inline Presemifield make_hughes_kleinfeld(const TowerPtr& tw, Element l, Materialize mat = Materialize::Auto) {
    const FieldPtr L = tw->L();
    if (L->p() == 2) throw Error(Errc::CharTwoUnsupported, "Hughes-Kleinfeld construction needs odd p");
    if (L->m() % 2 != 0) throw Error(Errc::ConditionViolated, "need m even");
    const unsigned k = L->m() / 2;
    if (L->in_subfield(l, k)) throw Error(Errc::ConditionViolated, "l must lie outside GF(p^(m/2))");
    const u32 q = L->order();
    auto fn = [L, l, k, q](u32 x, u32 y) {
        const FieldCtx& f = *L;
        const Element a{x % q}, b{x / q}, c{y % q}, d{y / q};
        const Element first = f.add(f.mul(a, c), f.mul(l, f.mul(f.frobenius(b, k), d)));
        const Element second = f.add(f.mul(f.frobenius(a, k), d), f.mul(b, c));
        return first.packed + q * second.packed;
    };
    return Presemifield::certify(VectorSpace(L->p(), 2 * L->m()), fn,
                                 Provenance{Family::HughesKleinfeld, HKParams{l}, {}}, {Carrier::Coords, L, tw}, mat);
}

/// (ac + b^(1/sigma) d f, bc + a^sigma d + bdg) on pairs of L
inline Presemifield make_knuth(const FieldPtr& L, const KnuthParams& P, Materialize mat = Materialize::Auto) {
    knuth_validity(*L, P).raise();
    const u32 q = L->order();
    const unsigned inv_s = (L->m() - P.s) % L->m();
    auto fn = [L, P, inv_s, q](u32 x, u32 y) {
        const FieldCtx& f = *L;
        const Element a{x % q}, b{x / q}, c{y % q}, d{y / q};
        const Element first = f.add(f.mul(a, c), f.mul(f.frobenius(b, inv_s), f.mul(d, P.f)));
        const Element second =
            f.add(f.add(f.mul(b, c), f.mul(f.frobenius(a, P.s), d)), f.mul(f.mul(b, d), P.g));
        return first.packed + q * second.packed;
    };
    return Presemifield::certify(VectorSpace(L->p(), 2 * L->m()), fn, Provenance{Family::Knuth, P, {}},
                                 {Carrier::Coords, L, nullptr}, mat);
}

// ---------------------------------------------------------------- projection machinery

struct CompatibleSet {
    VectorSpace space;
    std::vector<ProductFn> ops;
    std::vector<Subspace> subgroups;
};

struct CompatibilityResult {
    bool compatible = true;
    std::optional<std::pair<u32, u32>> witness;  // nonzero x, y with every x *_i y in A_i
};

/// Exhaustive over all nonzero pairs.
inline CompatibilityResult compatibility_check(const CompatibleSet& cs) {
    if (cs.ops.size() != cs.subgroups.size()) throw Error(Errc::DimensionMismatch, "one subgroup per product");
    for (const auto& A : cs.subgroups)
        if (!(A.space() == cs.space)) throw Error(Errc::DimensionMismatch, "subgroup lives in another space");
    std::vector<std::vector<bool>> member;
    for (const auto& A : cs.subgroups) member.push_back(A.membership());
    const u32 o = cs.space.order();
    for (u32 x = 1; x < o; ++x)
        for (u32 y = 1; y < o; ++y) {
            bool all_in = true;
            for (std::size_t i = 0; i < cs.ops.size() && all_in; ++i) all_in = member[i][cs.ops[i](x, y)];
            if (all_in) return {false, std::make_pair(x, y)};
        }
    return {};
}

/// x o y = sum_i f_i(x *_i y)
inline Presemifield projection_product(const CompatibleSet& cs, const std::vector<LinearMap>& maps,
                                       PresemifieldContext ctx = {}, Materialize mat = Materialize::Auto) {
    if (cs.ops.size() != cs.subgroups.size() || maps.size() != cs.ops.size())
        throw Error(Errc::DimensionMismatch, "one map and one subgroup per product");
    const VectorSpace& sp = cs.space;
    std::vector<u32> image_vectors;
    unsigned image_dim = 0;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        if (!(maps[i].domain() == sp) || !(maps[i].codomain() == sp))
            throw Error(Errc::DimensionMismatch, "maps must act on the carrier");
        if (!(maps[i].kernel() == cs.subgroups[i])) throw Error(Errc::KernelMismatch, "ker f_i differs from A_i");
        const Subspace im = maps[i].image();
        image_dim += im.dim();
        image_vectors.insert(image_vectors.end(), im.basis().begin(), im.basis().end());
    }
    if (image_dim != sp.dim() || Subspace::span(sp, image_vectors).dim() != sp.dim())
        throw Error(Errc::NotDirectSum, "images of the f_i must form a direct sum equal to the space");

    std::vector<std::vector<u32>> tables;
    for (const auto& f : maps) tables.push_back(f.table());
    auto ops = cs.ops;
    auto fn = [sp, ops, tables](u32 x, u32 y) {
        u32 r = 0;
        for (std::size_t i = 0; i < ops.size(); ++i) r = sp.add(r, tables[i][ops[i](x, y)]);
        return r;
    };
    try {
        return Presemifield::certify(sp, fn, Provenance{Family::Projection, {}, {}}, std::move(ctx), mat);
    } catch (const Error& e) {
        if (e.code() == Errc::CertificationFailed) throw Error(Errc::Incompatible, e.what());
        throw;
    }
}

struct Decomposition {
    CompatibleSet set;
    std::vector<LinearMap> maps;
};

/// Split P along space = U_1 + ... + U_k: x *_i y = pi_i(x*y), A_i = sum of the other U_j, f_i = pi_i.
inline Decomposition decompose(const Presemifield& P, const std::vector<Subspace>& parts) {
    const VectorSpace& sp = P.space();
    std::vector<u32> cols;
    std::vector<std::size_t> owner;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!(parts[i].space() == sp)) throw Error(Errc::DimensionMismatch, "part lives in another space");
        for (u32 b : parts[i].basis()) {
            cols.push_back(b);
            owner.push_back(i);
        }
    }
    if (cols.size() != sp.dim()) throw Error(Errc::NotDirectSum, "dimensions do not add up");
    Matrix B(sp.p(), sp.dim(), sp.dim());
    for (unsigned j = 0; j < sp.dim(); ++j) {
        auto d = sp.digits(cols[j]);
        for (unsigned i = 0; i < sp.dim(); ++i) B.at(i, j) = d[i];
    }
    auto Binv = inverse(B);
    if (!Binv) throw Error(Errc::NotDirectSum, "parts are not independent");

    Decomposition out;
    out.set.space = sp;
    auto shared = std::make_shared<const Presemifield>(P);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        // pi_i = B * D_i * B^-1 with D_i selecting the block of part i
        Matrix D(sp.p(), sp.dim(), sp.dim());
        for (unsigned j = 0; j < sp.dim(); ++j)
            if (owner[j] == i) D.at(j, j) = 1;
        LinearMap pi(sp, sp, multiply(B, multiply(D, *Binv)));
        std::vector<u32> others;
        for (std::size_t j = 0; j < cols.size(); ++j)
            if (owner[j] != i) others.push_back(cols[j]);
        auto tab = std::make_shared<const std::vector<u32>>(pi.table());
        out.set.ops.push_back([shared, tab](u32 x, u32 y) { return (*tab)[shared->mul(x, y)]; });
        out.set.subgroups.push_back(Subspace::span(sp, others));
        out.maps.push_back(std::move(pi));
    }
    return out;
}

// ---------------------------------------------------------------- classical constructions as projections

/// A projection recipe together with the map from its carrier (F) to packed coordinates,
/// so its product can be compared with a coordinate formula.
struct ProjectionRecipe {
    CompatibleSet set;
    std::vector<LinearMap> maps;
    std::vector<u32> to_coords;  // F element -> packed coordinates
};

namespace detail {

inline std::vector<u32> tower_coord_table(const Tower& tw) {
    std::vector<u32> t(tw.F()->order());
    for (u32 x = 0; x < t.size(); ++x) t[x] = tw.pack(tw.to_coords(Element{x}));
    return t;
}

inline Subspace embedded_L(const Tower& tw) {
    std::vector<u32> b;
    for (unsigned j = 0; j < tw.m(); ++j) b.push_back(tw.embed(Element{tw.L_space().basis(j)}).packed);
    return Subspace::span(tw.F_space(), b);
}

inline Subspace scaled_L(const Tower& tw, Element u) {
    std::vector<u32> b;
    for (unsigned j = 0; j < tw.m(); ++j)
        b.push_back(tw.F()->mul(u, tw.embed(Element{tw.L_space().basis(j)})).packed);
    return Subspace::span(tw.F_space(), b);
}

}  // namespace detail

/// Dickson from (w alpha(x) alpha(y), L) and (xy, L) with alpha(a + bw) = a + b^sigma w.
inline ProjectionRecipe dickson_projection(const TowerPtr& tw, unsigned s) {
    const FieldPtr F = tw->F();
    const FieldPtr L = tw->L();
    const Element w = tw->omega();
    auto alpha = [tw, L, s](Element x) {
        Coords c = tw->to_coords(x);
        return tw->from_coords({c.a, L->frobenius(c.b, s)});
    };
    ProjectionRecipe r;
    r.set.space = tw->F_space();
    r.set.ops.push_back([F, w, alpha](u32 x, u32 y) {
        return F->mul(w, F->mul(alpha(Element{x}), alpha(Element{y}))).packed;
    });
    r.set.ops.push_back([F](u32 x, u32 y) { return F->mul(Element{x}, Element{y}).packed; });
    const Subspace Ls = detail::embedded_L(*tw);
    r.set.subgroups = {Ls, Ls};
    const Element inv2n = F->inv(F->mul(F->from_int(2), tw->embed(tw->n())));
    const Element inv2 = F->inv(F->from_int(2));
    // (1/2n) T(w u) and (1/2) T(u/w) w
    r.maps.push_back(LinearMap::from_function(r.set.space, r.set.space, [tw, F, w, inv2n](u32 u) {
        return F->mul(inv2n, tw->rel_trace(F->mul(w, Element{u}))).packed;
    }));
    r.maps.push_back(LinearMap::from_function(r.set.space, r.set.space, [tw, F, w, inv2](u32 u) {
        return F->mul(F->mul(inv2, tw->rel_trace(F->div(Element{u}, w))), w).packed;
    }));
    r.to_coords = detail::tower_coord_table(*tw);
    return r;
}

/// Hughes-Kleinfeld from (alpha_1(x) y, Lw) and (alpha_2(x) y, L).
inline ProjectionRecipe hk_projection(const TowerPtr& tw, Element l) {
    const FieldPtr F = tw->F();
    const FieldPtr L = tw->L();
    if (L->m() % 2 != 0) throw Error(Errc::ConditionViolated, "need m even");
    const unsigned k = L->m() / 2;
    const Element w = tw->omega();
    const Element ln = L->div(l, tw->n());
    ProjectionRecipe r;
    r.set.space = tw->F_space();
    r.set.ops.push_back([tw, F, L, ln, k](u32 x, u32 y) {
        Coords c = tw->to_coords(Element{x});
        Element a1 = tw->from_coords({c.a, L->mul(ln, L->frobenius(c.b, k))});
        return F->mul(a1, Element{y}).packed;
    });
    r.set.ops.push_back([tw, F, L, k](u32 x, u32 y) {
        Coords c = tw->to_coords(Element{x});
        Element a2 = tw->from_coords({L->frobenius(c.a, k), c.b});
        return F->mul(a2, Element{y}).packed;
    });
    r.set.subgroups = {detail::scaled_L(*tw, w), detail::embedded_L(*tw)};
    const Element inv2 = F->inv(F->from_int(2));
    const Element inv2n = F->inv(F->mul(F->from_int(2), tw->embed(tw->n())));
    r.maps.push_back(LinearMap::from_function(r.set.space, r.set.space, [tw, F, inv2](u32 u) {
        return F->mul(inv2, tw->rel_trace(Element{u})).packed;
    }));
    r.maps.push_back(LinearMap::from_function(r.set.space, r.set.space, [tw, F, w, inv2n](u32 u) {
        return F->mul(F->mul(inv2n, tw->rel_trace(F->mul(w, Element{u}))), w).packed;
    }));
    r.to_coords = detail::tower_coord_table(*tw);
    return r;
}

/// Knuth from (conj(lambda) alpha_1(x) y, L) and (alpha_2(x) beta_2(y), L), where N(lambda) = -f.
/// Coordinates here are with respect to the basis 1, lambda.
inline ProjectionRecipe knuth_projection(const TowerPtr& tw, const KnuthParams& P) {
    const FieldPtr F = tw->F();
    const FieldPtr L = tw->L();
    knuth_validity(*L, P).raise();
    const Element target = L->neg(P.f);
    std::optional<Element> lam;
    for (u32 r = 0; r < F->order() && !lam; ++r) {
        Element z = F->from_lex_rank(r);
        if (!tw->in_L(z) && tw->rel_norm_L(z) == target) lam = z;
    }
    if (!lam) throw Error(Errc::ConditionViolated, "no lambda of norm -f");
    const Element lambda = *lam;
    const u32 q = L->order();
    // coordinates in the basis 1, lambda
    auto from_ab = std::make_shared<std::vector<u32>>(F->order());
    auto to_ab = std::make_shared<std::vector<u32>>(F->order());
    for (u32 a = 0; a < q; ++a)
        for (u32 b = 0; b < q; ++b) {
            Element z = F->add(tw->embed(Element{a}), F->mul(tw->embed(Element{b}), lambda));
            (*from_ab)[a + q * b] = z.packed;
            (*to_ab)[z.packed] = a + q * b;
        }
    const unsigned inv_s = (L->m() - P.s) % L->m();
    const Element Tl = tw->rel_trace_L(lambda);
    const Element lambda_bar = tw->conj(lambda);
    ProjectionRecipe r;
    r.set.space = tw->F_space();
    r.set.ops.push_back([F, L, from_ab, to_ab, lambda_bar, inv_s, q](u32 x, u32 y) {
        const u32 ab = (*to_ab)[x];
        const Element a1{(*from_ab)[ab % q + q * L->frobenius(Element{ab / q}, inv_s).packed]};
        return F->mul(lambda_bar, F->mul(a1, Element{y})).packed;
    });
    const Element g_minus_T = L->sub(P.g, Tl);
    r.set.ops.push_back([F, L, from_ab, to_ab, g_minus_T, P, q](u32 x, u32 y) {
        const u32 xab = (*to_ab)[x], yab = (*to_ab)[y];
        const Element a{xab % q}, b{xab / q}, c{yab % q}, d{yab / q};
        const Element a2{(*from_ab)[L->frobenius(a, P.s).packed + q * b.packed]};
        const Element b2{(*from_ab)[L->add(c, L->mul(d, g_minus_T)).packed + q * d.packed]};
        return F->mul(a2, b2).packed;
    });
    const Subspace Ls = detail::embedded_L(*tw);
    r.set.subgroups = {Ls, Ls};
    // f_1(z) = -(lambda coordinate of z), f_2(z) = (lambda coordinate of z) lambda
    r.maps.push_back(LinearMap::from_function(r.set.space, r.set.space, [tw, F, to_ab, q](u32 z) {
        return F->neg(tw->embed(Element{(*to_ab)[z] / q})).packed;
    }));
    r.maps.push_back(LinearMap::from_function(r.set.space, r.set.space, [tw, F, to_ab, lambda, q](u32 z) {
        return F->mul(tw->embed(Element{(*to_ab)[z] / q}), lambda).packed;
    }));
    r.to_coords = *to_ab;
    return r;
}

/// The ingredients of A: (xy, L) and (mu (conj(x) o y), L) with the maps that recover make_A.
inline ProjectionRecipe a_projection(const TowerPtr& tw, Element l, Element mu) {
    a_validity(*tw, l, mu).raise();
    const FieldPtr F = tw->F();
    AProduct ap{tw, tw->embed(l), mu};
    ProjectionRecipe r;
    r.set.space = tw->F_space();
    r.set.ops.push_back([F](u32 x, u32 y) { return F->mul(Element{x}, Element{y}).packed; });
    r.set.ops.push_back([tw, F, ap, mu](u32 x, u32 y) {
        return F->mul(mu, ap.twisted(tw->conj(Element{x}), Element{y})).packed;
    });
    const Subspace Ls = detail::embedded_L(*tw);
    r.set.subgroups = {Ls, Ls};
    const Element w = tw->omega();
    if (tw->p() == 2) {
        r.maps.push_back(LinearMap::from_function(r.set.space, r.set.space, [tw, F, mu](u32 u) {
            return F->mul(tw->rel_trace(Element{u}), mu).packed;
        }));
        r.maps.push_back(LinearMap::from_function(r.set.space, r.set.space,
                                                  [tw](u32 u) { return tw->rel_trace(Element{u}).packed; }));
    } else {
        r.maps.push_back(LinearMap::from_function(r.set.space, r.set.space, [tw, F, w](u32 u) {
            return tw->rel_trace(F->mul(w, Element{u})).packed;
        }));
        r.maps.push_back(LinearMap::from_function(r.set.space, r.set.space, [tw, F, w](u32 u) {
            return F->mul(tw->rel_trace(F->mul(w, Element{u})), w).packed;
        }));
    }
    r.to_coords.resize(F->order());
    std::iota(r.to_coords.begin(), r.to_coords.end(), 0u);
    return r;
}

/// The Dickson recipe with (xy, L) replaced by its neighbor
/// x o y = ac + b^sigma d^tau mu + (ad + bc) w, mu in L.
inline ProjectionRecipe dickson_neighbor_projection(const TowerPtr& tw, unsigned s, unsigned sigma_e, unsigned tau_e,
                                                    Element mu) {
    ProjectionRecipe r = dickson_projection(tw, s);
    const FieldPtr L = tw->L();
    r.set.ops[1] = [tw, L, sigma_e, tau_e, mu](u32 x, u32 y) {
        Coords X = tw->to_coords(Element{x}), Y = tw->to_coords(Element{y});
        Element first = L->add(L->mul(X.a, Y.a),
                               L->mul(mu, L->mul(L->frobenius(X.b, sigma_e), L->frobenius(Y.b, tau_e))));
        Element second = L->add(L->mul(X.a, Y.b), L->mul(X.b, Y.a));
        return tw->from_coords({first, second}).packed;
    };
    return r;
}

// ---------------------------------------------------------------- reparametrization

/// Isotopy-preserving parameter changes.
struct Transform {
    enum class Kind {
        Identity,
        Scale,   // X/B/C: (k_b, k_c); B needs k_b = 1
        Mirror,  // X/B/C: s -> m - s
        ACoset   // A: (alpha in F*, k in L*)
    };
    Kind kind = Kind::Identity;
    Element k_b, k_c;
    Element alpha, k;
};

inline Presemifield make_from_params(const FamilyParams& fp, const FieldPtr& L, const TowerPtr& tw,
                                     Materialize mat = Materialize::Auto) {
    if (auto t = std::get_if<TwistedParams>(&fp)) return make_twisted(L, t->s, t->l, mat);
    if (auto a = std::get_if<AParams>(&fp)) {
        if (!tw) throw Error(Errc::WrongFamily, "A needs a tower");
        if (tw->s() != a->s) {
            auto t2 = std::make_shared<const Tower>(tw->L(), tw->F(), a->s);
            return make_A(t2, a->l, a->mu, mat);
        }
        return make_A(tw, a->l, a->mu, mat);
    }
    if (auto x = std::get_if<XParams>(&fp)) return make_X(L, *x, mat);
    if (auto b = std::get_if<BParams>(&fp)) return make_B(L, *b, mat);
    if (auto c = std::get_if<CParams>(&fp)) return make_C(L, *c, mat);
    if (auto d = std::get_if<DicksonParams>(&fp)) return make_dickson(tw, d->s, mat);
    if (auto h = std::get_if<HKParams>(&fp)) return make_hughes_kleinfeld(tw, h->l, mat);
    if (auto k = std::get_if<KnuthParams>(&fp)) return make_knuth(L, *k, mat);
    throw Error(Errc::WrongFamily, "no named family");
}

/// Transformed parameters; the result describes an isotopic presemifield.
inline FamilyParams transform_params(const FieldCtx& L, const Tower* tw, const FamilyParams& fp, const Transform& t) {
    using K = Transform::Kind;
    if (t.kind == K::Identity) return fp;
    const unsigned m = L.m();
    if (t.kind == K::Scale) {
        if (t.k_b.packed == 0 || t.k_c.packed == 0) throw Error(Errc::InvalidTransformParams, "k_b, k_c must be nonzero");
        auto sig = [&](unsigned s, Element x) { return L.frobenius(x, s); };
        auto pm1 = [&](unsigned s, Element x) { return L.div(sig(s, x), x); };  // x^(sigma-1)
        if (auto x = std::get_if<XParams>(&fp)) {
            return XParams{x->s, L.div(x->v, t.k_b), L.div(x->l, pm1(x->s, t.k_c)), L.mul(x->n, L.mul(t.k_b, t.k_b)),
                           L.mul(x->N, pm1(x->s, t.k_b))};
        }
        if (auto b = std::get_if<BParams>(&fp)) {
            if (t.k_b != L.one()) throw Error(Errc::InvalidTransformParams, "B stays in B only for k_b = 1");
            return BParams{b->s, L.div(b->l, pm1(b->s, t.k_c)), b->n, b->N};
        }
        if (auto c = std::get_if<CParams>(&fp)) {
            return CParams{c->s, L.div(c->l, pm1(c->s, t.k_c)), L.mul(c->R, L.mul(sig(c->s, t.k_b), t.k_b))};
        }
        throw Error(Errc::WrongFamily, "scale applies to X, B, C");
    }
    if (t.kind == K::Mirror) {
        if (auto x = std::get_if<XParams>(&fp)) {
            return XParams{m - x->s, L.div(x->v, x->N), L.inv(x->l), L.mul(x->n, L.mul(x->N, x->N)), L.inv(x->N)};
        }
        if (auto b = std::get_if<BParams>(&fp)) {
            // N^(1/sigma) = N^(p^(m-s))
            return BParams{m - b->s, L.inv(b->l), b->n, L.inv(L.frobenius(b->N, m - b->s))};
        }
        if (auto c = std::get_if<CParams>(&fp)) return CParams{m - c->s, L.inv(c->l), c->R};
        throw Error(Errc::WrongFamily, "mirror applies to X, B, C");
    }
    // ACoset
    auto a = std::get_if<AParams>(&fp);
    if (!a) throw Error(Errc::WrongFamily, "coset change applies to A");
    if (!tw) throw Error(Errc::WrongFamily, "A needs a tower");
    if (t.alpha.packed == 0 || t.k.packed == 0) throw Error(Errc::InvalidTransformParams, "alpha, k must be nonzero");
    const FieldCtx& F = *tw->F();
    const Element Na = tw->rel_norm_L(t.alpha);
    const Element Na_pm1 = L.div(L.frobenius_any(Na, a->s), Na);
    const Element mu = F.mul(F.div(F.mul(a->mu, F.frobenius(t.alpha, a->s)), tw->conj(t.alpha)), tw->embed(t.k));
    return AParams{a->s, L.div(a->l, Na_pm1), mu};
}

inline Presemifield reparametrize(const Presemifield& P, const Transform& t, Materialize mat = Materialize::Auto) {
    const auto& ctx = P.context();
    if (!ctx.L) throw Error(Errc::WrongFamily, "presemifield has no family context");
    auto fp = transform_params(*ctx.L, ctx.tower.get(), P.provenance().params, t);
    return make_from_params(fp, ctx.L, ctx.tower, mat);
}

}  // namespace semifield
