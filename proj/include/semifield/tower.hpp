#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "field_core.hpp"
#include "linalg.hpp"

namespace semifield {

struct Coords {
    Element a, b;
    friend constexpr bool operator==(const Coords&, const Coords&) = default;
};

struct TowerOptions {
    std::optional<std::vector<u32>> modulus_L;
    std::optional<std::vector<u32>> modulus_F;
    FieldOptions field_options{};
};

/// L = GF(p^m) inside F = GF(p^2m), with omega, conjugation and the (a,b) coordinates.
/// For odd p, x = a + b*omega with omega^2 = n a non-square of L and N = omega^(sigma-1).
class Tower {
public:
    Tower(FieldPtr L, FieldPtr F, unsigned s) : L_(std::move(L)), F_(std::move(F)), s_(s) {
        const unsigned m = L_->m();
        if (F_->p() != L_->p() || F_->m() != 2 * m) throw Error(Errc::DegreeMismatch, "F must have degree 2m over GF(p)");
        if (s >= 2 * m) throw Error(Errc::SigmaOutOfRange, "s must satisfy 0 <= s < 2m");
        lsp_ = VectorSpace(p(), m);
        fsp_ = VectorSpace(p(), 2 * m);
        find_embedding();
        if (p() != 2) {
            for (u32 r = 0; r < L_->order(); ++r) {
                Element x = L_->from_lex_rank(r);
                if (x.packed != 0 && !L_->is_square(x)) {
                    n_ = x;
                    break;
                }
            }
            omega_ = *F_->sqrt_lex_min(embed(n_));
            Element Nf = F_->div(F_->frobenius(omega_, s_), omega_);
            auto NL = restrict_to_L(Nf);
            if (!NL) throw Error(Errc::InternalMismatch, "omega^(sigma-1) not in L");
            N_ = *NL;
            auto from = LinearMap::from_function(fsp_, fsp_, [&](u32 v) {
                const u32 q = L_->order();
                return F_->add(embed(Element{v % q}), F_->mul(embed(Element{v / q}), omega_)).packed;
            });
            auto to = from.inverse();
            if (!to) throw Error(Errc::InternalMismatch, "coordinate map is singular");
            from_coords_ = from.table();
            to_coords_ = to->table();
        } else {
            omega_ = F_->one();
            n_ = L_->one();
            N_ = L_->one();
        }
    }

    const FieldPtr& L() const { return L_; }
    const FieldPtr& F() const { return F_; }
    u32 p() const { return L_->p(); }
    unsigned m() const { return L_->m(); }
    unsigned s() const { return s_; }
    u32 q() const { return L_->order(); }

    Element omega() const { return omega_; }
    /// omega^2, a non-square of L (odd p)
    Element n() const { return n_; }
    /// omega^(sigma-1) as an element of L (odd p)
    Element N() const { return N_; }
    /// image of L's defining root in F
    Element embedding_root() const { return root_; }

    Element embed(Element a) const { return Element{embed_[a.packed]}; }

    std::optional<Element> restrict_to_L(Element x) const {
        const u32 v = restrict_[x.packed];
        if (v == UINT32_MAX) return std::nullopt;
        return Element{v};
    }

    bool in_L(Element x) const { return restrict_[x.packed] != UINT32_MAX; }

    Element conj(Element x) const { return F_->frobenius(x, m()); }

    /// x + conj(x), an element of the embedded copy of L
    Element rel_trace(Element x) const { return F_->add(x, conj(x)); }

    Element rel_trace_L(Element x) const { return *restrict_to_L(rel_trace(x)); }

    Element rel_norm_L(Element x) const { return *restrict_to_L(F_->mul(x, conj(x))); }

    Element sigma_F(Element x) const { return F_->frobenius(x, s_); }

    Coords to_coords(Element x) const {
        require_odd();
        const u32 v = to_coords_[x.packed];
        return {Element{v % q()}, Element{v / q()}};
    }

    Element from_coords(Coords c) const {
        require_odd();
        return Element{from_coords_[c.a.packed + q() * c.b.packed]};
    }

    /// packed coordinate vector a + q*b
    u32 pack(Coords c) const { return c.a.packed + q() * c.b.packed; }
    Coords unpack(u32 v) const { return {Element{v % q()}, Element{v / q()}}; }

    /// (a,b)(c,d) = (ac + n bd, ad + bc)
    Coords coord_mul(Coords x, Coords y) const {
        const FieldCtx& f = *L_;
        return {f.add(f.mul(x.a, y.a), f.mul(n_, f.mul(x.b, y.b))), f.add(f.mul(x.a, y.b), f.mul(x.b, y.a))};
    }

    const VectorSpace& L_space() const { return lsp_; }
    const VectorSpace& F_space() const { return fsp_; }

private:
    void require_odd() const {
        if (p() == 2) throw Error(Errc::CharTwoUnsupported, "coordinates need odd characteristic");
    }

    void find_embedding() {
        const auto& f = L_->spec().modulus;
        bool found = false;
        for (u32 r = 0; r < F_->order() && !found; ++r) {
            Element z = F_->from_lex_rank(r);
            Element acc = F_->zero();
            for (std::size_t i = f.size(); i-- > 0;) acc = F_->add(F_->mul(acc, z), F_->from_int(f[i]));
            if (acc.packed == 0) {
                root_ = z;
                found = true;
            }
        }
        if (!found) throw Error(Errc::EmbeddingFailure, "L's modulus has no root in F");
        const u32 q = L_->order();
        embed_.assign(q, 0);
        restrict_.assign(F_->order(), UINT32_MAX);
        std::vector<Element> powers(m());
        powers[0] = F_->one();
        for (unsigned i = 1; i < m(); ++i) powers[i] = F_->mul(powers[i - 1], root_);
        for (u32 a = 0; a < q; ++a) {
            Element acc = F_->zero();
            u32 v = a;
            for (unsigned i = 0; i < m(); ++i) {
                acc = F_->add(acc, F_->mul(F_->from_int(v % p()), powers[i]));
                v /= p();
            }
            embed_[a] = acc.packed;
            restrict_[acc.packed] = a;
        }
    }

    FieldPtr L_, F_;
    unsigned s_;
    VectorSpace lsp_, fsp_;
    Element root_, omega_, n_, N_;
    std::vector<u32> embed_, restrict_, to_coords_, from_coords_;
};

using TowerPtr = std::shared_ptr<const Tower>;

inline TowerPtr build_tower(u32 p, unsigned m, unsigned s, const TowerOptions& opts = {}) {
    if (s >= 2 * m) throw Error(Errc::SigmaOutOfRange, "s must satisfy 0 <= s < 2m");
    auto L = build_field(p, m, opts.modulus_L, opts.field_options);
    auto F = build_field(p, 2 * m, opts.modulus_F, opts.field_options);
    return std::make_shared<const Tower>(std::move(L), std::move(F), s);
}

}  // namespace semifield
