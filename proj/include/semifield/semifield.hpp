#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "families.hpp"

namespace semifield {

/// The isotope x o y = beta(gamma(x) * y) with beta = (L_e)^-1, gamma = (R_e)^-1 L_e; e is the identity.
class Semifield {
public:
    explicit Semifield(std::shared_ptr<const Presemifield> P, u32 e = 1) : P_(std::move(P)), e_(e) {
        const VectorSpace& sp = P_->space();
        if (e_ == 0 || e_ >= sp.order()) throw Error(Errc::ZeroArgument, "e must be a nonzero vector");
        auto Le = LinearMap::from_function(sp, sp, [&](u32 y) { return P_->mul(e_, y); });
        auto Re = LinearMap::from_function(sp, sp, [&](u32 x) { return P_->mul(x, e_); });
        auto Le_inv = Le.inverse();
        auto Re_inv = Re.inverse();
        if (!Le_inv || !Re_inv) throw Error(Errc::SingularLeftMultiplication, "multiplication by e is singular");
        beta_ = Le_inv->table();
        gamma_ = Re_inv->compose(Le).table();
        for (u32 x = 0; x < sp.order(); ++x)
            if (circ(e_, x) != x || circ(x, e_) != x) throw Error(Errc::InternalMismatch, "isotope identity fails");
    }

    u32 circ(u32 x, u32 y) const { return beta_[P_->mul(gamma_[x], y)]; }
    u32 operator()(u32 x, u32 y) const { return circ(x, y); }

    const VectorSpace& space() const { return P_->space(); }
    u32 order() const { return P_->order(); }
    u32 identity() const { return e_; }
    const Presemifield& presemifield() const { return *P_; }
    std::shared_ptr<const Presemifield> presemifield_ptr() const { return P_; }
    u32 beta(u32 x) const { return beta_[x]; }
    u32 gamma(u32 x) const { return gamma_[x]; }

    /// full multiplication table, row x
    std::vector<u32> table() const {
        const u32 o = order();
        std::vector<u32> t(std::size_t{o} * o);
        for (u32 x = 0; x < o; ++x)
            for (u32 y = 0; y < o; ++y) t[std::size_t{x} * o + y] = circ(x, y);
        return t;
    }

private:
    std::shared_ptr<const Presemifield> P_;
    u32 e_;
    std::vector<u32> beta_, gamma_;
};

inline Semifield to_semifield(const Presemifield& P, u32 e = 1) {
    return Semifield(std::make_shared<const Presemifield>(P), e);
}

inline Semifield to_semifield(std::shared_ptr<const Presemifield> P, u32 e = 1) { return Semifield(std::move(P), e); }

struct NucleusInfo {
    Subspace space;
    bool closed = false;           // closed under o
    bool contains_identity = false;
    bool is_subfield() const { return closed && contains_identity; }
    unsigned dim() const { return space.dim(); }
};

struct NucleiReport {
    NucleusInfo left, middle, right, center;
};

namespace detail {

inline NucleusInfo nucleus_info(const Semifield& S, Subspace sub) {
    NucleusInfo info;
    info.contains_identity = sub.contains(S.identity());
    info.closed = true;
    for (u32 a : sub.basis())
        for (u32 b : sub.basis())
            if (!sub.contains(S.circ(a, b))) info.closed = false;
    info.space = std::move(sub);
    return info;
}

/// Stack, for all basis pairs (e_i, e_j), the matrix of z -> assoc(z) as rows.
template <class Assoc>
Subspace linear_kernel(const VectorSpace& sp, Assoc&& assoc, bool pairs) {
    const unsigned n = sp.dim();
    std::vector<std::vector<u32>> rows;
    auto add_rows = [&](auto&& value) {
        // value(k) = image of e_k; one row per output digit
        std::vector<std::vector<u32>> cols(n);
        for (unsigned k = 0; k < n; ++k) cols[k] = sp.digits(value(sp.basis(k)));
        for (unsigned r = 0; r < n; ++r) {
            std::vector<u32> row(n);
            bool nz = false;
            for (unsigned k = 0; k < n; ++k) {
                row[k] = cols[k][r];
                nz |= row[k] != 0;
            }
            if (nz) rows.push_back(std::move(row));
        }
    };
    if (pairs) {
        for (unsigned i = 0; i < n; ++i)
            for (unsigned j = 0; j < n; ++j)
                add_rows([&](u32 z) { return assoc(z, sp.basis(i), sp.basis(j)); });
    } else {
        for (unsigned i = 0; i < n; ++i) add_rows([&](u32 z) { return assoc(z, sp.basis(i), 0u); });
    }
    Matrix m(sp.p(), static_cast<unsigned>(rows.size()), n);
    for (unsigned r = 0; r < rows.size(); ++r)
        for (unsigned k = 0; k < n; ++k) m.at(r, k) = rows[r][k];
    return Subspace::from_digit_vectors(sp, nullspace(m));
}

}  // namespace detail

/// Nuclei as kernels of the associator, which is GF(p)-linear in each slot; basis pairs suffice.
inline NucleiReport nuclei_linear(const Semifield& S) {
    const VectorSpace& sp = S.space();
    auto left = detail::linear_kernel(
        sp, [&](u32 z, u32 x, u32 y) { return sp.sub(S.circ(S.circ(z, x), y), S.circ(z, S.circ(x, y))); }, true);
    auto middle = detail::linear_kernel(
        sp, [&](u32 z, u32 x, u32 y) { return sp.sub(S.circ(S.circ(x, z), y), S.circ(x, S.circ(z, y))); }, true);
    auto right = detail::linear_kernel(
        sp, [&](u32 z, u32 x, u32 y) { return sp.sub(S.circ(S.circ(x, y), z), S.circ(x, S.circ(y, z))); }, true);
    auto comm =
        detail::linear_kernel(sp, [&](u32 z, u32 x, u32) { return sp.sub(S.circ(z, x), S.circ(x, z)); }, false);
    auto center = left.intersect(middle).intersect(right).intersect(comm);
    return {detail::nucleus_info(S, std::move(left)), detail::nucleus_info(S, std::move(middle)),
            detail::nucleus_info(S, std::move(right)), detail::nucleus_info(S, std::move(center))};
}

/// Element-by-element nuclei over the full circ table; an independent check of nuclei_linear.
inline NucleiReport nuclei_bruteforce(const Semifield& S, u32 max_order = 729) {
    const u32 o = S.order();
    if (o > max_order) throw Error(Errc::OrderTooLarge, "brute-force nuclei limited to order " + std::to_string(max_order));
    const VectorSpace& sp = S.space();
    const std::vector<u32> T = S.table();
    auto at = [&](u32 x, u32 y) { return T[std::size_t{x} * o + y]; };

    std::vector<u32> L, M, R, C;
    for (u32 z = 0; z < o; ++z) {
        bool in_l = true, in_m = true, in_r = true;
        for (u32 x = 0; x < o && in_l; ++x) {
            const u32 zx = at(z, x);
            for (u32 y = 0; y < o; ++y)
                if (at(zx, y) != at(z, at(x, y))) {
                    in_l = false;
                    break;
                }
        }
        for (u32 x = 0; x < o && in_m; ++x) {
            const u32 xz = at(x, z);
            for (u32 y = 0; y < o; ++y)
                if (at(xz, y) != at(x, at(z, y))) {
                    in_m = false;
                    break;
                }
        }
        for (u32 x = 0; x < o && in_r; ++x)
            for (u32 y = 0; y < o; ++y)
                if (at(at(x, y), z) != at(x, at(y, z))) {
                    in_r = false;
                    break;
                }
        if (in_l) L.push_back(z);
        if (in_m) M.push_back(z);
        if (in_r) R.push_back(z);
        if (in_l && in_m && in_r) {
            bool comm = true;
            for (u32 x = 0; x < o && comm; ++x) comm = at(z, x) == at(x, z);
            if (comm) C.push_back(z);
        }
    }
    auto as_space = [&](const std::vector<u32>& members) {
        Subspace s = Subspace::span(sp, members);
        if (s.size() != members.size()) throw Error(Errc::InternalMismatch, "nucleus members do not form a subspace");
        return s;
    };
    return {detail::nucleus_info(S, as_space(L)), detail::nucleus_info(S, as_space(M)),
            detail::nucleus_info(S, as_space(R)), detail::nucleus_info(S, as_space(C))};
}

/// Smallest w != 0 with (w o x) o y = (w o y) o x for all x, y; exists iff S is isotopic to a commutative semifield.
inline std::optional<u32> ganley_semifield(const Semifield& S) {
    const VectorSpace& sp = S.space();
    const unsigned n = sp.dim();
    for (u32 w = 1; w < S.order(); ++w) {
        bool ok = true;
        for (unsigned i = 0; i < n && ok; ++i) {
            const u32 wi = S.circ(w, sp.basis(i));
            for (unsigned j = i + 1; j < n && ok; ++j)
                ok = S.circ(wi, sp.basis(j)) == S.circ(S.circ(w, sp.basis(j)), sp.basis(i));
        }
        if (ok) return w;
    }
    return std::nullopt;
}

/// All w satisfying the condition above (a subspace, since the condition is linear in w).
inline Subspace ganley_witness_space(const Semifield& S) {
    const VectorSpace& sp = S.space();
    const unsigned n = sp.dim();
    std::vector<std::vector<u32>> rows;
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = i + 1; j < n; ++j) {
            std::vector<std::vector<u32>> cols(n);
            for (unsigned k = 0; k < n; ++k) {
                const u32 w = sp.basis(k);
                cols[k] = sp.digits(sp.sub(S.circ(S.circ(w, sp.basis(i)), sp.basis(j)),
                                           S.circ(S.circ(w, sp.basis(j)), sp.basis(i))));
            }
            for (unsigned r = 0; r < n; ++r) {
                std::vector<u32> row(n);
                for (unsigned k = 0; k < n; ++k) row[k] = cols[k][r];
                rows.push_back(std::move(row));
            }
        }
    Matrix m(sp.p(), static_cast<unsigned>(rows.size()), n);
    for (unsigned r = 0; r < rows.size(); ++r)
        for (unsigned k = 0; k < n; ++k) m.at(r, k) = rows[r][k];
    return Subspace::from_digit_vectors(sp, nullspace(m));
}

/// Smallest v != 0 with alpha(v*x)*y = alpha(v*y)*x, alpha = (R_1)^-1, 1 = packed vector 1.
inline std::optional<u32> ganley_presemifield(const Presemifield& P) {
    const VectorSpace& sp = P.space();
    const unsigned n = sp.dim();
    auto R1 = LinearMap::from_function(sp, sp, [&](u32 x) { return P.mul(x, 1); });
    auto inv = R1.inverse();
    if (!inv) throw Error(Errc::SingularLeftMultiplication, "right multiplication by 1 is singular");
    const std::vector<u32> alpha = inv->table();
    for (u32 v = 1; v < P.order(); ++v) {
        bool ok = true;
        for (unsigned i = 0; i < n && ok; ++i) {
            const u32 ai = alpha[P.mul(v, sp.basis(i))];
            for (unsigned j = i + 1; j < n && ok; ++j)
                ok = P.mul(ai, sp.basis(j)) == P.mul(alpha[P.mul(v, sp.basis(j))], sp.basis(i));
        }
        if (ok) return v;
    }
    return std::nullopt;
}

struct AlgebraClass {
    bool commutative = false;
    bool associative = false;
};

inline AlgebraClass classify_algebra(const Semifield& S) {
    const VectorSpace& sp = S.space();
    const unsigned n = sp.dim();
    AlgebraClass c{true, true};
    for (unsigned i = 0; i < n && c.commutative; ++i)
        for (unsigned j = i + 1; j < n && c.commutative; ++j)
            c.commutative = S.circ(sp.basis(i), sp.basis(j)) == S.circ(sp.basis(j), sp.basis(i));
    for (unsigned i = 0; i < n && c.associative; ++i)
        for (unsigned j = 0; j < n && c.associative; ++j) {
            const u32 ij = S.circ(sp.basis(i), sp.basis(j));
            for (unsigned k = 0; k < n && c.associative; ++k)
                c.associative = S.circ(ij, sp.basis(k)) == S.circ(sp.basis(i), S.circ(sp.basis(j), sp.basis(k)));
        }
    return c;
}

/// The two field equations deciding whether (c, d) lies in the middle nucleus of an X, B or C semifield
/// (identity (1,0)):
///   c - c^(s^2) = (nv(d + N d^s))^s - nv(d + N d^s)
///   (nv)^s (c - c^s)^s + nvN (c - c^s) = (nN)^s d^(s^2) - nN d
inline bool middle_nucleus_membership(const Presemifield& P, Coords cd) {
    const auto& ctx = P.context();
    if (!ctx.L || ctx.carrier != Carrier::Coords) throw Error(Errc::WrongFamily, "needs an X, B or C instance");
    const FieldCtx& L = *ctx.L;
    const XParams X = as_x_params(L, P.provenance().params);
    const unsigned s = X.s;
    const unsigned s2 = (2 * s) % L.m();
    const Element c = cd.a, d = cd.b;
    const Element nv = L.mul(X.n, X.v);
    const Element nN = L.mul(X.n, X.N);
    const Element t = L.mul(nv, L.add(d, L.mul(X.N, L.frobenius(d, s))));
    const bool first = L.sub(c, L.frobenius(c, s2)) == L.sub(L.frobenius(t, s), t);
    const Element cc = L.sub(c, L.frobenius(c, s));
    const Element lhs = L.add(L.mul(L.frobenius(nv, s), L.frobenius(cc, s)), L.mul(L.mul(nv, X.N), cc));
    const Element rhs = L.sub(L.mul(L.frobenius(nN, s), L.frobenius(d, s2)), L.mul(nN, d));
    return first && lhs == rhs;
}

}  // namespace semifield
