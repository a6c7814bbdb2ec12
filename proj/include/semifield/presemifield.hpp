#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "field_core.hpp"
#include "linalg.hpp"
#include "tower.hpp"

namespace semifield {

enum class Family { Field, Twisted, A, X, B, C, Dickson, HughesKleinfeld, Knuth, Projection, Custom };

constexpr const char* family_name(Family f) {
    switch (f) {
        case Family::Field: return "field";
        case Family::Twisted: return "twisted";
        case Family::A: return "A";
        case Family::X: return "X";
        case Family::B: return "B";
        case Family::C: return "C";
        case Family::Dickson: return "dickson";
        case Family::HughesKleinfeld: return "hughes-kleinfeld";
        case Family::Knuth: return "knuth";
        case Family::Projection: return "projection";
        case Family::Custom: return "custom";
    }
    return "custom";
}

/// x y^sigma + l x^sigma y on L
struct TwistedParams {
    unsigned s = 0;
    Element l;
};

/// l in L, mu in F; s indexes sigma on F
struct AParams {
    unsigned s = 0;
    Element l, mu;
};

struct XParams {
    unsigned s = 0;
    Element v, l, n, N;
};

struct BParams {
    unsigned s = 0;
    Element l, n, N;
};

struct CParams {
    unsigned s = 0;
    Element l, R;
};

struct DicksonParams {
    unsigned s = 0;
};

struct HKParams {
    Element l;
};

/// (ac + b^(1/sigma) d f, bc + a^sigma d + bdg)
struct KnuthParams {
    unsigned s = 0;
    Element f, g;
};

using FamilyParams =
    std::variant<std::monostate, TwistedParams, AParams, XParams, BParams, CParams, DicksonParams, HKParams, KnuthParams>;

/// Which set the packed vectors of a presemifield live in.
enum class Carrier {
    L,       // elements of L
    F,       // elements of F
    Coords,  // pairs (a,b) of L, packed a + q b
    Abstract
};

struct Provenance {
    Family family = Family::Custom;
    FamilyParams params;
    std::vector<std::string> flags;
};

using ProductFn = std::function<u32(u32, u32)>;

struct Certificate {
    bool ok = true;
    std::optional<std::pair<u32, u32>> witness;  // x, y nonzero with x*y = 0
};

/// Left multiplication L_x is nonsingular for every projective x (leading digit 1).
/// Relies on the product being GF(p)-bilinear.
template <class Product>
Certificate verify_presemifield(const VectorSpace& sp, Product&& mul) {
    const unsigned n = sp.dim();
    SmallRankChecker rc(sp);
    std::vector<u32> cols(n);
    for (unsigned k = 0; k < n; ++k) {
        const u32 lead = sp.basis(k);
        for (u32 low = 0; low < lead; ++low) {
            const u32 x = lead + low;
            for (unsigned j = 0; j < n; ++j) cols[j] = mul(x, sp.basis(j));
            if (rc.full_rank(cols)) continue;
            Matrix m(sp.p(), n, n);
            for (unsigned j = 0; j < n; ++j) {
                auto d = sp.digits(cols[j]);
                for (unsigned i = 0; i < n; ++i) m.at(i, j) = d[i];
            }
            auto ker = nullspace(m);
            const u32 y = sp.pack(ker.front());
            return Certificate{false, std::make_pair(x, y)};
        }
    }
    return Certificate{};
}

/// Biadditivity on the whole space: x*(y+e_j) = x*y + x*e_j and (y+e_j)*x = y*x + e_j*x.
template <class Product>
bool is_biadditive(const VectorSpace& sp, Product&& mul) {
    for (u32 x = 0; x < sp.order(); ++x)
        for (u32 y = 0; y < sp.order(); ++y)
            for (unsigned j = 0; j < sp.dim(); ++j) {
                const u32 e = sp.basis(j);
                if (mul(x, sp.add(y, e)) != sp.add(mul(x, y), mul(x, e))) return false;
                if (mul(sp.add(y, e), x) != sp.add(mul(y, x), mul(e, x))) return false;
            }
    return true;
}

enum class Materialize { Auto, Never, Always };

struct PresemifieldContext {
    Carrier carrier = Carrier::Abstract;
    FieldPtr L;
    TowerPtr tower;
};

/// A certified presemifield: a GF(p)-space with a biadditive product free of zero divisors.
class Presemifield {
public:
    static constexpr u32 auto_table_limit = 4096;

    /// Certifies the product and returns the presemifield; throws CertificationFailed otherwise.
    static Presemifield certify(VectorSpace sp, ProductFn fn, Provenance prov, PresemifieldContext ctx = {},
                                Materialize mat = Materialize::Auto) {
        Presemifield P;
        P.sp_ = sp;
        P.fn_ = std::move(fn);
        P.prov_ = std::move(prov);
        P.ctx_ = std::move(ctx);
        if (mat == Materialize::Always || (mat == Materialize::Auto && sp.order() < auto_table_limit)) P.materialize();
        auto cert = verify_presemifield(sp, [&](u32 x, u32 y) { return P.mul(x, y); });
        if (!cert.ok)
            throw Error(Errc::CertificationFailed, "zero divisor: " + std::to_string(cert.witness->first) + " * " +
                                                       std::to_string(cert.witness->second) + " = 0");
        return P;
    }

    u32 mul(u32 x, u32 y) const {
        if (!table_.empty()) return table_[std::size_t{x} * sp_.order() + y];
        return fn_(x, y);
    }
    u32 operator()(u32 x, u32 y) const { return mul(x, y); }

    const VectorSpace& space() const { return sp_; }
    u32 order() const { return sp_.order(); }
    const Provenance& provenance() const { return prov_; }
    Family family() const { return prov_.family; }
    const PresemifieldContext& context() const { return ctx_; }
    const ProductFn& function() const { return fn_; }
    bool has_table() const { return !table_.empty(); }

    void materialize() {
        if (!table_.empty()) return;
        const u32 o = sp_.order();
        table_.resize(std::size_t{o} * o);
        for (u32 x = 0; x < o; ++x)
            for (u32 y = 0; y < o; ++y) table_[std::size_t{x} * o + y] = fn_(x, y);
    }

private:
    VectorSpace sp_;
    ProductFn fn_;
    Provenance prov_;
    PresemifieldContext ctx_;
    std::vector<u32> table_;
};

/// The field L itself as a presemifield.
inline Presemifield field_presemifield(const FieldPtr& L) {
    VectorSpace sp(L->p(), L->m());
    return Presemifield::certify(
        sp, [L](u32 x, u32 y) { return L->mul(Element{x}, Element{y}).packed; }, Provenance{Family::Field, {}, {}},
        PresemifieldContext{Carrier::L, L, nullptr});
}

}  // namespace semifield
