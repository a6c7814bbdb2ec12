#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "number.hpp"

namespace semifield {

/// GF(p)^dim with vectors packed as integers; digit j is the coordinate on basis vector p^j.
class VectorSpace {
public:
    VectorSpace() = default;
    VectorSpace(u32 p, unsigned dim) : p_(p), dim_(dim) {
        if (!num::is_prime(p)) throw Error(Errc::NotPrime, "vector space over non-prime p");
        if (num::checked_pow(p, dim) > (u64{1} << 31)) throw Error(Errc::OrderTooLarge, "vector space too large");
        pow_.resize(dim + 1);
        pow_[0] = 1;
        for (unsigned i = 1; i <= dim; ++i) pow_[i] = pow_[i - 1] * p;
    }

    u32 p() const { return p_; }
    unsigned dim() const { return dim_; }
    u32 order() const { return pow_[dim_]; }
    u32 basis(unsigned j) const { return pow_[j]; }

    u32 digit(u32 v, unsigned j) const { return (v / pow_[j]) % p_; }

    void unpack(u32 v, std::span<u32> out) const {
        for (unsigned j = 0; j < dim_; ++j) {
            out[j] = v % p_;
            v /= p_;
        }
    }

    std::vector<u32> digits(u32 v) const {
        std::vector<u32> d(dim_);
        unpack(v, d);
        return d;
    }

    u32 pack(std::span<const u32> d) const {
        u32 v = 0;
        for (unsigned j = 0; j < dim_; ++j) v += (d[j] % p_) * pow_[j];
        return v;
    }

    u32 add(u32 x, u32 y) const {
        if (p_ == 2) return x ^ y;
        u32 r = 0;
        for (unsigned j = 0; j < dim_; ++j) {
            u32 s = x % p_ + y % p_;
            if (s >= p_) s -= p_;
            r += s * pow_[j];
            x /= p_;
            y /= p_;
        }
        return r;
    }

    u32 scale(u32 c, u32 x) const {
        c %= p_;
        if (c == 1) return x;
        u32 r = 0;
        for (unsigned j = 0; j < dim_; ++j) {
            r += static_cast<u32>(u64{x % p_} * c % p_) * pow_[j];
            x /= p_;
        }
        return r;
    }

    u32 neg(u32 x) const { return scale(p_ - 1, x); }
    u32 sub(u32 x, u32 y) const { return add(x, neg(y)); }

    friend bool operator==(const VectorSpace& a, const VectorSpace& b) { return a.p_ == b.p_ && a.dim_ == b.dim_; }

private:
    u32 p_ = 2;
    unsigned dim_ = 0;
    std::vector<u32> pow_{1};
};

/// Dense matrix over GF(p).
struct Matrix {
    u32 p = 2;
    unsigned rows = 0, cols = 0;
    std::vector<u32> a;

    Matrix() = default;
    Matrix(u32 p_, unsigned r, unsigned c) : p(p_), rows(r), cols(c), a(std::size_t{r} * c, 0) {}

    u32& at(unsigned r, unsigned c) { return a[std::size_t{r} * cols + c]; }
    u32 at(unsigned r, unsigned c) const { return a[std::size_t{r} * cols + c]; }

    static Matrix identity(u32 p, unsigned n) {
        Matrix m(p, n, n);
        for (unsigned i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

inline Matrix multiply(const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows) throw Error(Errc::DimensionMismatch, "matrix product shapes");
    Matrix r(x.p, x.rows, y.cols);
    for (unsigned i = 0; i < x.rows; ++i)
        for (unsigned k = 0; k < x.cols; ++k) {
            const u64 c = x.at(i, k);
            if (!c) continue;
            for (unsigned j = 0; j < y.cols; ++j) r.at(i, j) = static_cast<u32>((r.at(i, j) + c * y.at(k, j)) % x.p);
        }
    return r;
}

/// In-place reduced row echelon form; returns pivot columns.
inline std::vector<unsigned> rref_in_place(Matrix& m) {
    std::vector<unsigned> pivots;
    const u32 p = m.p;
    unsigned r = 0;
    for (unsigned c = 0; c < m.cols && r < m.rows; ++c) {
        unsigned piv = r;
        while (piv < m.rows && m.at(piv, c) == 0) ++piv;
        if (piv == m.rows) continue;
        if (piv != r)
            for (unsigned j = 0; j < m.cols; ++j) std::swap(m.at(r, j), m.at(piv, j));
        const u64 inv = num::inv_mod(m.at(r, c), p);
        for (unsigned j = 0; j < m.cols; ++j) m.at(r, j) = static_cast<u32>(m.at(r, j) * inv % p);
        for (unsigned i = 0; i < m.rows; ++i) {
            if (i == r || m.at(i, c) == 0) continue;
            const u64 f = p - m.at(i, c);
            for (unsigned j = 0; j < m.cols; ++j) m.at(i, j) = static_cast<u32>((m.at(i, j) + f * m.at(r, j)) % p);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline unsigned rank(Matrix m) { return static_cast<unsigned>(rref_in_place(m).size()); }

/// basis of {v : M v = 0}
inline std::vector<std::vector<u32>> nullspace(Matrix m) {
    auto piv = rref_in_place(m);
    std::vector<bool> is_piv(m.cols, false);
    for (unsigned c : piv) is_piv[c] = true;
    std::vector<std::vector<u32>> out;
    for (unsigned f = 0; f < m.cols; ++f) {
        if (is_piv[f]) continue;
        std::vector<u32> v(m.cols, 0);
        v[f] = 1;
        for (unsigned r = 0; r < piv.size(); ++r) v[piv[r]] = (m.p - m.at(r, f)) % m.p;
        out.push_back(std::move(v));
    }
    return out;
}

inline std::optional<Matrix> inverse(const Matrix& m) {
    if (m.rows != m.cols) throw Error(Errc::DimensionMismatch, "inverse of non-square matrix");
    const unsigned n = m.rows;
    Matrix aug(m.p, n, 2 * n);
    for (unsigned i = 0; i < n; ++i) {
        for (unsigned j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, n + i) = 1;
    }
    auto piv = rref_in_place(aug);
    if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
    Matrix r(m.p, n, n);
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) r.at(i, j) = aug.at(i, n + j);
    return r;
}

/// Rank test for a small square matrix given as packed columns; used on hot paths.
/// Returns a nonzero kernel vector (as digits) when singular.
class SmallRankChecker {
public:
    explicit SmallRankChecker(const VectorSpace& sp) : sp_(sp), n_(sp.dim()), a_(n_ * n_), inv_(sp.p()) {
        for (u32 x = 1; x < sp.p(); ++x) inv_[x] = static_cast<u32>(num::inv_mod(x, sp.p()));
    }

    /// columns[j] = image of basis vector j
    bool full_rank(std::span<const u32> columns) {
        const u32 p = sp_.p();
        for (unsigned j = 0; j < n_; ++j) {
            u32 v = columns[j];
            for (unsigned i = 0; i < n_; ++i) {
                a_[i * n_ + j] = v % p;
                v /= p;
            }
        }
        for (unsigned c = 0; c < n_; ++c) {
            unsigned piv = c;
            while (piv < n_ && a_[piv * n_ + c] == 0) ++piv;
            if (piv == n_) return false;
            if (piv != c)
                for (unsigned j = c; j < n_; ++j) std::swap(a_[c * n_ + j], a_[piv * n_ + j]);
            const u32 iv = inv_[a_[c * n_ + c]];
            for (unsigned i = c + 1; i < n_; ++i) {
                const u32 e = a_[i * n_ + c];
                if (!e) continue;
                const u32 f = static_cast<u32>(u64{e} * iv % p);
                for (unsigned j = c; j < n_; ++j)
                    a_[i * n_ + j] = static_cast<u32>((a_[i * n_ + j] + u64{p - f} * a_[c * n_ + j]) % p);
            }
        }
        return true;
    }

private:
    VectorSpace sp_;
    unsigned n_;
    std::vector<u32> a_;
    std::vector<u32> inv_;
};

/// A GF(p)-subspace stored as a canonical reduced basis (packed vectors).
class Subspace {
public:
    Subspace() = default;
    explicit Subspace(const VectorSpace& sp) : sp_(sp) {}

    static Subspace span(const VectorSpace& sp, std::span<const u32> vecs) {
        Matrix m(sp.p(), static_cast<unsigned>(vecs.size()), sp.dim());
        for (unsigned i = 0; i < vecs.size(); ++i) {
            auto d = sp.digits(vecs[i]);
            for (unsigned j = 0; j < sp.dim(); ++j) m.at(i, j) = d[j];
        }
        return from_rows(sp, std::move(m));
    }

    static Subspace from_digit_vectors(const VectorSpace& sp, const std::vector<std::vector<u32>>& rows) {
        Matrix m(sp.p(), static_cast<unsigned>(rows.size()), sp.dim());
        for (unsigned i = 0; i < rows.size(); ++i)
            for (unsigned j = 0; j < sp.dim(); ++j) m.at(i, j) = rows[i][j] % sp.p();
        return from_rows(sp, std::move(m));
    }

    static Subspace whole(const VectorSpace& sp) {
        std::vector<u32> b;
        for (unsigned j = 0; j < sp.dim(); ++j) b.push_back(sp.basis(j));
        return span(sp, b);
    }

    const VectorSpace& space() const { return sp_; }
    unsigned dim() const { return static_cast<unsigned>(basis_.size()); }
    const std::vector<u32>& basis() const { return basis_; }
    u32 size() const { return static_cast<u32>(num::checked_pow(sp_.p(), dim())); }

    bool contains(u32 v) const {
        for (std::size_t r = 0; r < basis_.size(); ++r) {
            const u32 c = sp_.digit(v, pivots_[r]);
            if (c) v = sp_.sub(v, sp_.scale(c, basis_[r]));
        }
        return v == 0;
    }

    /// all elements, combinations enumerated in counting order
    std::vector<u32> elements() const {
        std::vector<u32> out{0};
        for (u32 b : basis_) {
            const std::size_t n = out.size();
            for (u32 c = 1; c < sp_.p(); ++c) {
                const u32 cb = sp_.scale(c, b);
                for (std::size_t i = 0; i < n; ++i) out.push_back(sp_.add(out[i], cb));
            }
        }
        return out;
    }

    std::vector<bool> membership() const {
        std::vector<bool> bits(sp_.order(), false);
        for (u32 v : elements()) bits[v] = true;
        return bits;
    }

    Subspace intersect(const Subspace& o) const {
        // x in both: solve sum a_i b_i = sum c_j o_j
        const unsigned k = dim(), l = o.dim();
        Matrix m(sp_.p(), sp_.dim(), k + l);
        for (unsigned i = 0; i < k; ++i) {
            auto d = sp_.digits(basis_[i]);
            for (unsigned r = 0; r < sp_.dim(); ++r) m.at(r, i) = d[r];
        }
        for (unsigned j = 0; j < l; ++j) {
            auto d = sp_.digits(sp_.neg(o.basis_[j]));
            for (unsigned r = 0; r < sp_.dim(); ++r) m.at(r, k + j) = d[r];
        }
        std::vector<u32> vecs;
        for (auto& v : nullspace(m)) {
            u32 x = 0;
            for (unsigned i = 0; i < k; ++i) x = sp_.add(x, sp_.scale(v[i], basis_[i]));
            vecs.push_back(x);
        }
        return span(sp_, vecs);
    }

    bool is_subspace_of(const Subspace& o) const {
        return std::all_of(basis_.begin(), basis_.end(), [&](u32 v) { return o.contains(v); });
    }

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.sp_ == b.sp_ && a.basis_ == b.basis_;
    }

private:
    static Subspace from_rows(const VectorSpace& sp, Matrix m) {
        Subspace s(sp);
        auto piv = rref_in_place(m);
        for (unsigned r = 0; r < piv.size(); ++r) {
            std::vector<u32> d(sp.dim());
            for (unsigned j = 0; j < sp.dim(); ++j) d[j] = m.at(r, j);
            s.basis_.push_back(sp.pack(d));
            s.pivots_.push_back(piv[r]);
        }
        return s;
    }

    VectorSpace sp_;
    std::vector<u32> basis_;
    std::vector<unsigned> pivots_;
};

/// GF(p)-linear map between packed vector spaces; column j = image of basis vector j.
class LinearMap {
public:
    LinearMap() = default;
    LinearMap(VectorSpace dom, VectorSpace cod, Matrix m) : dom_(dom), cod_(cod), m_(std::move(m)) {
        if (m_.rows != cod_.dim() || m_.cols != dom_.dim())
            throw Error(Errc::DimensionMismatch, "linear map matrix shape");
    }

    template <class F>
    static LinearMap from_function(const VectorSpace& dom, const VectorSpace& cod, F&& f) {
        Matrix m(dom.p(), cod.dim(), dom.dim());
        for (unsigned j = 0; j < dom.dim(); ++j) {
            auto d = cod.digits(f(dom.basis(j)));
            for (unsigned i = 0; i < cod.dim(); ++i) m.at(i, j) = d[i];
        }
        return LinearMap(dom, cod, std::move(m));
    }

    static LinearMap identity(const VectorSpace& sp) { return LinearMap(sp, sp, Matrix::identity(sp.p(), sp.dim())); }

    const VectorSpace& domain() const { return dom_; }
    const VectorSpace& codomain() const { return cod_; }
    const Matrix& matrix() const { return m_; }

    u32 apply(u32 x) const {
        u32 r = 0;
        for (unsigned j = 0; j < dom_.dim(); ++j) {
            const u32 c = dom_.digit(x, j);
            if (!c) continue;
            u32 col = 0;
            for (unsigned i = 0; i < cod_.dim(); ++i) col += m_.at(i, j) * cod_.basis(i);
            r = cod_.add(r, cod_.scale(c, col));
        }
        return r;
    }

    u32 operator()(u32 x) const { return apply(x); }

    Subspace kernel() const {
        return Subspace::from_digit_vectors(dom_, nullspace(m_));
    }

    Subspace image() const {
        std::vector<u32> cols;
        for (unsigned j = 0; j < dom_.dim(); ++j) cols.push_back(apply(dom_.basis(j)));
        return Subspace::span(cod_, cols);
    }

    unsigned rank() const { return semifield::rank(m_); }

    std::optional<LinearMap> inverse() const {
        auto inv = semifield::inverse(m_);
        if (!inv) return std::nullopt;
        return LinearMap(cod_, dom_, *inv);
    }

    /// this after other
    LinearMap compose(const LinearMap& other) const {
        return LinearMap(other.dom_, cod_, multiply(m_, other.m_));
    }

    /// full lookup table, index = packed input
    std::vector<u32> table() const {
        std::vector<u32> t(dom_.order());
        for (u32 x = 0; x < dom_.order(); ++x) t[x] = apply(x);
        return t;
    }

    friend bool operator==(const LinearMap& a, const LinearMap& b) { return a.m_ == b.m_; }

private:
    VectorSpace dom_, cod_;
    Matrix m_;
};

}  // namespace semifield
