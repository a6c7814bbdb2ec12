#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "semifield/theory.hpp"

namespace semifield::cli {

using json = nlohmann::ordered_json;
using theory::Agree;

/// Bad flags or unusable values; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    u32 p = 0;
    unsigned m = 0, s = 1;
    std::string family = "field";
    std::string l, n, N, R, v, mu, f, g;
    u64 l_order = 0, R_order = 0;
    u32 e = 1;
    std::string modulus_L, modulus_F;
    bool reduce = false, summary_only = false;
    unsigned threads = 1;
    std::string format = "json";
    std::string out;
};

// ---------------------------------------------------------------- element parsing

inline std::string trim(std::string t) {
    const auto b = t.find_first_not_of(" \t"), e = t.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : t.substr(b, e - b + 1);
}

inline long long parse_int(const std::string& t) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(t, &used);
    } catch (const std::exception&) {
        throw UsageError("not an integer: '" + t + "'");
    }
    if (used != t.size()) throw UsageError("not an integer: '" + t + "'");
    return v;
}

inline std::vector<long long> parse_int_list(std::string t) {
    t = trim(t);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') throw UsageError("expected a list like [1,0,2]: '" + t + "'");
    std::vector<long long> out;
    std::stringstream ss(t.substr(1, t.size() - 2));
    for (std::string part; std::getline(ss, part, ',');) {
        part = trim(part);
        if (!part.empty()) out.push_back(parse_int(part));
    }
    return out;
}

/// "[c0,c1,...]" (low degree first), "g^k" against the field's generator, or an integer of GF(p).
inline Element parse_element(const FieldCtx& K, const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw UsageError("empty element");
    if (t.front() == '[') {
        auto c = parse_int_list(t);
        if (c.size() > K.m()) throw UsageError("too many coefficients in '" + t + "'");
        std::vector<u32> d;
        for (long long x : c) d.push_back(static_cast<u32>(((x % K.p()) + K.p()) % K.p()));
        return K.from_coeffs(d);
    }
    if (t.rfind("g^", 0) == 0) {
        const long long k = parse_int(t.substr(2));
        const long long ord = K.order() - 1;
        return K.pow(K.generator(), static_cast<u64>(((k % ord) + ord) % ord));
    }
    return K.from_int(parse_int(t));
}

inline Element of_order(const FieldCtx& K, u64 k) {
    if (k == 0 || (K.order() - 1) % k != 0)
        throw UsageError("no element of order " + std::to_string(k) + " in GF(" + std::to_string(K.order()) + ")*");
    return K.pow(K.generator(), (K.order() - 1) / k);
}

inline json element_json(const FieldCtx& K, Element x) { return K.coeffs(x); }

inline json subspace_json(const Subspace& S) {
    json j;
    j["dim"] = S.dim();
    j["basis"] = S.basis();
    return j;
}

inline json nucleus_json(const NucleusInfo& n, u32 p) {
    json j;
    j["dim"] = n.dim();
    j["order"] = num::checked_pow(p, n.dim());
    j["subfield"] = n.is_subfield();
    j["basis"] = n.space.basis();
    return j;
}

inline json nuclei_json(const NucleiReport& r, u32 p) {
    return json{{"left", nucleus_json(r.left, p)},
                {"middle", nucleus_json(r.middle, p)},
                {"right", nucleus_json(r.right, p)},
                {"center", nucleus_json(r.center, p)}};
}

// ---------------------------------------------------------------- instances

struct Instance {
    FieldPtr L;
    TowerPtr tw;
    FamilyParams params;
    Family family = Family::Field;
    json record;
};

inline std::optional<std::vector<u32>> modulus_of(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::vector<u32> out;
    for (long long c : parse_int_list(text)) {
        if (c < 0) throw UsageError("modulus coefficients must be non-negative");
        out.push_back(static_cast<u32>(c));
    }
    return out;
}

inline Family family_of(const std::string& name) {
    static const std::map<std::string, Family> names{
        {"field", Family::Field}, {"twisted", Family::Twisted},   {"A", Family::A},
        {"X", Family::X},         {"B", Family::B},               {"C", Family::C},
        {"dickson", Family::Dickson}, {"hk", Family::HughesKleinfeld}, {"knuth", Family::Knuth}};
    auto it = names.find(name);
    if (it == names.end()) throw UsageError("unknown family '" + name + "'");
    return it->second;
}

inline bool needs_tower(Family f) { return f == Family::A || f == Family::Dickson || f == Family::HughesKleinfeld; }

inline Instance resolve(const Options& o) {
    if (o.p == 0 || o.m == 0) throw UsageError("--p and --m are required");
    Instance in;
    in.family = family_of(o.family);
    TowerOptions topts;
    topts.modulus_L = modulus_of(o.modulus_L);
    topts.modulus_F = modulus_of(o.modulus_F);
    if (needs_tower(in.family)) {
        in.tw = build_tower(o.p, o.m, o.s, topts);
        in.L = in.tw->L();
    } else {
        in.L = build_field(o.p, o.m, topts.modulus_L);
    }
    const FieldCtx& L = *in.L;
    auto req = [&](const std::string& text, const char* flag) {
        if (text.empty()) throw UsageError(std::string("--") + flag + " is required for family " + o.family);
        return parse_element(L, text);
    };
    auto l_elem = [&] { return o.l_order ? of_order(L, o.l_order) : req(o.l, "l"); };
    json params;
    switch (in.family) {
        case Family::Field: break;
        case Family::Twisted: {
            TwistedParams t{o.s, l_elem()};
            params = {{"s", t.s}, {"l", element_json(L, t.l)}};
            in.params = t;
            break;
        }
        case Family::A: {
            if (o.mu.empty()) throw UsageError("--mu is required for family A");
            AParams a{o.s, l_elem(), parse_element(*in.tw->F(), o.mu)};
            params = {{"s", a.s}, {"l", element_json(L, a.l)}, {"mu", element_json(*in.tw->F(), a.mu)}};
            in.params = a;
            break;
        }
        case Family::X: {
            XParams x{o.s, req(o.v, "v"), l_elem(), req(o.n, "n"), req(o.N, "N")};
            params = {{"s", x.s}, {"v", element_json(L, x.v)}, {"l", element_json(L, x.l)},
                      {"n", element_json(L, x.n)}, {"N", element_json(L, x.N)}};
            in.params = x;
            break;
        }
        case Family::B: {
            BParams b{o.s, l_elem(), req(o.n, "n"), req(o.N, "N")};
            params = {{"s", b.s}, {"l", element_json(L, b.l)}, {"n", element_json(L, b.n)}, {"N", element_json(L, b.N)}};
            in.params = b;
            break;
        }
        case Family::C: {
            CParams c{o.s, l_elem(), o.R_order ? of_order(L, o.R_order) : req(o.R, "R")};
            params = {{"s", c.s}, {"l", element_json(L, c.l)}, {"R", element_json(L, c.R)}};
            in.params = c;
            break;
        }
        case Family::Dickson:
            in.params = DicksonParams{o.s};
            params = {{"s", o.s}};
            break;
        case Family::HughesKleinfeld: {
            HKParams h{l_elem()};
            params = {{"l", element_json(L, h.l)}};
            in.params = h;
            break;
        }
        case Family::Knuth: {
            KnuthParams k{o.s, req(o.f, "f"), req(o.g, "g")};
            params = {{"s", k.s}, {"f", element_json(L, k.f)}, {"g", element_json(L, k.g)}};
            in.params = k;
            break;
        }
        default: throw UsageError("family not constructible from flags");
    }
    in.record = {{"family", family_name(in.family)}, {"p", o.p}, {"m", o.m}, {"params", params},
                 {"modulus_L", L.spec().modulus}};
    if (in.tw) in.record["modulus_F"] = in.tw->F()->spec().modulus;
    return in;
}

inline Presemifield build(const Instance& in, Materialize mat = Materialize::Auto) {
    if (in.family == Family::Field) return field_presemifield(in.L);
    return make_from_params(in.params, in.L, in.tw, mat);
}

inline void describe(json& record, const Presemifield& P) {
    record["order"] = P.order();
    record["flags"] = P.provenance().flags;
}

// ---------------------------------------------------------------- commands

struct Outcome {
    json report;
    int code = 0;
};

inline Outcome cmd_construct(const Options& o) {
    auto in = resolve(o);
    auto P = build(in);
    describe(in.record, P);
    return {json{{"instance", in.record}, {"results", {{"certified", true}}}}, 0};
}

/// Brute-force zero-divisor scan, independent of the rank-based certificate.
inline std::optional<std::pair<u32, u32>> zero_divisor_scan(const VectorSpace& sp, const ProductFn& mul) {
    for (u32 x = 1; x < sp.order(); ++x)
        for (u32 y = 1; y < sp.order(); ++y)
            if (mul(x, y) == 0) return std::make_pair(x, y);
    return std::nullopt;
}

inline Outcome cmd_verify(const Options& o) {
    auto in = resolve(o);
    json res;
    int code = 0;
    const bool xbc = in.family == Family::X || in.family == Family::B || in.family == Family::C;
    if (xbc) {
        const FieldCtx& L = *in.L;
        Validity pred;
        if (auto x = std::get_if<XParams>(&in.params)) pred = x_validity(L, *x);
        if (auto b = std::get_if<BParams>(&in.params)) pred = b_validity(L, *b);
        if (auto c = std::get_if<CParams>(&in.params)) pred = c_validity(L, *c);
        if (!pred && (pred.reason == Errc::SigmaOutOfRange || pred.reason == Errc::CharTwoUnsupported))
            throw Error(pred.reason, pred.detail);
        XProduct prod(in.L, as_x_params(L, in.params));
        VectorSpace sp(L.p(), 2 * L.m());
        auto cert = verify_presemifield(sp, prod);
        res["predicate"] = {{"valid", pred.ok}, {"reason", pred.ok ? "" : std::string(to_string(pred.reason))},
                            {"detail", pred.detail}};
        res["certificate"] = {{"ok", cert.ok}};
        if (cert.witness) res["certificate"]["witness"] = {cert.witness->first, cert.witness->second};
        Agree a = pred.ok == cert.ok ? Agree::Match : Agree::Mismatch;
        if (sp.order() <= 729) {
            auto z = zero_divisor_scan(sp, prod);
            res["scan"] = {{"ok", !z.has_value()}};
            if (z.has_value() == cert.ok) a = Agree::Mismatch;
        }
        res["agreement"] = theory::to_string(a);
        if (a == Agree::Mismatch) code = 1;
        in.record["order"] = sp.order();
    } else {
        auto P = build(in, Materialize::Never);
        describe(in.record, P);
        res["certificate"] = {{"ok", true}};
        if (P.order() <= 729) {
            auto z = zero_divisor_scan(P.space(), P.function());
            res["scan"] = {{"ok", !z.has_value()}};
            res["agreement"] = theory::to_string(z ? Agree::Mismatch : Agree::Match);
            if (z) code = 1;
        } else {
            res["agreement"] = theory::to_string(Agree::NotApplicable);
        }
    }
    return {json{{"instance", in.record}, {"results", res}}, code};
}

inline Semifield semifield_of(const Presemifield& P, u32 e) {
    if (e == 0 || e >= P.order()) throw UsageError("--e must be a nonzero vector index below the order");
    return to_semifield(P, e);
}

inline Outcome cmd_nuclei(const Options& o) {
    auto in = resolve(o);
    auto P = build(in);
    describe(in.record, P);
    auto S = semifield_of(P, o.e);
    const u32 p = P.space().p();
    auto lin = nuclei_linear(S);
    json res{{"e", o.e}, {"linear", nuclei_json(lin, p)}};
    json agree;
    int code = 0;
    if (P.order() <= 729) {
        auto bf = nuclei_bruteforce(S);
        res["bruteforce"] = nuclei_json(bf, p);
        auto same = [](const NucleusInfo& a, const NucleusInfo& b) {
            return a.space == b.space && a.closed == b.closed && a.contains_identity == b.contains_identity;
        };
        const std::pair<const char*, bool> parts[] = {{"left", same(lin.left, bf.left)},
                                                      {"middle", same(lin.middle, bf.middle)},
                                                      {"right", same(lin.right, bf.right)},
                                                      {"center", same(lin.center, bf.center)}};
        for (auto [name, ok] : parts) {
            agree[name] = theory::to_string(ok ? Agree::Match : Agree::Mismatch);
            if (!ok) code = 1;
        }
    } else {
        for (const char* name : {"left", "middle", "right", "center"}) agree[name] = theory::to_string(Agree::NotApplicable);
    }
    auto pr = theory::predict_nuclei(P);
    auto cmp = theory::compare(pr, lin);
    res["prediction"] = {{"branch", pr.branch}, {"agreement", theory::to_string(cmp.overall)}};
    if (cmp.overall == Agree::Mismatch) code = 1;
    res["agreement"] = agree;
    return {json{{"instance", in.record}, {"results", res}}, code};
}

inline Outcome cmd_ganley(const Options& o) {
    auto in = resolve(o);
    auto P = build(in);
    describe(in.record, P);
    auto S = semifield_of(P, o.e);
    const auto w_sf = ganley_semifield(S);
    const auto w_ps = ganley_presemifield(P);
    const auto space = ganley_witness_space(S);
    const auto alg = classify_algebra(S);
    json res{{"semifield_witness", w_sf ? json(*w_sf) : json(nullptr)},
             {"presemifield_witness", w_ps ? json(*w_ps) : json(nullptr)},
             {"witness_space", subspace_json(space)},
             {"commutative", w_sf.has_value()},
             {"algebra", {{"commutative", alg.commutative}, {"associative", alg.associative}}}};
    bool ok = w_sf.has_value() == w_ps.has_value() && w_sf.has_value() == (space.dim() > 0);
    json criterion = nullptr;
    if (in.L->p() != 2) {
        if (auto c = std::get_if<CParams>(&in.params)) {
            const bool crit = theory::c_comm_criterion(*in.L, *c);
            criterion = {{"name", "c_comm_criterion"}, {"holds", crit}};
            ok = ok && crit == w_sf.has_value();
        }
        if (auto b = std::get_if<BParams>(&in.params)) {
            const auto r = theory::b_comm_criterion(*in.L, *b);
            criterion = {{"name", "b_comm_criterion"}, {"holds", r.holds}, {"via", r.via}};
            ok = ok && r.holds == w_sf.has_value();
        }
    }
    res["criterion"] = criterion;
    res["agreement"] = theory::to_string(ok ? Agree::Match : Agree::Mismatch);
    return {json{{"instance", in.record}, {"results", res}}, ok ? 0 : 1};
}

inline json bound_json(const theory::DimBound& b) {
    if (b.hi == 0) return nullptr;
    return json{{"lo", b.lo}, {"hi", b.hi}};
}

inline Outcome cmd_predict(const Options& o) {
    auto in = resolve(o);
    auto P = build(in);
    describe(in.record, P);
    auto pr = theory::predict_nuclei(P);
    auto rep = nuclei_linear(to_semifield(P));
    auto cmp = theory::compare(pr, rep);
    json predicted{{"branch", pr.branch},
                   {"left", bound_json(pr.left)},
                   {"middle", bound_json(pr.middle)},
                   {"right", bound_json(pr.right)},
                   {"center", bound_json(pr.center)},
                   {"k1_dim", pr.k1_dim},
                   {"k2_dim", pr.k2_dim},
                   {"containment_only", pr.containment_only},
                   {"w_kernel_dim", pr.w_kernel_dim ? json(*pr.w_kernel_dim) : json(nullptr)},
                   {"notes", pr.notes}};
    json measured{{"left", rep.left.dim()}, {"middle", rep.middle.dim()}, {"right", rep.right.dim()},
                  {"center", rep.center.dim()}};
    json agree{{"left", theory::to_string(cmp.left)},     {"middle", theory::to_string(cmp.middle)},
               {"right", theory::to_string(cmp.right)},   {"center", theory::to_string(cmp.center)},
               {"overall", theory::to_string(cmp.overall)}};
    return {json{{"instance", in.record},
                 {"results", {{"predicted", predicted}, {"measured", measured}, {"agreement", agree}}}},
            cmp.overall == Agree::Mismatch ? 1 : 0};
}

inline void write_table(std::ostream& os, const std::vector<u32>& T, u32 o, const std::string& format, const json& record) {
    if (format == "csv") {
        for (u32 x = 0; x < o; ++x) {
            for (u32 y = 0; y < o; ++y) os << (y ? "," : "") << T[std::size_t{x} * o + y];
            os << "\n";
        }
        return;
    }
    json rows = json::array();
    for (u32 x = 0; x < o; ++x)
        rows.push_back(std::vector<u32>(T.begin() + std::size_t{x} * o, T.begin() + std::size_t{x + 1} * o));
    os << json{{"instance", record}, {"order", o}, {"table", rows}}.dump() << "\n";
}

/// Returns the report, or an empty report when the table itself went to `out`.
inline Outcome cmd_export(const Options& o, std::ostream& out) {
    if (o.format != "csv" && o.format != "json") throw UsageError("--format must be json or csv");
    auto in = resolve(o);
    auto P = build(in);
    describe(in.record, P);
    const u32 ord = P.order();
    if (ord > Presemifield::auto_table_limit) throw UsageError("export is limited to order " + std::to_string(Presemifield::auto_table_limit));
    std::vector<u32> T(std::size_t{ord} * ord);
    std::optional<Semifield> S;
    if (o.e != 1) S = semifield_of(P, o.e);
    for (u32 x = 0; x < ord; ++x)
        for (u32 y = 0; y < ord; ++y) T[std::size_t{x} * ord + y] = S ? S->circ(x, y) : P.mul(x, y);
    in.record["table"] = S ? "semifield" : "presemifield";
    if (o.out.empty()) {
        write_table(out, T, ord, o.format, in.record);
        return {json(), 0};
    }
    std::ofstream f(o.out);
    if (!f) throw UsageError("cannot open " + o.out);
    write_table(f, T, ord, o.format, in.record);
    return {json{{"instance", in.record}, {"results", {{"written", o.out}, {"format", o.format}}}}, 0};
}

// ---------------------------------------------------------------- census

struct CensusItem {
    std::vector<u32> t;  // packed parameters
    u64 orbit = 1;
};

struct CensusResult {
    bool ok = false;
    std::string error;
    bool commutative = false;
    unsigned l = 0, mid = 0, r = 0, c = 0;
    Agree prediction = Agree::NotApplicable;
};

inline FamilyParams census_params(Family f, unsigned s, const std::vector<u32>& t) {
    switch (f) {
        case Family::X: return XParams{s, Element{t[0]}, Element{t[1]}, Element{t[2]}, Element{t[3]}};
        case Family::B: return BParams{s, Element{t[0]}, Element{t[1]}, Element{t[2]}};
        case Family::C: return CParams{s, Element{t[0]}, Element{t[1]}};
        default: return TwistedParams{s, Element{t[0]}};
    }
}

inline std::vector<u32> census_tuple(const FamilyParams& fp) {
    if (auto x = std::get_if<XParams>(&fp)) return {x->v.packed, x->l.packed, x->n.packed, x->N.packed};
    if (auto b = std::get_if<BParams>(&fp)) return {b->l.packed, b->n.packed, b->N.packed};
    if (auto c = std::get_if<CParams>(&fp)) return {c->l.packed, c->R.packed};
    return {std::get<TwistedParams>(fp).l.packed};
}

inline bool census_valid(const FieldCtx& L, const FamilyParams& fp) {
    if (auto x = std::get_if<XParams>(&fp)) return x_validity(L, *x).ok;
    if (auto b = std::get_if<BParams>(&fp)) return b_validity(L, *b).ok;
    if (auto c = std::get_if<CParams>(&fp)) return c_validity(L, *c).ok;
    return twisted_validity(L, std::get<TwistedParams>(fp).s, std::get<TwistedParams>(fp).l).ok;
}

inline CensusResult classify_instance(const FieldPtr& L, const FamilyParams& fp) {
    CensusResult r;
    try {
        auto P = make_from_params(fp, L, nullptr);
        auto S = to_semifield(P);
        auto rep = nuclei_linear(S);
        r.commutative = ganley_witness_space(S).dim() > 0;
        r.l = rep.left.dim();
        r.mid = rep.middle.dim();
        r.r = rep.right.dim();
        r.c = rep.center.dim();
        r.prediction = theory::compare(theory::predict_nuclei(P), rep).overall;
        r.ok = true;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

inline int cmd_census(const Options& o, std::ostream& out) {
    const Family fam = family_of(o.family);
    if (fam != Family::X && fam != Family::B && fam != Family::C && fam != Family::Twisted)
        throw UsageError("census supports families X, B, C and twisted");
    if (o.p == 0 || o.m == 0) throw UsageError("--p and --m are required");
    auto L = build_field(o.p, o.m, modulus_of(o.modulus_L));
    const FieldCtx& K = *L;
    const u32 q = K.order();
    const unsigned width = fam == Family::X ? 4 : fam == Family::B ? 3 : fam == Family::C ? 2 : 1;
    u64 total = 1;
    for (unsigned i = 0; i < width; ++i) total *= q;

    // tuple index <-> parameters; X's v may be zero, everything else ranges over L*
    auto decode = [&](u64 idx) {
        std::vector<u32> t(width);
        for (unsigned i = width; i-- > 0;) {
            t[i] = static_cast<u32>(idx % q);
            idx /= q;
        }
        return t;
    };
    auto encode = [&](const std::vector<u32>& t) {
        u64 idx = 0;
        for (u32 x : t) idx = idx * q + x;
        return idx;
    };
    auto admissible = [&](const std::vector<u32>& t) {
        for (unsigned i = fam == Family::X ? 1 : 0; i < width; ++i)
            if (t[i] == 0) return false;
        return true;
    };

    std::vector<Transform> gens;
    if (o.reduce) {
        const Element g = K.generator();
        if (fam == Family::X || fam == Family::C) gens.push_back({Transform::Kind::Scale, g, K.one(), {}, {}});
        if (fam != Family::Twisted) gens.push_back({Transform::Kind::Scale, K.one(), g, {}, {}});
        if (fam != Family::Twisted && 2 * o.s == o.m) gens.push_back({Transform::Kind::Mirror, {}, {}, {}, {}});
    }

    u64 invalid = 0, skipped = 0, invariance_violations = 0;
    std::vector<CensusItem> items;
    std::vector<bool> seen(o.reduce ? total : 0);
    for (u64 idx = 0; idx < total; ++idx) {
        auto t = decode(idx);
        if (!admissible(t)) {
            ++skipped;
            continue;
        }
        if (o.reduce && seen[idx]) continue;
        const FamilyParams fp = census_params(fam, o.s, t);
        const bool valid = census_valid(K, fp);
        if (!o.reduce) {
            if (valid) items.push_back({t, 1});
            else ++invalid;
            continue;
        }
        // orbit under the generating transforms; validity must be constant on it
        std::vector<u64> stack{idx};
        seen[idx] = true;
        u64 size = 0;
        while (!stack.empty()) {
            const u64 cur = stack.back();
            stack.pop_back();
            ++size;
            const FamilyParams cp = census_params(fam, o.s, decode(cur));
            if (cur != idx && census_valid(K, cp) != valid) ++invariance_violations;
            for (const auto& tr : gens) {
                const u64 nxt = encode(census_tuple(transform_params(K, nullptr, cp, tr)));
                if (!seen[nxt]) {
                    seen[nxt] = true;
                    stack.push_back(nxt);
                }
            }
        }
        if (valid) items.push_back({t, size});
        else invalid += size;
    }

    std::vector<CensusResult> results(items.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < items.size();)
            results[i] = classify_instance(L, census_params(fam, o.s, items[i].t));
    };
    const unsigned nt = std::max(1u, std::min<unsigned>(o.threads, 64));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < nt; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    struct Bucket {
        u64 tuples = 0, orbits = 0;
    };
    std::map<std::tuple<bool, unsigned, unsigned, unsigned, unsigned>, Bucket> hist;
    u64 valid_tuples = 0, errors = 0, mismatches = 0;
    const char* names[] = {"v", "l", "n", "N"};
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& r = results[i];
        valid_tuples += items[i].orbit;
        if (!r.ok) {
            ++errors;
            continue;
        }
        if (r.prediction == Agree::Mismatch) ++mismatches;
        auto& b = hist[{r.commutative, r.l, r.mid, r.r, r.c}];
        b.tuples += items[i].orbit;
        b.orbits += 1;
        if (o.summary_only) continue;
        json params;
        const auto& t = items[i].t;
        for (unsigned k = 0; k < width; ++k) {
            std::string key = fam == Family::X ? names[k] : fam == Family::B ? names[k + 1] : k == 0 ? "l" : "R";
            params[key] = K.coeffs(Element{t[k]});
        }
        json line{{"family", family_name(fam)}, {"s", o.s}, {"params", params}, {"commutative", r.commutative},
                  {"nuclei", {r.l, r.mid, r.r, r.c}}, {"prediction", theory::to_string(r.prediction)}};
        if (o.reduce) line["orbit_size"] = items[i].orbit;
        out << line.dump() << "\n";
    }
    json h = json::array();
    for (const auto& [k, b] : hist) {
        auto [comm, l, mid, r, c] = k;
        h.push_back({{"commutative", comm}, {"nuclei", {l, mid, r, c}}, {"tuples", b.tuples}, {"orbits", b.orbits}});
    }
    json summary{{"summary", true},
                 {"family", family_name(fam)},
                 {"p", o.p},
                 {"m", o.m},
                 {"s", o.s},
                 {"reduce", o.reduce},
                 {"tuples", total - skipped},
                 {"valid", valid_tuples},
                 {"invalid", invalid},
                 {"histogram", h},
                 {"prediction_mismatches", mismatches},
                 {"errors", errors}};
    if (o.reduce) {
        summary["orbits"] = items.size();
        summary["invariance_violations"] = invariance_violations;
    }
    out << summary.dump() << "\n";
    return mismatches || errors || invariance_violations ? 1 : 0;
}

// ---------------------------------------------------------------- entry point

inline int exit_code_for(Errc e) {
    switch (e) {
        case Errc::CertificationFailed:
        case Errc::LemmaMismatch:
        case Errc::KernelMismatch:
        case Errc::InternalMismatch: return 1;
        default: return 2;
    }
}

inline void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--p", o.p, "characteristic");
    sub->add_option("--m", o.m, "degree of L over GF(p)");
    sub->add_option("--s", o.s, "sigma = x^(p^s)");
    sub->add_option("--family", o.family, "field, twisted, A, X, B, C, dickson, hk, knuth");
    sub->add_option("--l", o.l, "element: [c0,c1,..], g^k or an integer");
    sub->add_option("--n", o.n);
    sub->add_option("--N", o.N);
    sub->add_option("--R", o.R);
    sub->add_option("--v", o.v);
    sub->add_option("--mu", o.mu, "element of F (family A)");
    sub->add_option("--f", o.f, "Knuth f");
    sub->add_option("--g", o.g, "Knuth g");
    sub->add_option("--l-order", o.l_order, "take l = g^((q-1)/k)");
    sub->add_option("--R-order", o.R_order, "take R = g^((q-1)/k)");
    sub->add_option("--e", o.e, "semifield identity, as a packed vector index");
    sub->add_option("--modulus-L", o.modulus_L, "defining polynomial of L, low degree first");
    sub->add_option("--modulus-F", o.modulus_F, "defining polynomial of F, low degree first");
    sub->add_flag("--reduce", o.reduce, "census: orbit representatives only");
    sub->add_flag("--summary-only", o.summary_only, "census: skip per-instance lines");
    sub->add_option("--threads", o.threads);
    sub->add_option("--format", o.format, "json or csv");
    sub->add_option("--out", o.out, "output path");
}

inline std::string joined(int argc, const char* const* argv) {
    std::string s;
    for (int i = 1; i < argc; ++i) s += (i > 1 ? " " : "") + std::string(argv[i]);
    return s;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"semifield: construct and survey finite presemifields"};
    app.require_subcommand(1);
    Options o;
    std::vector<CLI::App*> subs;
    for (const char* name : {"construct", "verify", "nuclei", "ganley", "predict", "census", "export"}) {
        auto* sub = app.add_subcommand(name);
        add_common(sub, o);
        subs.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }
    std::string cmd;
    for (auto* s : subs)
        if (s->parsed()) cmd = s->get_name();

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (cmd == "census") return cmd_census(o, out);
        Outcome r;
        if (cmd == "construct") r = cmd_construct(o);
        else if (cmd == "verify") r = cmd_verify(o);
        else if (cmd == "nuclei") r = cmd_nuclei(o);
        else if (cmd == "ganley") r = cmd_ganley(o);
        else if (cmd == "predict") r = cmd_predict(o);
        else r = cmd_export(o, out);
        if (r.report.is_null()) return r.code;
        json report{{"command", joined(argc, argv)}};
        for (auto& [k, v] : r.report.items()) report[k] = v;
        report["timing_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        out << report.dump(2) << "\n";
        return r.code;
    } catch (const UsageError& e) {
        err << json{{"command", joined(argc, argv)}, {"error", "usage"}, {"detail", e.what()}}.dump() << "\n";
        return 2;
    } catch (const Error& e) {
        err << json{{"command", joined(argc, argv)}, {"error", std::string(to_string(e.code()))}, {"detail", e.what()}}.dump()
            << "\n";
        return exit_code_for(e.code());
    }
}

}  // namespace semifield::cli
