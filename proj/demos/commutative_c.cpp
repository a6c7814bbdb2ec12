// C(3,3,2,1,-1): build it, look at a few products, then ask for its invariants.
#include <cstdio>

#include "semifield/theory.hpp"

using namespace semifield;

int main() {
    auto L = build_field(3, 3);
    const FieldCtx& f = *L;
    const CParams params{2, f.one(), f.neg(f.one())};
    auto P = make_C(L, params);
    std::printf("C(3,3,2,1,-1): order %u, certified\n", P.order());

    // vectors are pairs (a,b) of GF(27) packed as a + 27 b
    for (u32 x : {1u, 28u, 27u * 5 + 3})
        for (u32 y : {2u, 27u, 400u}) std::printf("  %3u * %3u = %3u\n", x, y, P.mul(x, y));

    auto S = to_semifield(P);
    auto r = nuclei_linear(S);
    std::printf("nuclei over GF(3): left %u, middle %u, right %u, center %u\n", r.left.dim(), r.middle.dim(),
                r.right.dim(), r.center.dim());

    if (auto w = ganley_semifield(S)) std::printf("Ganley witness w = %u: isotopic to a commutative semifield\n", *w);
    std::printf("closed-form criterion says %s\n", theory::c_comm_criterion(f, params) ? "commutative" : "not commutative");

    auto pr = theory::predict_nuclei(P);
    std::printf("prediction branch %s: %s\n", pr.branch.c_str(), theory::to_string(theory::compare(pr, r).overall));
}
