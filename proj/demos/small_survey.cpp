// Count valid B(3,2,1,l,n,N) and group them by commutativity and middle nucleus.
#include <cstdio>
#include <map>

#include "semifield/theory.hpp"

using namespace semifield;

int main() {
    auto L = build_field(3, 2);
    std::map<std::pair<bool, unsigned>, int> classes;
    int valid = 0, total = 0;
    for (u32 l = 1; l < 9; ++l)
        for (u32 n = 1; n < 9; ++n)
            for (u32 N = 1; N < 9; ++N) {
                ++total;
                const BParams b{1, Element{l}, Element{n}, Element{N}};
                if (!b_validity(*L, b)) continue;
                ++valid;
                auto S = to_semifield(make_B(L, b));
                const bool comm = ganley_witness_space(S).dim() > 0;
                ++classes[{comm, nuclei_linear(S).middle.dim()}];
            }
    std::printf("B(3,2,1,...): %d of %d parameter choices are presemifields\n", valid, total);
    for (auto [k, count] : classes)
        std::printf("  %-16s middle nucleus GF(3^%u): %d\n", k.first ? "commutative" : "non-commutative", k.second, count);
}
