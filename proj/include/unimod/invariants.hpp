#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "unimod/core.hpp"
#include "unimod/rootsys.hpp"
#include "unimod/shortvec.hpp"

namespace unimod {

// LLL-reduced lattice with its vectors of norm <= 3 and root datum, shared by the invariants.
struct Analysis {
    GramLattice lattice;
    ShortVectorSet sv;
    RootDatum roots;
    std::vector<uint64_t> compMask;  // per vector of sv: components it is not orthogonal to
};
Analysis analyze(const GramLattice& L, uint64_t seed = 0);

struct DeltaTerm {
    RootSystemClass cls;
    int64_t m = 0;
    int64_t rank = -1;  // h_p of G(C^perp), -1 when not computed

    bool operator==(const DeltaTerm& o) const { return cls == o.cls && m == o.m && rank == o.rank; }
};
// Sorted by (class string, m, rank).
using Delta = std::vector<DeltaTerm>;

// m = |R_{<=3}(C^perp) - {0}| for each union C of s irreducible components.
Delta delta_s(const Analysis& A, int s);
Delta delta_s(const GramLattice& L, int s);
Delta delta_sp(const Analysis& A, int s, int p);
// "4(2A1,1968)+6(2A1,2000)"; rank appended as a third field when present.
std::string format_delta(const Delta& d);

// Rank mod p of the adjacency matrix of G(L); entry (x,y) is |x.y|, the diagonal holds x.x.
int64_t graph_rank_mod_p(const GramLattice& L, int p);
int64_t graph_rank_mod_p(const std::vector<Vec64>& vecs, const Mat64& gram, int p);

struct ExcSet {
    int64_t size = 0;
    int norm = 0;              // n mod 8
    std::vector<IntVec> reps;  // characteristic vectors of that norm, lattice coordinates
};
// Characteristic vectors of norm n mod 8 (the minimal ones when L is exceptional).
ExcSet exc_set(const GramLattice& L);

// 4/3 n (n^2 - 69n + 1208) + 2 (n - 24) r_2 - 2^(36-n) |Exc|.
Rat r3_predicted(int n, int64_t r2, int64_t excSize);
// Requires 24 <= n <= 28 and r_1 = 0.
bool r3_consistency(const GramLattice& L);

struct InvariantFingerprint {
    RootSystemClass rootClass;
    int64_t r1 = 0, r2 = 0, r3 = 0;
    Delta delta1, delta2;
    std::map<std::string, Delta> deltaSP;  // key "s,p"
    int64_t excSize = -1;
    int layerDepth = 0;

    nlohmann::json to_json() const;
    std::string canonical() const;  // compact JSON
    uint64_t hash() const;          // FNV-1a of canonical()
    bool operator==(const InvariantFingerprint& o) const { return canonical() == o.canonical(); }
};

// depth 1: root system and r_i; 2: + delta_1, delta_2, |Exc|; 3: + delta_{s,p}.
InvariantFingerprint fingerprint(const GramLattice& L, int depth);
InvariantFingerprint fingerprint(const Analysis& A, int depth);
// The root systems needing delta_{s,p} with s <= 7 and p in {5,7}.
bool needs_deep_delta(const RootSystemClass& c);

}  // namespace unimod
