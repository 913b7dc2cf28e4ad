#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "unimod/core.hpp"
#include "unimod/rootsys.hpp"

namespace unimod {

// Cyclic d-neighbor N_d(x; eps) of I_n. eps is relative to the stored x and is 0 for odd d.
struct NeighborForm {
    int n = 0;
    int64_t d = 1;
    Vec64 x;
    int eps = 0;

    // Throws std::invalid_argument unless x is d-primitive and d-isotropic.
    void validate() const;
    bool valid() const;

    nlohmann::json to_json() const;
    static NeighborForm from_json(const nlohmann::json& j);
    std::string str() const;

    bool operator==(const NeighborForm& o) const { return n == o.n && d == o.d && x == o.x && eps == o.eps; }
};

// x.y = 1 mod d, deterministic choice.
Vec64 choose_y(const Vec64& x, int64_t d);

// Basis of M_d(x) = {v : sum x_i v_i = 0 mod d}, as an embedded lattice with denominator 1.
GramLattice m_lattice(const NeighborForm& f);
// N = M_d(x) + Z x~/d, LLL-reduced, embedded with denominator d.
GramLattice build(const NeighborForm& f);
GramLattice build_with_y(const NeighborForm& f, const Vec64& y);

bool is_even_neighbor(const NeighborForm& f);

// d-ordered representative, with eps transported across the +-d shifts.
NeighborForm canonical_line(const Vec64& x, int64_t d, int eps = 0);

// Prescribed class sizes for coordinates of the line (the visible shape).
// parts: sizes of classes of coordinates equal up to sign mod d (excluding 0 and d/2);
// halfD: number of coordinates = d/2. A class of size 1 may sit at d/2 when halfD = 0.
// free == n means no constraint; 0 < free < n asks the prescribed classes to appear among others.
struct IsotropicLinePattern {
    std::vector<int> parts;
    int halfD = 0;
    int free = 0;

    int total() const;
    RootSystemClass root_class() const;
    static IsotropicLinePattern unconstrained(int n);
    // "8*2+10*1" means eight classes of size 2 and ten of size 1; "h4" adds four d/2 coordinates.
    static IsotropicLinePattern parse(const std::string& s, int n);
};

struct EnumerateOptions {
    bool firstIsOne = false;   // x_1 = 1 with maximal multiplicity
    uint64_t skip = 0;         // resume cursor: number of lines already emitted
    uint64_t shard = 0;        // emit line k only if k % shards == shard
    uint64_t shards = 1;
    bool allowZero = false;    // also emit lines with x_1 = 0 (lattices with norm 1 vectors)
};

// Streams d-ordered, d-isotropic x with 1 <= x_1 <= ... <= x_n <= d/2 matching the pattern.
// The callback returns false to stop. Returns the number of lines visited (the next cursor).
uint64_t enumerate_lines(int n, int64_t d, const IsotropicLinePattern& pattern, const EnumerateOptions& opt,
                         const std::function<bool(const NeighborForm&)>& emit);

NeighborForm add_Im(const NeighborForm& f, int m);

// The line (dN + d Z^n)/d Z^n of an embedded unimodular lattice, and its order.
struct LineOf {
    int64_t order = 1;
    Vec64 y;
};
LineOf line_of(const GramLattice& N);

// Equality of embedded lattices as subsets of Q^n.
bool same_embedded_lattice(const GramLattice& a, const GramLattice& b);

// Inner neighbor: the d'-neighbor of build(outer) given by z (coordinates in the basis of build(outer)).
struct InnerNeighbor {
    int64_t d = 1;
    IntVec z;
    int eps = 0;
};
GramLattice neighbor_of(const GramLattice& L, const InnerNeighbor& inner);
NeighborForm compose(const NeighborForm& outer, const InnerNeighbor& inner);

// 2d-forms y of I_{n+m} with y = x mod d on the first n coordinates and y_i = d on the others.
// If filter is set, only forms whose visible root system is visible(f) + D_m are emitted.
void add_Dm_candidates(const NeighborForm& f, int m, bool filter,
                       const std::function<bool(const NeighborForm&)>& emit);

std::pair<NeighborForm, NeighborForm> companions(const NeighborForm& f);

struct VisibleIsometry {
    std::vector<int64_t> H;  // units lambda mod d with lambda X = X
    Int kernelOrder;
};
VisibleIsometry visible_isometry_group(const NeighborForm& f);

// Line of modulus p*dCoprime carrying the cyclic shift on k disjoint q-cycles
// (coordinates [jq, (j+1)q)) with eigenvalue omega mod p.
NeighborForm stable_line(int n, int q, int k, int64_t p, int64_t omega, int64_t dCoprime, const Vec64& yTail);

// Conditions making e = (0^{n-r}, 1^r) characteristic of norm r in N_d(x; eps), d even.
bool visible_char_conditions(const NeighborForm& f, int r);
// Streams forms satisfying the conditions, odd block and even block each non-decreasing.
void visible_char_lines(int n, int r, int64_t d, const std::function<bool(const NeighborForm&)>& emit);

}  // namespace unimod
