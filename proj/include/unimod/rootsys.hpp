#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "unimod/core.hpp"

namespace unimod {

// Multiset of irreducible ADE components, normalized so that D2 = 2A1, D3 = A3
// and D0, D1, A0 are dropped.
class RootSystemClass {
public:
    RootSystemClass() = default;

    void add(char type, int rank, int mult = 1);
    void add(const RootSystemClass& other);

    int rank() const;
    int num_components() const;
    int64_t root_count() const;
    bool empty() const { return comps_.empty(); }
    // Components listed with multiplicity, sorted by type then rank.
    std::vector<std::pair<char, int>> expanded() const;
    const std::map<std::pair<char, int>, int>& components() const { return comps_; }

    // "10A1", "2A1 2A2 2A3 2A4", "22A1 D4"; the empty class prints as "0".
    std::string str() const;
    static RootSystemClass parse(const std::string& s);

    bool operator==(const RootSystemClass& o) const { return comps_ == o.comps_; }
    bool operator!=(const RootSystemClass& o) const { return comps_ != o.comps_; }
    bool operator<(const RootSystemClass& o) const;

private:
    std::map<std::pair<char, int>, int> comps_;
};

RootSystemClass irreducible(char type, int rank);
RootSystemClass operator+(RootSystemClass a, const RootSystemClass& b);

struct RootDatum {
    std::vector<Vec64> roots;     // positive roots, lattice coordinates
    Vec64 rho2;                   // 2 * Weyl vector
    std::vector<int> simple;      // indices into roots
    std::vector<int> componentOf; // per root
    std::vector<RootSystemClass> componentClass;  // irreducible, per component
    RootSystemClass cls;
};

// `rootPairs`: one representative per +-pair of norm-2 vectors of L.
RootDatum identify(const GramLattice& L, const std::vector<Vec64>& rootPairs, uint64_t seed = 0);

Int weyl_order(const RootSystemClass& c);

struct VisibleShape {
    int m = 0;       // x_i = d/2 mod d
    int mPrime = 0;  // x_i = 0 mod d
    std::vector<int> partition;  // decreasing
};
VisibleShape visible_shape(const Vec64& x, int64_t d);
RootSystemClass visible_root_system(const Vec64& x, int64_t d);
RootSystemClass class_of_shape(const VisibleShape& s);

std::set<RootSystemClass> d_kernels(const RootSystemClass& c, int64_t d);

// Order of the residue group of an irreducible component.
int residue_order(char type, int rank);
// element[i] indexes the residue group of the i-th component of c.expanded().
// D_n indices: 1 and 3 are the spinor classes, 2 the vector class.
Rat venkov_qm(const RootSystemClass& c, const std::vector<int>& element);
bool is_detecting(const RootSystemClass& c);
bool safe_witness(const RootSystemClass& R, const RootSystemClass& S);

// Orthogonal sum of standard root lattices realizing c.
GramLattice root_lattice(const RootSystemClass& c);

}  // namespace unimod
