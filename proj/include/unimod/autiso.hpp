#pragma once

#include <optional>
#include <vector>

#include "unimod/core.hpp"
#include "unimod/rootsys.hpp"

namespace unimod {

// Matrices act on coordinate rows, v -> v g, so an automorphism satisfies g G g^t = G.
struct AutResult {
    Int fullOrder;
    Int weylOrder;
    Int reducedOrder;             // |O(L; rho)|
    std::vector<IntMat> generators;  // generate O(L; rho), in the input basis
    RootSystemClass rootClass;
    int vectorBound = 0;          // norm bound of the vector set used by the search
    size_t vectorCount = 0;
};

AutResult aut_order(const GramLattice& L, uint64_t seed = 0);

struct IsoResult {
    bool isometric = false;
    // Rows are the images of the basis of a, in the basis of b: W G_b W^t = G_a.
    std::optional<IntMat> witness;
};

IsoResult is_isometric(const GramLattice& a, const GramLattice& b, uint64_t seed = 0);

}  // namespace unimod
