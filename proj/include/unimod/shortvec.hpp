#pragma once

#include "unimod/core.hpp"

namespace unimod {

struct ShortVectorSet {
    int bound = 0;
    std::vector<Vec64> vecs;  // one per +-pair, first nonzero coordinate positive
    std::vector<int> norms;
    std::vector<int64_t> counts;  // counts[i] = r_i, both signs counted

    size_t size() const { return vecs.size(); }
};

// All nonzero v with v.v <= bound, coordinates in the basis of L.
ShortVectorSet short_vectors(const GramLattice& L, int bound);

struct CosetVectors {
    Rat minNorm;
    std::vector<std::vector<Rat>> vecs;  // elements t + v, coordinates in the basis of L
};

// Elements of t + L of minimal norm.
CosetVectors coset_min_vectors(const GramLattice& L, const std::vector<Rat>& t);
// Elements of t + L with norm <= bound.
CosetVectors coset_vectors(const GramLattice& L, const std::vector<Rat>& t, const Rat& bound);

}  // namespace unimod
