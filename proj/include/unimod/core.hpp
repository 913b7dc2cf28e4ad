#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace unimod {

using Int = mpz_class;
using Rat = mpq_class;
using IntVec = std::vector<Int>;
using IntMat = std::vector<IntVec>;
using Vec64 = std::vector<int64_t>;
using Mat64 = std::vector<Vec64>;

// Rows of `rows` divided by `denom` span the lattice inside Q^n.
struct Embedding {
    Int denom;
    IntMat rows;
};

struct GramLattice {
    IntMat gram;
    std::optional<Embedding> embedding;

    int rank() const { return static_cast<int>(gram.size()); }

    // Checks symmetry and, if present, the embedding identity gram * D^2 = B B^t.
    void validate() const;
    static GramLattice from_gram(IntMat g);
};

struct CharacteristicCoset {
    GramLattice lattice;
    IntVec xi;  // coordinates in the lattice basis, entries in {0,1}
};

// a/b in lowest terms; mpq arithmetic assumes canonical operands.
inline Rat make_rat(const Int& a, const Int& b) {
    Rat r(a, b);
    r.canonicalize();
    return r;
}

// Small matrix helpers.
IntMat identity_matrix(int n);
IntMat transpose(const IntMat& a);
IntMat mat_mul(const IntMat& a, const IntMat& b);
IntVec vec_mat(const IntVec& v, const IntMat& a);
Int dot(const IntVec& a, const IntVec& b);
Int inner(const GramLattice& L, const IntVec& a, const IntVec& b);
IntMat to_int_mat(const Mat64& m);
Mat64 to_mat64(const IntMat& m);  // throws if an entry does not fit
Vec64 to_vec64(const IntVec& v);
IntVec to_int_vec(const Vec64& v);

Int det(const IntMat& m);
Int det(const GramLattice& L);
bool is_even(const GramLattice& L);
bool is_unimodular(const GramLattice& L);

CharacteristicCoset characteristic_rep(const GramLattice& L);
GramLattice even_part(const GramLattice& L);

struct Smith {
    IntMat U, S, V;  // U * M * V = S
};
Smith smith_normal_form(const IntMat& m);

// Echelon basis of the row span (zero rows dropped).
IntMat hnf_rows(const IntMat& gens);
// Basis of {v in Z^k : v * A = 0} where A is k x c.
IntMat integer_kernel(const IntMat& a);
// Basis of {v in Z^n : a.v = 0 mod d}.
IntMat congruence_kernel(const IntVec& a, const Int& d);
// Inverse of a unimodular matrix.
IntMat unimodular_inverse(const IntMat& u);

struct Saturation {
    IntMat basis;  // rows in coordinates of L
    Int index;     // [Sat(A) : span(A)]
};
Saturation saturate(const GramLattice& L, const IntMat& a);

// Lattice spanned by `rows` (coordinates in the basis of L).
GramLattice sublattice(const GramLattice& L, const IntMat& rows);
GramLattice direct_sum(const GramLattice& a, const GramLattice& b);

struct SplitNormOne {
    int m = 0;
    GramLattice B;
    IntMat basisInL;  // rows: basis of B in coordinates of L
};
SplitNormOne split_norm_one(const GramLattice& L);

struct LLLResult {
    GramLattice lattice;
    IntMat transform;  // new basis rows = transform * old basis rows
};
LLLResult lll_reduce_with_transform(const GramLattice& L);
GramLattice lll_reduce(const GramLattice& L);

// kind in {'A','D','E','I'}.
GramLattice standard_lattice(char kind, int n);

nlohmann::json gram_to_json(const IntMat& g);
IntMat gram_from_json(const nlohmann::json& j);

}  // namespace unimod
