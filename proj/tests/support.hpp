// Shared helpers for the test binaries: random data and brute-force oracles.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "unimod/autiso.hpp"
#include "unimod/classify.hpp"
#include "unimod/core.hpp"
#include "unimod/invariants.hpp"
#include "unimod/massbook.hpp"
#include "unimod/neighbor.hpp"
#include "unimod/rootsys.hpp"
#include "unimod/shortvec.hpp"

namespace testsupport {

using namespace unimod;
using Rng = std::mt19937_64;

inline int64_t uniform(Rng& rng, int64_t lo, int64_t hi) {
    return std::uniform_int_distribution<int64_t>(lo, hi)(rng);
}

// Product of a few elementary operations; entries stay small.
inline IntMat random_unimodular(int n, Rng& rng, int steps = 0) {
    IntMat u = identity_matrix(n);
    if (n < 2) {
        if (n == 1 && uniform(rng, 0, 1)) u[0][0] = -1;
        return u;
    }
    if (steps == 0) steps = 3 * n;
    for (int s = 0; s < steps; ++s) {
        int i = static_cast<int>(uniform(rng, 0, n - 1));
        int j = static_cast<int>(uniform(rng, 0, n - 2));
        if (j >= i) ++j;
        switch (uniform(rng, 0, 3)) {
            case 0:
                std::swap(u[i], u[j]);
                break;
            case 1:
                for (auto& e : u[i]) e = -e;
                break;
            default: {
                int c = uniform(rng, 0, 1) ? 1 : -1;
                for (int k = 0; k < n; ++k) u[i][k] += c * u[j][k];
            }
        }
    }
    return u;
}

// Same lattice, new basis U * rows; the embedding is dropped.
inline GramLattice change_basis(const GramLattice& L, const IntMat& u) {
    return GramLattice::from_gram(mat_mul(mat_mul(u, L.gram), transpose(u)));
}

inline GramLattice scramble(const GramLattice& L, Rng& rng) {
    return change_basis(L, random_unimodular(L.rank(), rng));
}

inline GramLattice gram64(const Mat64& g) { return GramLattice::from_gram(to_int_mat(g)); }

inline bool positive_definite(const Mat64& g) {
    const int n = static_cast<int>(g.size());
    for (int k = 1; k <= n; ++k) {
        IntMat m(k, IntVec(k));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) m[i][j] = g[i][j];
        if (det(m) <= 0) return false;
    }
    return true;
}

// Symmetric positive definite, diagonal in [1, maxEntry], off-diagonal in [-maxEntry/2, maxEntry/2].
inline Mat64 random_gram(int n, int maxEntry, Rng& rng) {
    while (true) {
        Mat64 g(n, Vec64(n, 0));
        for (int i = 0; i < n; ++i) {
            g[i][i] = uniform(rng, 1, maxEntry);
            for (int j = 0; j < i; ++j) g[i][j] = g[j][i] = uniform(rng, -maxEntry / 2, maxEntry / 2);
        }
        if (positive_definite(g)) return g;
    }
}

inline int64_t norm64(const Mat64& g, const Vec64& v) {
    int64_t s = 0;
    for (size_t i = 0; i < v.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j) s += v[i] * g[i][j] * v[j];
    return s;
}

// Every nonzero v with v.v <= bound, by a box search: |v_i| <= sqrt(bound * (G^-1)_ii).
inline std::vector<Vec64> naive_short_vectors(const Mat64& g, int bound) {
    const int n = static_cast<int>(g.size());
    std::vector<std::vector<Rat>> a(n, std::vector<Rat>(2 * n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a[i][j] = g[i][j];
        a[i][n + i] = 1;
    }
    for (int c = 0; c < n; ++c) {
        int p = c;
        while (a[p][c] == 0) ++p;
        std::swap(a[p], a[c]);
        Rat iv = 1 / a[c][c];
        for (auto& x : a[c]) x *= iv;
        for (int r = 0; r < n; ++r)
            if (r != c && a[r][c] != 0) {
                Rat f = a[r][c];
                for (int k = 0; k < 2 * n; ++k) a[r][k] -= f * a[c][k];
            }
    }
    Vec64 box(n);
    for (int i = 0; i < n; ++i) {
        Rat r = a[i][n + i] * bound;
        int64_t b = 0;
        while (Rat((b + 1) * (b + 1)) <= r) ++b;
        box[i] = b;
    }
    std::vector<Vec64> out;
    Vec64 v(n);
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            if (std::any_of(v.begin(), v.end(), [](int64_t x) { return x != 0; }) && norm64(g, v) <= bound)
                out.push_back(v);
            return;
        }
        for (int64_t c = -box[i]; c <= box[i]; ++c) {
            v[i] = c;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

// |O(L)| by mapping basis vectors to equal-norm vectors in every Gram-preserving way.
inline int64_t brute_aut_order(const Mat64& g) {
    const int n = static_cast<int>(g.size());
    int maxNorm = 0;
    for (int i = 0; i < n; ++i) maxNorm = std::max<int>(maxNorm, static_cast<int>(g[i][i]));
    std::vector<Vec64> vs = naive_short_vectors(g, maxNorm);
    std::vector<Vec64> vg(vs.size(), Vec64(n, 0));
    for (size_t a = 0; a < vs.size(); ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) vg[a][j] += vs[a][i] * g[i][j];
    auto ip = [&](size_t a, size_t b) {
        int64_t s = 0;
        for (int k = 0; k < n; ++k) s += vg[a][k] * vs[b][k];
        return s;
    };
    std::vector<size_t> img(n);
    int64_t count = 0;
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            ++count;
            return;
        }
        for (size_t a = 0; a < vs.size(); ++a) {
            if (ip(a, a) != g[i][i]) continue;
            bool ok = true;
            for (int k = 0; k < i && ok; ++k) ok = ip(a, img[k]) == g[i][k];
            if (!ok) continue;
            img[i] = a;
            rec(i + 1);
        }
    };
    rec(0);
    return count;
}

// All classes of rank <= maxRank built from A_1..A_4 and D_4.
inline std::vector<RootSystemClass> small_classes(int maxRank) {
    std::vector<std::pair<char, int>> irr{{'A', 1}, {'A', 2}, {'A', 3}, {'A', 4}, {'D', 4}};
    std::vector<RootSystemClass> out;
    std::function<void(size_t, RootSystemClass, int)> rec = [&](size_t k, RootSystemClass c, int r) {
        if (k == irr.size()) {
            if (!c.empty()) out.push_back(c);
            return;
        }
        for (int m = 0; r + m * irr[k].second <= maxRank; ++m) {
            RootSystemClass c2 = c;
            if (m) c2.add(irr[k].first, irr[k].second, m);
            rec(k + 1, c2, r + m * irr[k].second);
        }
    };
    rec(0, RootSystemClass{}, 0);
    return out;
}

// Kernel root systems of all surjections Q(R) -> Z/d, one map per tuple of values on a basis.
inline std::set<RootSystemClass> brute_d_kernels(const RootSystemClass& c, int64_t d) {
    GramLattice Q = root_lattice(c);
    const int n = Q.rank();
    ShortVectorSet sv = short_vectors(Q, 2);
    std::vector<Vec64> roots;
    for (size_t i = 0; i < sv.size(); ++i)
        if (sv.norms[i] == 2) roots.push_back(sv.vecs[i]);
    std::set<RootSystemClass> out;
    Vec64 f(n, 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            int64_t g = d;
            for (auto v : f) g = std::gcd(g, v);
            if (g != 1) return;
            std::vector<Vec64> ker;
            for (auto& r : roots) {
                int64_t s = 0;
                for (int k = 0; k < n; ++k) s += r[k] * f[k];
                if (((s % d) + d) % d == 0) ker.push_back(r);
            }
            out.insert(identify(Q, ker).cls);
            return;
        }
        for (int64_t v = 0; v < d; ++v) {
            f[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

// A random valid form of rank n and modulus d; coordinates in [lo, d).
// Some (n, d) admit no valid x at all (n = 1, d > 1), so give up after a while.
inline std::optional<NeighborForm> try_random_form(int n, int64_t d, Rng& rng, int64_t lo = 0) {
    NeighborForm f;
    f.n = n;
    f.d = d;
    f.x.assign(n, 0);
    for (int attempt = 0; attempt < 5000; ++attempt) {
        for (auto& v : f.x) v = uniform(rng, lo, d - 1);
        f.eps = d % 2 == 0 ? static_cast<int>(uniform(rng, 0, 1)) : 0;
        if (f.valid()) return f;
    }
    return std::nullopt;
}

inline NeighborForm random_form(int n, int64_t d, Rng& rng, int64_t lo = 0) {
    auto f = try_random_form(n, d, rng, lo);
    if (!f) throw std::runtime_error("random_form: no valid x found");
    return *f;
}

// A random valid form built to be isotropic: coordinates random except a few adjusted ones.
// Falls back to rejection sampling, which is fine for d up to a few hundred.
inline NeighborForm random_form_no_norm_one(int n, int64_t dMin, int64_t dMax, Rng& rng) {
    while (true) {
        int64_t d = uniform(rng, dMin, dMax);
        auto g = try_random_form(n, d, rng, 1);
        if (!g) continue;
        NeighborForm f = *g;
        GramLattice N = build(f);
        if (short_vectors(N, 1).counts[1] == 0) return f;
    }
}

inline NeighborForm form(int64_t d, Vec64 x, int eps = 0) {
    NeighborForm f;
    f.n = static_cast<int>(x.size());
    f.d = d;
    f.x = std::move(x);
    f.eps = eps;
    f.validate();
    return f;
}

inline Vec64 range_vec(int64_t from, int64_t to, int64_t step = 1) {
    Vec64 x;
    for (int64_t v = from; v <= to; v += step) x.push_back(v);
    return x;
}

// The seven rank-26 forms with root system 10A1 and no norm 1 vectors, with reduced masses.
inline std::vector<std::pair<NeighborForm, std::string>> ten_a1_forms() {
    return {
        {form(36, {1, 1, 2, 3, 4, 5, 6, 6, 7, 7, 8, 8, 9, 10, 11, 12, 12, 13, 13, 14, 14, 15, 16, 16, 17, 18}), "1/64"},
        {form(36, {1, 1, 2, 3, 4, 5, 6, 6, 7, 8, 9, 10, 10, 11, 11, 12, 13, 13, 14, 14, 15, 16, 16, 17, 18, 18}), "1/96"},
        {form(36, {1, 1, 2, 3, 4, 5, 6, 7, 8, 8, 9, 10, 11, 11, 12, 12, 13, 13, 14, 14, 15, 16, 16, 17, 18, 18}), "1/96"},
        {form(36, {1, 1, 2, 2, 3, 4, 5, 6, 6, 7, 8, 8, 9, 9, 10, 10, 11, 12, 13, 14, 14, 15, 16, 17, 17, 18}), "1/640"},
        {form(39, {1, 1, 2, 3, 4, 5, 5, 6, 7, 7, 8, 8, 9, 10, 10, 11, 12, 13, 14, 14, 15, 16, 16, 17, 19, 19}),
         "1/12288"},
        {form(70, {1, 1, 33, 3, 4, 4, 5, 29, 7, 7, 27, 9, 9, 25, 11, 12, 12, 13, 21, 15, 15, 19, 18, 18, 35, 35}),
         "1/7372800"},
        {form(70, {1, 1, 33, 3, 4, 4, 5, 29, 7, 7, 27, 9, 9, 25, 11, 23, 23, 13, 21, 15, 15, 19, 17, 17, 35, 35}),
         "1/92897280"},
    };
}

inline const char* kTenA1Target = "4424507/116121600";

// |X_n| for n <= 16.
inline int genus_size(int n) {
    if (n <= 7) return 1;
    if (n <= 11) return 2;
    if (n <= 13) return 3;
    if (n == 14) return 4;
    if (n == 15) return 5;
    return 8;
}

}  // namespace testsupport
