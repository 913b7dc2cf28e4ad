#include "unimod/shortvec.hpp"

#include <cmath>
#include <stdexcept>

namespace unimod {

namespace {

using LD = long double;

// Q(y) = sum_i q[i][i] * (y_i + sum_{j>i} q[i][j] y_j)^2
std::vector<std::vector<LD>> cholesky(const Mat64& g) {
    const int n = static_cast<int>(g.size());
    std::vector<std::vector<LD>> q(n, std::vector<LD>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q[i][j] = static_cast<LD>(g[i][j]);
    for (int i = 0; i < n; ++i) {
        if (q[i][i] <= 0) throw std::invalid_argument("shortvec: gram not positive definite");
        for (int j = i + 1; j < n; ++j) {
            q[j][i] = q[i][j];
            q[i][j] = q[i][j] / q[i][i];
        }
        for (int k = i + 1; k < n; ++k)
            for (int l = k; l < n; ++l) q[k][l] -= q[k][i] * q[i][l];
    }
    return q;
}

__int128 exact_norm(const Mat64& g, const Vec64& c) {
    const size_t n = c.size();
    __int128 s = 0;
    for (size_t i = 0; i < n; ++i) {
        if (c[i] == 0) continue;
        __int128 row = 0;
        for (size_t j = 0; j < n; ++j) row += static_cast<__int128>(g[i][j]) * c[j];
        s += row * c[i];
    }
    return s;
}

// Enumerates x in Z^n with Q(x + shift) <= bound (floating, slackened); calls visit(x).
// When `half` is set, only one of each +-pair (and not 0) is produced; requires shift = 0.
template <class Visit>
void fincke_pohst(const std::vector<std::vector<LD>>& q, const std::vector<LD>& shift, LD bound, bool half,
                  Visit&& visit) {
    const int n = static_cast<int>(q.size());
    if (n == 0) return;
    Vec64 x(n, 0);
    std::vector<LD> y(n, 0), rem(n + 1, 0), center(n, 0);
    std::vector<bool> allzero(n + 1, true);  // allzero[i]: x_j == 0 for all j >= i
    rem[n] = bound;
    auto rec = [&](auto&& self, int i) -> void {
        LD s = shift[i];
        for (int j = i + 1; j < n; ++j) s += q[i][j] * y[j];
        center[i] = -s;
        LD r = rem[i + 1] / q[i][i];
        if (r < 0) return;
        LD w = std::sqrt(r);
        int64_t lo = static_cast<int64_t>(std::ceil(center[i] - w));
        int64_t up = static_cast<int64_t>(std::floor(center[i] + w));
        if (half && allzero[i + 1] && lo < 0) lo = 0;
        for (int64_t v = lo; v <= up; ++v) {
            LD t = static_cast<LD>(v) - center[i];
            LD nr = rem[i + 1] - q[i][i] * t * t;
            if (nr < 0) continue;
            x[i] = v;
            y[i] = static_cast<LD>(v) + shift[i];
            rem[i] = nr;
            allzero[i] = allzero[i + 1] && v == 0;
            if (i == 0) {
                if (!(half && allzero[0])) visit(x);
            } else {
                self(self, i - 1);
            }
        }
        x[i] = 0;
    };
    rec(rec, n - 1);
}

Vec64 combine(const Vec64& c, const Mat64& t) {
    const size_t n = c.size();
    Vec64 v(n, 0);
    for (size_t i = 0; i < n; ++i) {
        if (c[i] == 0) continue;
        for (size_t j = 0; j < n; ++j) v[j] += c[i] * t[i][j];
    }
    return v;
}

}  // namespace

ShortVectorSet short_vectors(const GramLattice& L, int bound) {
    ShortVectorSet out;
    out.bound = bound;
    out.counts.assign(bound + 1, 0);
    out.counts[0] = 1;
    const int n = L.rank();
    if (n == 0 || bound < 1) return out;
    LLLResult red = lll_reduce_with_transform(L);
    Mat64 g = to_mat64(red.lattice.gram);
    Mat64 t = to_mat64(red.transform);
    auto q = cholesky(g);
    std::vector<LD> shift(n, 0);
    LD fb = static_cast<LD>(bound) * (1 + 1e-6L) + 1e-9L;
    fincke_pohst(q, shift, fb, true, [&](const Vec64& c) {
        __int128 nm = exact_norm(g, c);
        if (nm <= 0 || nm > bound) return;
        Vec64 v = combine(c, t);
        for (auto e : v) {
            if (e == 0) continue;
            if (e < 0)
                for (auto& f : v) f = -f;
            break;
        }
        out.vecs.push_back(std::move(v));
        out.norms.push_back(static_cast<int>(nm));
        out.counts[static_cast<int>(nm)] += 2;
    });
    return out;
}

namespace {

Rat exact_coset_norm(const IntMat& g, const std::vector<Rat>& y) {
    const size_t n = y.size();
    Rat s = 0;
    for (size_t i = 0; i < n; ++i) {
        if (sgn(y[i]) == 0) continue;
        Rat row = 0;
        for (size_t j = 0; j < n; ++j) row += g[i][j] * y[j];
        s += row * y[i];
    }
    return s;
}

}  // namespace

CosetVectors coset_vectors(const GramLattice& L, const std::vector<Rat>& t, const Rat& bound) {
    CosetVectors out;
    const int n = L.rank();
    out.minNorm = -1;
    if (n == 0) {
        out.minNorm = 0;
        out.vecs.push_back({});
        return out;
    }
    LLLResult red = lll_reduce_with_transform(L);
    IntMat tinv = unimodular_inverse(red.transform);
    // t' = t * T^{-1}
    std::vector<Rat> tn(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) tn[j] += t[i] * tinv[i][j];
    // Shift t' into [0,1)^n.
    std::vector<Rat> tr(n);
    for (int i = 0; i < n; ++i) {
        Int fl;
        mpz_fdiv_q(fl.get_mpz_t(), tn[i].get_num_mpz_t(), tn[i].get_den_mpz_t());
        tr[i] = tn[i] - fl;
    }
    Mat64 g = to_mat64(red.lattice.gram);
    auto q = cholesky(g);
    std::vector<LD> shift(n);
    for (int i = 0; i < n; ++i) shift[i] = static_cast<LD>(tr[i].get_d());
    LD fb = static_cast<LD>(bound.get_d()) * (1 + 1e-6L) + 1e-6L;
    const IntMat& T = red.transform;
    fincke_pohst(q, shift, fb, false, [&](const Vec64& c) {
        std::vector<Rat> y(n);
        for (int i = 0; i < n; ++i) y[i] = Rat(static_cast<long>(c[i])) + tr[i];
        Rat nm = exact_coset_norm(red.lattice.gram, y);
        if (nm > bound) return;
        std::vector<Rat> v(n, 0);
        for (int i = 0; i < n; ++i) {
            if (sgn(y[i]) == 0) continue;
            for (int j = 0; j < n; ++j) v[j] += y[i] * T[i][j];
        }
        if (out.minNorm < 0 || nm < out.minNorm) out.minNorm = nm;
        out.vecs.push_back(std::move(v));
    });
    return out;
}

CosetVectors coset_min_vectors(const GramLattice& L, const std::vector<Rat>& t) {
    const int n = L.rank();
    if (n == 0) return coset_vectors(L, t, 0);
    Rat bound(1, 4);
    while (true) {
        CosetVectors all = coset_vectors(L, t, bound);
        if (!all.vecs.empty()) {
            CosetVectors out;
            out.minNorm = all.minNorm;
            for (auto& v : all.vecs)
                if (exact_coset_norm(L.gram, v) == all.minNorm) out.vecs.push_back(v);
            return out;
        }
        bound *= 2;
    }
}

}  // namespace unimod
