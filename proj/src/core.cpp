#include "unimod/core.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>

#include "unimod/shortvec.hpp"

namespace unimod {

void GramLattice::validate() const {
    const int n = rank();
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(gram[i].size()) != n) throw std::invalid_argument("gram is not square");
        for (int j = 0; j < i; ++j)
            if (gram[i][j] != gram[j][i]) throw std::invalid_argument("gram is not symmetric");
    }
    if (embedding) {
        const auto& B = embedding->rows;
        if (static_cast<int>(B.size()) != n) throw std::invalid_argument("embedding row count mismatch");
        Int d2 = embedding->denom * embedding->denom;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j)
                if (dot(B[i], B[j]) != gram[i][j] * d2)
                    throw std::invalid_argument("embedding does not match gram");
    }
}

GramLattice GramLattice::from_gram(IntMat g) {
    GramLattice L;
    L.gram = std::move(g);
    L.validate();
    return L;
}

IntMat identity_matrix(int n) {
    IntMat m(n, IntVec(n, 0));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

IntMat transpose(const IntMat& a) {
    if (a.empty()) return {};
    IntMat t(a[0].size(), IntVec(a.size()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    return t;
}

IntMat mat_mul(const IntMat& a, const IntMat& b) {
    if (a.empty()) return {};
    const size_t inner_dim = b.size();
    const size_t cols = b.empty() ? 0 : b[0].size();
    IntMat c(a.size(), IntVec(cols, 0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t k = 0; k < inner_dim; ++k) {
            if (sgn(a[i][k]) == 0) continue;
            for (size_t j = 0; j < cols; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

IntVec vec_mat(const IntVec& v, const IntMat& a) {
    const size_t cols = a.empty() ? 0 : a[0].size();
    IntVec r(cols, 0);
    for (size_t k = 0; k < v.size(); ++k) {
        if (sgn(v[k]) == 0) continue;
        for (size_t j = 0; j < cols; ++j) r[j] += v[k] * a[k][j];
    }
    return r;
}

Int dot(const IntVec& a, const IntVec& b) {
    Int s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Int inner(const GramLattice& L, const IntVec& a, const IntVec& b) {
    return dot(vec_mat(a, L.gram), b);
}

IntMat to_int_mat(const Mat64& m) {
    IntMat r(m.size());
    for (size_t i = 0; i < m.size(); ++i) r[i] = to_int_vec(m[i]);
    return r;
}

Vec64 to_vec64(const IntVec& v) {
    Vec64 r(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        if (!v[i].fits_slong_p()) throw std::overflow_error("entry exceeds 64 bits");
        r[i] = v[i].get_si();
    }
    return r;
}

Mat64 to_mat64(const IntMat& m) {
    Mat64 r(m.size());
    for (size_t i = 0; i < m.size(); ++i) r[i] = to_vec64(m[i]);
    return r;
}

IntVec to_int_vec(const Vec64& v) {
    IntVec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = static_cast<long>(v[i]);
    return r;
}

// Bareiss fraction-free elimination.
Int det(const IntMat& m0) {
    const int n = static_cast<int>(m0.size());
    if (n == 0) return 1;
    IntMat m = m0;
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (sgn(m[k][k]) == 0) {
            int p = k + 1;
            while (p < n && sgn(m[p][k]) == 0) ++p;
            if (p == n) return 0;
            std::swap(m[k], m[p]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                m[i][j] = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

Int det(const GramLattice& L) { return det(L.gram); }

bool is_even(const GramLattice& L) {
    for (int i = 0; i < L.rank(); ++i)
        if (mpz_odd_p(L.gram[i][i].get_mpz_t())) return false;
    return true;
}

bool is_unimodular(const GramLattice& L) {
    Int d = det(L);
    return d == 1 || d == -1;
}

CharacteristicCoset characteristic_rep(const GramLattice& L) {
    const int n = L.rank();
    // Augmented system over F_2: G xi = diag(G).
    std::vector<std::vector<uint8_t>> a(n, std::vector<uint8_t>(n + 1));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a[i][j] = mpz_odd_p(L.gram[i][j].get_mpz_t()) ? 1 : 0;
        a[i][n] = mpz_odd_p(L.gram[i][i].get_mpz_t()) ? 1 : 0;
    }
    std::vector<int> pivcol;
    int r = 0;
    for (int c = 0; c < n && r < n; ++c) {
        int p = r;
        while (p < n && !a[p][c]) ++p;
        if (p == n) continue;
        std::swap(a[p], a[r]);
        for (int i = 0; i < n; ++i)
            if (i != r && a[i][c])
                for (int j = c; j <= n; ++j) a[i][j] ^= a[r][j];
        pivcol.push_back(c);
        ++r;
    }
    if (r < n) throw std::invalid_argument("characteristic_rep: det(L) is even");
    CharacteristicCoset cc;
    cc.lattice = L;
    cc.xi.assign(n, 0);
    for (int i = 0; i < r; ++i) cc.xi[pivcol[i]] = a[i][n];
    return cc;
}

GramLattice even_part(const GramLattice& L) {
    if (is_even(L)) return L;
    auto cc = characteristic_rep(L);
    IntVec form = vec_mat(cc.xi, L.gram);
    IntMat k = congruence_kernel(form, Int(2));
    return sublattice(L, k);
}

namespace {

int cmpabs(const Int& a, const Int& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }

void row_sub(IntVec& dst, const IntVec& src, const Int& q) {
    if (sgn(q) == 0) return;
    for (size_t j = 0; j < dst.size(); ++j) dst[j] -= q * src[j];
}

Int tdiv(const Int& a, const Int& b) {
    Int q;
    mpz_tdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

Int fdiv(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

// Row echelon form with the transform applied to a companion matrix.
// Returns the rank; rows [0, rank) of `a` are the echelon basis.
int echelon(IntMat& a, IntMat* t) {
    const int k = static_cast<int>(a.size());
    if (k == 0) return 0;
    const int n = static_cast<int>(a[0].size());
    int r = 0;
    for (int c = 0; c < n && r < k; ++c) {
        while (true) {
            int best = -1;
            for (int i = r; i < k; ++i)
                if (sgn(a[i][c]) != 0 && (best < 0 || cmpabs(a[i][c], a[best][c]) < 0)) best = i;
            if (best < 0) break;
            if (best != r) {
                std::swap(a[best], a[r]);
                if (t) std::swap((*t)[best], (*t)[r]);
            }
            bool clean = true;
            for (int i = r + 1; i < k; ++i) {
                if (sgn(a[i][c]) == 0) continue;
                Int q = tdiv(a[i][c], a[r][c]);
                row_sub(a[i], a[r], q);
                if (t) row_sub((*t)[i], (*t)[r], q);
                if (sgn(a[i][c]) != 0) clean = false;
            }
            if (clean) break;
        }
        if (sgn(a[r][c]) == 0) continue;
        if (sgn(a[r][c]) < 0) {
            for (auto& e : a[r]) e = -e;
            if (t)
                for (auto& e : (*t)[r]) e = -e;
        }
        for (int i = 0; i < r; ++i) {
            Int q = fdiv(a[i][c], a[r][c]);
            row_sub(a[i], a[r], q);
            if (t) row_sub((*t)[i], (*t)[r], q);
        }
        ++r;
    }
    return r;
}

}  // namespace

IntMat hnf_rows(const IntMat& gens) {
    IntMat a = gens;
    int r = echelon(a, nullptr);
    a.resize(r);
    return a;
}

IntMat integer_kernel(const IntMat& a0) {
    const int k = static_cast<int>(a0.size());
    if (k == 0) return {};
    IntMat a = a0;
    IntMat t = identity_matrix(k);
    int r = echelon(a, &t);
    IntMat ker(t.begin() + r, t.end());
    if (ker.empty()) return ker;
    return hnf_rows(ker);
}

IntMat congruence_kernel(const IntVec& a, const Int& d) {
    const int n = static_cast<int>(a.size());
    IntMat col(n + 1, IntVec(1));
    for (int i = 0; i < n; ++i) col[i][0] = a[i];
    col[n][0] = d;
    IntMat ker = integer_kernel(col);
    IntMat proj;
    for (auto& row : ker) proj.emplace_back(row.begin(), row.begin() + n);
    return hnf_rows(proj);
}

IntMat unimodular_inverse(const IntMat& u) {
    const int n = static_cast<int>(u.size());
    std::vector<std::vector<Rat>> a(n, std::vector<Rat>(2 * n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a[i][j] = u[i][j];
        a[i][n + i] = 1;
    }
    for (int c = 0; c < n; ++c) {
        int p = c;
        while (p < n && sgn(a[p][c]) == 0) ++p;
        if (p == n) throw std::invalid_argument("singular matrix");
        std::swap(a[p], a[c]);
        Rat inv = 1 / a[c][c];
        for (auto& e : a[c]) e *= inv;
        for (int i = 0; i < n; ++i) {
            if (i == c || sgn(a[i][c]) == 0) continue;
            Rat f = a[i][c];
            for (int j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    IntMat r(n, IntVec(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (a[i][n + j].get_den() != 1) throw std::invalid_argument("matrix is not unimodular");
            r[i][j] = a[i][n + j].get_num();
        }
    return r;
}

Smith smith_normal_form(const IntMat& m) {
    const int k = static_cast<int>(m.size());
    const int n = k ? static_cast<int>(m[0].size()) : 0;
    Smith s{identity_matrix(k), m, identity_matrix(n)};
    auto& S = s.S;
    auto& U = s.U;
    auto& V = s.V;
    auto swap_cols = [](IntMat& a, int c1, int c2) {
        for (auto& row : a) std::swap(row[c1], row[c2]);
    };
    auto col_sub = [](IntMat& a, int dst, int src, const Int& q) {
        for (auto& row : a) row[dst] -= q * row[src];
    };
    for (int t = 0; t < std::min(k, n); ++t) {
        while (true) {
            int bi = -1, bj = -1;
            for (int i = t; i < k; ++i)
                for (int j = t; j < n; ++j)
                    if (sgn(S[i][j]) != 0 && (bi < 0 || cmpabs(S[i][j], S[bi][bj]) < 0)) {
                        bi = i;
                        bj = j;
                    }
            if (bi < 0) return s;
            if (bi != t) {
                std::swap(S[bi], S[t]);
                std::swap(U[bi], U[t]);
            }
            if (bj != t) {
                swap_cols(S, bj, t);
                swap_cols(V, bj, t);
            }
            bool done = true;
            for (int i = t + 1; i < k; ++i) {
                Int q = tdiv(S[i][t], S[t][t]);
                row_sub(S[i], S[t], q);
                row_sub(U[i], U[t], q);
                if (sgn(S[i][t]) != 0) done = false;
            }
            for (int j = t + 1; j < n; ++j) {
                Int q = tdiv(S[t][j], S[t][t]);
                col_sub(S, j, t, q);
                col_sub(V, j, t, q);
                if (sgn(S[t][j]) != 0) done = false;
            }
            if (!done) continue;
            int bad = -1;
            for (int i = t + 1; i < k && bad < 0; ++i)
                for (int j = t + 1; j < n; ++j)
                    if (!mpz_divisible_p(S[i][j].get_mpz_t(), S[t][t].get_mpz_t())) {
                        bad = i;
                        break;
                    }
            if (bad < 0) break;
            for (int j = 0; j < n; ++j) S[t][j] += S[bad][j];
            for (size_t j = 0; j < U[t].size(); ++j) U[t][j] += U[bad][j];
        }
        if (sgn(S[t][t]) < 0) {
            for (auto& e : S[t]) e = -e;
            for (auto& e : U[t]) e = -e;
        }
    }
    return s;
}

Saturation saturate(const GramLattice& L, const IntMat& a) {
    (void)L;
    Saturation out;
    out.index = 1;
    if (a.empty()) return out;
    Smith s = smith_normal_form(a);
    IntMat vinv = unimodular_inverse(s.V);
    const int lim = static_cast<int>(std::min(s.S.size(), s.S[0].size()));
    for (int i = 0; i < lim; ++i) {
        if (sgn(s.S[i][i]) == 0) break;
        out.index *= s.S[i][i];
        out.basis.push_back(vinv[i]);
    }
    return out;
}

GramLattice sublattice(const GramLattice& L, const IntMat& rows) {
    GramLattice S;
    IntMat rg = mat_mul(rows, L.gram);
    S.gram.assign(rows.size(), IntVec(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows.size(); ++j) S.gram[i][j] = dot(rg[i], rows[j]);
    if (L.embedding) S.embedding = Embedding{L.embedding->denom, mat_mul(rows, L.embedding->rows)};
    return S;
}

GramLattice direct_sum(const GramLattice& a, const GramLattice& b) {
    const int n1 = a.rank(), n2 = b.rank();
    GramLattice s;
    s.gram.assign(n1 + n2, IntVec(n1 + n2, 0));
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n1; ++j) s.gram[i][j] = a.gram[i][j];
    for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) s.gram[n1 + i][n1 + j] = b.gram[i][j];
    if (a.embedding && b.embedding) {
        Int D;
        mpz_lcm(D.get_mpz_t(), a.embedding->denom.get_mpz_t(), b.embedding->denom.get_mpz_t());
        Int fa = D / a.embedding->denom, fb = D / b.embedding->denom;
        const size_t w1 = n1 ? a.embedding->rows[0].size() : 0;
        const size_t w2 = n2 ? b.embedding->rows[0].size() : 0;
        IntMat rows(n1 + n2, IntVec(w1 + w2, 0));
        for (int i = 0; i < n1; ++i)
            for (size_t j = 0; j < w1; ++j) rows[i][j] = fa * a.embedding->rows[i][j];
        for (int i = 0; i < n2; ++i)
            for (size_t j = 0; j < w2; ++j) rows[n1 + i][w1 + j] = fb * b.embedding->rows[i][j];
        s.embedding = Embedding{D, rows};
    }
    return s;
}

SplitNormOne split_norm_one(const GramLattice& L) {
    SplitNormOne out;
    const int n = L.rank();
    ShortVectorSet sv = short_vectors(L, 1);
    out.m = static_cast<int>(sv.vecs.size());
    if (out.m == 0) {
        out.B = L;
        out.basisInL = identity_matrix(n);
        return out;
    }
    if (out.m == n) {
        out.B = GramLattice{};
        return out;
    }
    IntMat a(n, IntVec(out.m));
    for (int k = 0; k < out.m; ++k) {
        IntVec ge = vec_mat(to_int_vec(sv.vecs[k]), L.gram);
        for (int i = 0; i < n; ++i) a[i][k] = ge[i];
    }
    IntMat ker = integer_kernel(a);
    GramLattice B = sublattice(L, ker);
    LLLResult red = lll_reduce_with_transform(B);
    out.B = red.lattice;
    out.basisInL = mat_mul(red.transform, ker);
    return out;
}

// Integral LLL on the Gram matrix with delta = 99/100; all arithmetic exact.
LLLResult lll_reduce_with_transform(const GramLattice& L) {
    const int n = L.rank();
    LLLResult res;
    res.lattice = L;
    res.transform = identity_matrix(n);
    if (n <= 1) return res;
    // 1-indexed working copies.
    IntMat b(n + 1, IntVec(n + 1, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b[i + 1][j + 1] = L.gram[i][j];
    IntMat H(n + 1);
    for (int i = 0; i < n; ++i) H[i + 1] = res.transform[i];
    IntMat lam(n + 1, IntVec(n + 1, 0));
    IntVec d(n + 1, 0);
    d[0] = 1;
    d[1] = b[1][1];
    if (sgn(d[1]) <= 0) throw std::invalid_argument("lll: gram not positive definite");
    int k = 2, kmax = 1;

    auto red = [&](int kk, int l) {
        Int two_lam = 2 * lam[kk][l];
        if (cmpabs(two_lam, d[l]) <= 0) return;
        Int q = fdiv(2 * lam[kk][l] + d[l], 2 * d[l]);
        row_sub(H[kk], H[l], q);
        for (int j = 1; j <= n; ++j) b[kk][j] -= q * b[l][j];
        for (int j = 1; j <= n; ++j) b[j][kk] -= q * b[j][l];
        lam[kk][l] -= q * d[l];
        for (int i = 1; i < l; ++i) lam[kk][i] -= q * lam[l][i];
    };

    while (k <= n) {
        if (k > kmax) {
            kmax = k;
            for (int j = 1; j <= k; ++j) {
                Int u = b[k][j];
                for (int i = 1; i < j; ++i) {
                    u = d[i] * u - lam[k][i] * lam[j][i];
                    mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), d[i - 1].get_mpz_t());
                }
                if (j < k) {
                    lam[k][j] = u;
                } else {
                    d[k] = u;
                    if (sgn(u) <= 0) throw std::invalid_argument("lll: gram not positive definite");
                }
            }
        }
        red(k, k - 1);
        Int lhs = 100 * (d[k] * d[k - 2] + lam[k][k - 1] * lam[k][k - 1]);
        Int rhs = 99 * d[k - 1] * d[k - 1];
        if (lhs < rhs) {
            std::swap(H[k], H[k - 1]);
            std::swap(b[k], b[k - 1]);
            for (int j = 1; j <= n; ++j) std::swap(b[j][k], b[j][k - 1]);
            for (int j = 1; j <= k - 2; ++j) std::swap(lam[k][j], lam[k - 1][j]);
            Int l = lam[k][k - 1];
            Int B = d[k - 2] * d[k] + l * l;
            mpz_divexact(B.get_mpz_t(), B.get_mpz_t(), d[k - 1].get_mpz_t());
            for (int i = k + 1; i <= kmax; ++i) {
                Int t = lam[i][k];
                Int nk = d[k] * lam[i][k - 1] - l * t;
                mpz_divexact(nk.get_mpz_t(), nk.get_mpz_t(), d[k - 1].get_mpz_t());
                lam[i][k] = nk;
                Int nk1 = B * t + l * lam[i][k];
                mpz_divexact(nk1.get_mpz_t(), nk1.get_mpz_t(), d[k].get_mpz_t());
                lam[i][k - 1] = nk1;
            }
            d[k - 1] = B;
            k = std::max(2, k - 1);
        } else {
            for (int l = k - 2; l >= 1; --l) red(k, l);
            ++k;
        }
    }
    for (int i = 0; i < n; ++i) {
        res.transform[i] = H[i + 1];
        for (int j = 0; j < n; ++j) res.lattice.gram[i][j] = b[i + 1][j + 1];
    }
    if (L.embedding) res.lattice.embedding = Embedding{L.embedding->denom, mat_mul(res.transform, L.embedding->rows)};
    return res;
}

GramLattice lll_reduce(const GramLattice& L) { return lll_reduce_with_transform(L).lattice; }

namespace {

IntMat cartan_e(int n) {
    // Bourbaki: chain 1-3-4-5-...-n with 2 attached to 4.
    IntMat g(n, IntVec(n, 0));
    for (int i = 0; i < n; ++i) g[i][i] = 2;
    auto link = [&](int a, int b) { g[a - 1][b - 1] = g[b - 1][a - 1] = -1; };
    link(1, 3);
    link(2, 4);
    for (int i = 3; i < n; ++i) link(i, i + 1);
    return g;
}

}  // namespace

GramLattice standard_lattice(char kind, int n) {
    if (n < 0) throw std::invalid_argument("standard_lattice: negative rank");
    GramLattice L;
    switch (kind) {
        case 'I':
            L.gram = identity_matrix(n);
            break;
        case 'A':
            if (n < 1) throw std::invalid_argument("standard_lattice: A_n needs n >= 1");
            L.gram.assign(n, IntVec(n, 0));
            for (int i = 0; i < n; ++i) {
                L.gram[i][i] = 2;
                if (i + 1 < n) L.gram[i][i + 1] = L.gram[i + 1][i] = -1;
            }
            break;
        case 'D':
            if (n < 1) throw std::invalid_argument("standard_lattice: D_n needs n >= 1");
            if (n == 1) {
                L.gram = {{Int(4)}};
                break;
            }
            // e1-e2, ..., e_{n-1}-e_n, e_{n-1}+e_n
            L.gram.assign(n, IntVec(n, 0));
            for (int i = 0; i < n; ++i) L.gram[i][i] = 2;
            for (int i = 0; i + 2 < n; ++i) L.gram[i][i + 1] = L.gram[i + 1][i] = -1;
            if (n >= 3) L.gram[n - 3][n - 1] = L.gram[n - 1][n - 3] = -1;
            break;
        case 'E':
            if (n < 6 || n > 8) throw std::invalid_argument("standard_lattice: E_n needs 6 <= n <= 8");
            L.gram = cartan_e(n);
            break;
        default:
            throw std::invalid_argument("standard_lattice: unknown kind");
    }
    return L;
}

nlohmann::json gram_to_json(const IntMat& g) {
    nlohmann::json j = nlohmann::json::array();
    for (auto& row : g) {
        nlohmann::json r = nlohmann::json::array();
        for (auto& e : row) r.push_back(e.get_str());
        j.push_back(r);
    }
    return j;
}

IntMat gram_from_json(const nlohmann::json& j) {
    IntMat g;
    for (auto& row : j) {
        IntVec r;
        for (auto& e : row) {
            if (e.is_string())
                r.emplace_back(e.get<std::string>());
            else
                r.emplace_back(static_cast<long>(e.get<int64_t>()));
        }
        g.push_back(r);
    }
    return g;
}

}  // namespace unimod
