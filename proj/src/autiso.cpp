#include "unimod/autiso.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "unimod/shortvec.hpp"

namespace unimod {

namespace {

constexpr int64_t kPrime = 2147483647;  // independence tests
constexpr size_t kTableLimit = 8000;    // int8 inner-product table up to this many vectors
constexpr size_t kRefLimit = 4096;      // signature refinement partners

uint64_t mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct VecHash {
    size_t operator()(const Vec64& v) const {
        uint64_t h = 1469598103934665603ULL;
        for (auto x : v) h = mix(h ^ static_cast<uint64_t>(x));
        return h;
    }
};

// Incremental rank over F_p.
struct ModRank {
    int n;
    std::vector<Vec64> rows;  // reduced, with pivot columns
    std::vector<int> pivots;
    explicit ModRank(int n_) : n(n_) {}

    Vec64 reduce(const Vec64& v) const {
        Vec64 r(n);
        for (int i = 0; i < n; ++i) r[i] = ((v[i] % kPrime) + kPrime) % kPrime;
        for (size_t k = 0; k < rows.size(); ++k) {
            int64_t f = r[pivots[k]];
            if (f == 0) continue;
            for (int i = 0; i < n; ++i) r[i] = ((r[i] - f * rows[k][i]) % kPrime + kPrime) % kPrime;
        }
        return r;
    }
    static int64_t inv(int64_t a) {
        int64_t r = 1, e = kPrime - 2;
        a %= kPrime;
        while (e) {
            if (e & 1) r = static_cast<int64_t>((static_cast<__int128>(r) * a) % kPrime);
            a = static_cast<int64_t>((static_cast<__int128>(a) * a) % kPrime);
            e >>= 1;
        }
        return r;
    }
    bool independent(const Vec64& v) const {
        Vec64 r = reduce(v);
        return std::any_of(r.begin(), r.end(), [](int64_t x) { return x != 0; });
    }
    bool add(const Vec64& v) {
        Vec64 r = reduce(v);
        int p = -1;
        for (int i = 0; i < n; ++i)
            if (r[i] != 0) {
                p = i;
                break;
            }
        if (p < 0) return false;
        int64_t iv = inv(r[p]);
        for (auto& x : r) x = static_cast<int64_t>((static_cast<__int128>(x) * iv) % kPrime);
        for (size_t k = 0; k < rows.size(); ++k) {
            int64_t f = rows[k][p];
            if (f == 0) continue;
            for (int i = 0; i < n; ++i) rows[k][i] = ((rows[k][i] - f * r[i]) % kPrime + kPrime) % kPrime;
        }
        rows.push_back(r);
        pivots.push_back(p);
        return true;
    }
    int rank() const { return static_cast<int>(rows.size()); }
};

// All vectors of norm <= bound (both signs) with the data the search needs.
struct VecSpace {
    int n = 0;
    Mat64 G;
    Vec64 fw;  // f(v) = fw . v, the functional v -> v . 2rho
    int bound = 0;
    std::vector<Vec64> V;
    std::vector<int64_t> norm, fval;
    std::vector<uint64_t> sig;
    Mat64 VG;
    std::vector<int8_t> table;
    std::unordered_map<Vec64, int, VecHash> index;

    int64_t ip(int a, int b) const {
        if (!table.empty()) return table[static_cast<size_t>(a) * V.size() + b];
        int64_t s = 0;
        for (int k = 0; k < n; ++k) s += VG[a][k] * V[b][k];
        return s;
    }
    int64_t ip_vec(const Vec64& a, int b) const {
        int64_t s = 0;
        for (int k = 0; k < n; ++k) s += a[k] * VG[b][k];
        return s;
    }
    int find(const Vec64& v) const {
        auto it = index.find(v);
        return it == index.end() ? -1 : it->second;
    }
};

Vec64 functional(const Mat64& G, const Vec64& rho2) {
    const int n = static_cast<int>(G.size());
    Vec64 fw(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) fw[i] += G[i][j] * rho2[j];
    return fw;
}

VecSpace make_space(const GramLattice& L, const Vec64& rho2, int bound) {
    VecSpace S;
    S.n = L.rank();
    S.G = to_mat64(L.gram);
    S.fw = functional(S.G, rho2);
    S.bound = bound;
    ShortVectorSet sv = short_vectors(L, bound);
    for (size_t i = 0; i < sv.size(); ++i) {
        Vec64 neg = sv.vecs[i];
        for (auto& x : neg) x = -x;
        S.V.push_back(sv.vecs[i]);
        S.V.push_back(neg);
    }
    const size_t N = S.V.size();
    S.VG.assign(N, Vec64(S.n, 0));
    S.norm.resize(N);
    S.fval.resize(N);
    for (size_t a = 0; a < N; ++a) {
        for (int i = 0; i < S.n; ++i) {
            if (S.V[a][i] == 0) continue;
            for (int j = 0; j < S.n; ++j) S.VG[a][j] += S.V[a][i] * S.G[i][j];
        }
        int64_t nm = 0, f = 0;
        for (int j = 0; j < S.n; ++j) {
            nm += S.VG[a][j] * S.V[a][j];
            f += S.fw[j] * S.V[a][j];
        }
        S.norm[a] = nm;
        S.fval[a] = f;
        S.index.emplace(S.V[a], static_cast<int>(a));
    }
    if (N <= kTableLimit && bound <= 127) {
        S.table.resize(N * N);
        for (size_t a = 0; a < N; ++a)
            for (size_t b = a; b < N; ++b) {
                int64_t s = 0;
                for (int k = 0; k < S.n; ++k) s += S.VG[a][k] * S.V[b][k];
                S.table[a * N + b] = S.table[b * N + a] = static_cast<int8_t>(s);
            }
    }
    // Signatures: norm and f-value, refined twice by the multiset of (inner product, signature).
    S.sig.resize(N);
    for (size_t a = 0; a < N; ++a) S.sig[a] = mix(mix(static_cast<uint64_t>(S.norm[a])) ^ static_cast<uint64_t>(S.fval[a]));
    // Large spaces refine against the shortest norm layers only (at least one layer).
    std::map<int64_t, size_t> perNorm;
    for (auto nm : S.norm) perNorm[nm]++;
    int64_t refNorm = perNorm.empty() ? 0 : perNorm.begin()->first;
    size_t running = 0;
    for (auto& [nm, c] : perNorm) {
        running += c;
        if (running > kRefLimit && nm > refNorm) break;
        refNorm = nm;
    }
    std::vector<size_t> ref;
    for (size_t b = 0; b < N; ++b)
        if (S.norm[b] <= refNorm) ref.push_back(b);
    for (int round = 0; round < 2; ++round) {
        std::vector<uint64_t> next(N);
        for (size_t a = 0; a < N; ++a) {
            uint64_t acc = 0;
            for (size_t b : ref) acc += mix(S.sig[b] ^ mix(static_cast<uint64_t>(S.ip(a, b)) + 0x51ed27ULL));
            next[a] = mix(S.sig[a] ^ acc);
        }
        S.sig = std::move(next);
    }
    return S;
}

bool spans(const GramLattice& L, int bound) {
    const int n = L.rank();
    ShortVectorSet sv = short_vectors(L, bound);
    ModRank mr(n);
    for (auto& v : sv.vecs) {
        mr.add(v);
        if (mr.rank() == n) return true;
    }
    return false;
}

int spanning_bound(const GramLattice& L) {
    int b = 2;
    while (!spans(L, b)) ++b;
    return b;
}

// Backtracking over images of a fixed basis of src inside dst.
struct Search {
    const VecSpace& src;
    const VecSpace& dst;
    int n;
    std::vector<int> basis;  // indices into src.V
    Mat64 Gb;                // Gram of the basis
    std::vector<std::vector<int>> cand0;
    IntMat adj;  // B^{-1} = adj / D
    Int D;
    std::vector<std::vector<std::vector<int>>> ws;
    std::vector<int> img;
    // Profile of x: its signature and inner products with the first l fixed vectors.
    // profSum[l] sums mix(profile) over src with the basis prefix; dst must match.
    std::vector<uint64_t> profSum;
    std::vector<std::vector<uint64_t>> prof;  // dst profiles per level

    static uint64_t step(uint64_t h, int64_t ip) { return mix(h ^ (static_cast<uint64_t>(ip) + 0x2545f4914f6cdd1dULL)); }

    Search(const VecSpace& s, const VecSpace& d, std::vector<int> b) : src(s), dst(d), n(s.n), basis(std::move(b)) {
        Gb.assign(n, Vec64(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) Gb[i][j] = src.ip(basis[i], basis[j]);
        std::unordered_map<uint64_t, std::vector<int>> bySig;
        for (size_t w = 0; w < dst.V.size(); ++w) bySig[dst.sig[w]].push_back(static_cast<int>(w));
        cand0.resize(n);
        for (int i = 0; i < n; ++i) {
            int b = basis[i];
            auto it = bySig.find(src.sig[b]);
            if (it == bySig.end()) continue;
            for (int w : it->second)
                if (dst.norm[w] == src.norm[b] && dst.fval[w] == src.fval[b]) cand0[i].push_back(w);
        }
        IntMat B(n);
        for (int i = 0; i < n; ++i) B[i] = to_int_vec(src.V[basis[i]]);
        D = det(B);
        // adj via rational inverse
        std::vector<std::vector<Rat>> a(n, std::vector<Rat>(2 * n));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a[i][j] = B[i][j];
            a[i][n + i] = 1;
        }
        for (int c = 0; c < n; ++c) {
            int p = c;
            while (a[p][c] == 0) ++p;
            std::swap(a[p], a[c]);
            Rat iv = 1 / a[c][c];
            for (auto& x : a[c]) x *= iv;
            for (int r = 0; r < n; ++r) {
                if (r == c || a[r][c] == 0) continue;
                Rat f = a[r][c];
                for (int k = 0; k < 2 * n; ++k) a[r][k] -= f * a[c][k];
            }
        }
        adj.assign(n, IntVec(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Rat v = a[i][n + j] * D;
                adj[i][j] = v.get_num();
            }
        ws.assign(n + 1, std::vector<std::vector<int>>(n));
        img.assign(n, -1);
        const size_t N = src.V.size();
        profSum.assign(n + 1, 0);
        std::vector<uint64_t> h(src.sig.begin(), src.sig.end());
        for (size_t x = 0; x < N; ++x) profSum[0] += mix(h[x]);
        for (int l = 0; l < n; ++l)
            for (size_t x = 0; x < N; ++x) {
                h[x] = step(h[x], src.ip(static_cast<int>(x), basis[l]));
                profSum[l + 1] += mix(h[x]);
            }
        prof.assign(n + 1, std::vector<uint64_t>(dst.V.size()));
        prof[0] = dst.sig;
    }

    // Extends the dst profiles by image w at level lvl; false if the multiset differs from src.
    bool profile(int lvl, int w) {
        const size_t N = dst.V.size();
        uint64_t sum = 0;
        const auto& in = prof[lvl];
        auto& out = prof[lvl + 1];
        for (size_t x = 0; x < N; ++x) {
            out[x] = step(in[x], dst.ip(static_cast<int>(x), w));
            sum += mix(out[x]);
        }
        return sum == profSum[lvl + 1];
    }

    // g with (basis row i) g = image row i, in coordinates of src / dst.
    std::optional<IntMat> leaf_matrix() const {
        IntMat g(n, IntVec(n));
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) {
                Int s = 0;
                for (int i = 0; i < n; ++i)
                    if (sgn(adj[k][i]) != 0 && dst.V[img[i]][j] != 0) s += adj[k][i] * dst.V[img[i]][j];
                if (!mpz_divisible_p(s.get_mpz_t(), D.get_mpz_t())) return std::nullopt;
                mpz_divexact(g[k][j].get_mpz_t(), s.get_mpz_t(), D.get_mpz_t());
            }
        return g;
    }

    // Fills ws[lvl][j] for j >= lvl from cand0, honoring the fixed images img[0..lvl-1].
    bool seed_level(int lvl) {
        for (int k = 0; k < lvl; ++k)
            if (!profile(k, img[k])) return false;
        for (int j = lvl; j < n; ++j) {
            auto& out = ws[lvl][j];
            out.clear();
            for (int u : cand0[j]) {
                bool ok = true;
                for (int k = 0; k < lvl && ok; ++k) ok = dst.ip(u, img[k]) == Gb[j][k];
                if (ok) out.push_back(u);
            }
            if (out.empty()) return false;
        }
        return true;
    }

    // Tries candidate w at level lvl; on success ws[lvl+1] holds the filtered lists.
    bool place(int lvl, int w) {
        for (int j = lvl + 1; j < n; ++j) {
            auto& out = ws[lvl + 1][j];
            out.clear();
            const int64_t want = Gb[j][lvl];
            for (int u : ws[lvl][j])
                if (dst.ip(u, w) == want) out.push_back(u);
            if (out.empty()) return false;
        }
        if (!profile(lvl, w)) return false;
        img[lvl] = w;
        return true;
    }

    // Depth-first completion from level lvl; stops when visit returns true.
    bool dfs(int lvl, const std::function<bool(const IntMat&)>& visit) {
        if (lvl == n) {
            auto g = leaf_matrix();
            return g && visit(*g);
        }
        const std::vector<int> choices = ws[lvl][lvl];
        for (int w : choices) {
            if (!place(lvl, w)) continue;
            if (dfs(lvl + 1, visit)) return true;
        }
        return false;
    }

    // An element fixing images of levels < i (as already set in img) and sending level i to c.
    std::optional<IntMat> find_with_prefix(int i, int c) {
        if (!seed_level(i)) return std::nullopt;
        if (std::find(ws[i][i].begin(), ws[i][i].end(), c) == ws[i][i].end()) return std::nullopt;
        if (!place(i, c)) return std::nullopt;
        std::optional<IntMat> found;
        dfs(i + 1, [&](const IntMat& g) {
            found = g;
            return true;
        });
        return found;
    }
};

bool primitive_rows(const std::vector<Vec64>& rows) {
    IntMat m;
    for (auto& r : rows) m.push_back(to_int_vec(r));
    Smith s = smith_normal_form(m);
    for (size_t i = 0; i < rows.size(); ++i)
        if (abs(s.S[i][i]) != 1) return false;
    return true;
}

// Greedy basis: small signature classes first, then many nonzero inner products with earlier choices.
// Every prefix is kept primitive so the result is a Z-basis; then each Gram-preserving assignment of
// images is an isometry and no branch dies at the leaves. Empty if V holds no such basis.
std::optional<std::vector<int>> choose_basis(const VecSpace& S) {
    const int n = S.n;
    std::unordered_map<uint64_t, int> classSize;
    for (auto s : S.sig) classSize[s]++;
    ModRank mr(n);
    std::vector<int> basis;
    std::vector<Vec64> rows;
    std::vector<char> dead(S.V.size(), 0);
    while (static_cast<int>(basis.size()) < n) {
        std::vector<std::tuple<int, int, int64_t, int>> ranked;  // class size, -links, norm, index
        for (size_t v = 0; v < S.V.size(); ++v) {
            if (dead[v]) continue;
            if (!mr.independent(S.V[v])) {
                dead[v] = 1;
                continue;
            }
            int links = 0;
            for (int b : basis) links += S.ip(static_cast<int>(v), b) != 0;
            ranked.emplace_back(classSize[S.sig[v]], -links, S.norm[v], static_cast<int>(v));
        }
        std::sort(ranked.begin(), ranked.end());
        int best = -1;
        for (auto& t : ranked) {
            int v = std::get<3>(t);
            rows.push_back(S.V[v]);
            if (primitive_rows(rows)) {
                best = v;
                break;
            }
            rows.pop_back();
            dead[v] = 1;
        }
        if (best < 0) return std::nullopt;
        mr.add(S.V[best]);
        basis.push_back(best);
    }
    return basis;
}

// Smallest bound whose vectors contain a greedy Z-basis, with that basis.
std::pair<VecSpace, std::vector<int>> space_with_basis(const GramLattice& L, const Vec64& rho2) {
    for (int b = spanning_bound(L);; ++b) {
        VecSpace S = make_space(L, rho2, b);
        if (auto basis = choose_basis(S)) return {std::move(S), std::move(*basis)};
    }
}

std::vector<int> permutation(const VecSpace& S, const IntMat& g) {
    Mat64 g64 = to_mat64(g);
    std::vector<int> p(S.V.size());
    for (size_t a = 0; a < S.V.size(); ++a) {
        Vec64 w(S.n, 0);
        for (int i = 0; i < S.n; ++i) {
            if (S.V[a][i] == 0) continue;
            for (int j = 0; j < S.n; ++j) w[j] += S.V[a][i] * g64[i][j];
        }
        int k = S.find(w);
        if (k < 0) throw std::logic_error("autiso: vector set is not stable under an automorphism");
        p[a] = k;
    }
    return p;
}

std::vector<int> orbit_of(int start, const std::vector<const std::vector<int>*>& perms, size_t N) {
    std::vector<char> seen(N, 0);
    std::vector<int> orb{start};
    seen[start] = 1;
    for (size_t k = 0; k < orb.size(); ++k)
        for (auto* p : perms) {
            int w = (*p)[orb[k]];
            if (!seen[w]) {
                seen[w] = 1;
                orb.push_back(w);
            }
        }
    return orb;
}

struct Prepared {
    GramLattice red;
    IntMat T;  // red rows = T * input rows
    RootDatum roots;
    ShortVectorSet sv3;
};

Prepared prepare(const GramLattice& L, uint64_t seed) {
    Prepared P;
    LLLResult r = lll_reduce_with_transform(L);
    P.red = r.lattice;
    P.T = r.transform;
    P.sv3 = short_vectors(P.red, 3);
    std::vector<Vec64> rootPairs;
    for (size_t i = 0; i < P.sv3.size(); ++i)
        if (P.sv3.norms[i] == 2) rootPairs.push_back(P.sv3.vecs[i]);
    P.roots = identify(P.red, rootPairs, seed);
    return P;
}

Vec64 rho2_of(const Prepared& P) {
    return P.roots.rho2.empty() ? Vec64(P.red.rank(), 0) : P.roots.rho2;
}

}  // namespace

AutResult aut_order(const GramLattice& L, uint64_t seed) {
    AutResult out;
    const int n = L.rank();
    if (n == 0) {
        out.fullOrder = out.weylOrder = out.reducedOrder = 1;
        return out;
    }
    Prepared P = prepare(L, seed);
    out.rootClass = P.roots.cls;
    out.weylOrder = weyl_order(P.roots.cls);
    auto [S, basis] = space_with_basis(P.red, rho2_of(P));
    out.vectorBound = S.bound;
    out.vectorCount = S.V.size();
    Search search(S, S, basis);
    const size_t N = S.V.size();

    std::vector<std::vector<IntMat>> gensAt(n);
    std::vector<std::vector<std::vector<int>>> permsAt(n);
    Int order = 1;
    for (int i = n - 1; i >= 0; --i) {
        for (int k = 0; k < i; ++k) search.img[k] = search.basis[k];
        auto collect = [&]() {
            std::vector<const std::vector<int>*> ps;
            for (int l = i; l < n; ++l)
                for (auto& p : permsAt[l]) ps.push_back(&p);
            return ps;
        };
        std::vector<int> orb = orbit_of(search.basis[i], collect(), N);
        std::vector<char> inOrbit(N, 0), excluded(N, 0);
        for (int w : orb) inOrbit[w] = 1;
        if (!search.seed_level(i)) throw std::logic_error("autiso: identity not found");
        const std::vector<int> cands = search.ws[i][i];
        for (int c : cands) {
            if (inOrbit[c] || excluded[c]) continue;
            for (int k = 0; k < i; ++k) search.img[k] = search.basis[k];
            auto g = search.find_with_prefix(i, c);
            if (g) {
                gensAt[i].push_back(*g);
                permsAt[i].push_back(permutation(S, *g));
                orb = orbit_of(search.basis[i], collect(), N);
                for (int w : orb) inOrbit[w] = 1;
            } else {
                for (int w : orbit_of(c, collect(), N)) excluded[w] = 1;
            }
        }
        order *= static_cast<unsigned long>(orb.size());
    }
    out.reducedOrder = order;
    out.fullOrder = out.weylOrder * out.reducedOrder;
    IntMat Tinv = unimodular_inverse(P.T);
    for (auto& lvl : gensAt)
        for (auto& g : lvl) out.generators.push_back(mat_mul(mat_mul(Tinv, g), P.T));
    return out;
}

IsoResult is_isometric(const GramLattice& a, const GramLattice& b, uint64_t seed) {
    IsoResult out;
    const int n = a.rank();
    if (b.rank() != n) return out;
    if (n == 0) {
        out.isometric = true;
        out.witness = IntMat{};
        return out;
    }
    if (det(a) != det(b)) return out;
    Prepared A = prepare(a, seed), B = prepare(b, seed);
    if (A.sv3.counts != B.sv3.counts) return out;
    if (A.roots.cls != B.roots.cls) return out;
    auto [SA, basisA] = space_with_basis(A.red, rho2_of(A));
    VecSpace SB = make_space(B.red, rho2_of(B), SA.bound);
    if (SA.V.size() != SB.V.size()) return out;
    {
        std::vector<uint64_t> sa = SA.sig, sb = SB.sig;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) return out;
    }
    Search search(SA, SB, basisA);
    if (!search.seed_level(0)) return out;
    std::optional<IntMat> found;
    search.dfs(0, [&](const IntMat& g) {
        found = g;
        return true;
    });
    if (!found) return out;
    IntMat W = mat_mul(mat_mul(unimodular_inverse(A.T), *found), B.T);
    IntMat check = mat_mul(mat_mul(W, b.gram), transpose(W));
    if (check != a.gram) throw std::logic_error("is_isometric: witness fails verification");
    out.isometric = true;
    out.witness = W;
    return out;
}

}  // namespace unimod
