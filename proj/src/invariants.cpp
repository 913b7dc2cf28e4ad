#include "unimod/invariants.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace unimod {

namespace {

int64_t dot_g(const Mat64& g, const Vec64& a, const Vec64& b) {
    int64_t s = 0;
    const size_t n = a.size();
    for (size_t i = 0; i < n; ++i) {
        if (a[i] == 0) continue;
        int64_t row = 0;
        for (size_t j = 0; j < n; ++j) row += g[i][j] * b[j];
        s += a[i] * row;
    }
    return s;
}

void sort_delta(Delta& d) {
    std::sort(d.begin(), d.end(), [](const DeltaTerm& a, const DeltaTerm& b) {
        std::string sa = a.cls.str(), sb = b.cls.str();
        if (sa != sb) return sa < sb;
        if (a.m != b.m) return a.m < b.m;
        return a.rank < b.rank;
    });
}

// Calls f(mask) for every mask with exactly s of the k low bits set.
void for_subsets(int k, int s, const std::function<void(uint64_t)>& f) {
    std::function<void(int, int, uint64_t)> rec = [&](int start, int depth, uint64_t mask) {
        if (depth == s) {
            f(mask);
            return;
        }
        for (int i = start; i <= k - (s - depth); ++i) rec(i + 1, depth + 1, mask | (uint64_t(1) << i));
    };
    if (s > k) return;
    rec(0, 0, 0);
}

RootSystemClass class_of_mask(const RootDatum& R, uint64_t mask) {
    RootSystemClass c;
    for (size_t i = 0; i < R.componentClass.size(); ++i)
        if ((mask >> i) & 1) c.add(R.componentClass[i]);
    return c;
}

}  // namespace

Analysis analyze(const GramLattice& L, uint64_t seed) {
    Analysis A;
    A.lattice = lll_reduce(L);
    A.sv = short_vectors(A.lattice, 3);
    std::vector<Vec64> rootPairs;
    for (size_t i = 0; i < A.sv.size(); ++i)
        if (A.sv.norms[i] == 2) rootPairs.push_back(A.sv.vecs[i]);
    A.roots = identify(A.lattice, rootPairs, seed);
    const size_t k = A.roots.componentClass.size();
    if (k > 64) throw std::invalid_argument("analyze: more than 64 root components");
    Mat64 g = A.lattice.rank() ? to_mat64(A.lattice.gram) : Mat64{};
    // Orthogonality to a component is tested against its simple roots.
    std::vector<std::pair<Vec64, int>> simple;
    for (int s : A.roots.simple) simple.emplace_back(A.roots.roots[s], A.roots.componentOf[s]);
    A.compMask.assign(A.sv.size(), 0);
    for (size_t i = 0; i < A.sv.size(); ++i) {
        uint64_t m = 0;
        for (auto& [r, c] : simple)
            if (!((m >> c) & 1) && dot_g(g, A.sv.vecs[i], r) != 0) m |= uint64_t(1) << c;
        A.compMask[i] = m;
    }
    return A;
}

Delta delta_s(const Analysis& A, int s) {
    if (s < 0) throw std::invalid_argument("delta_s: s must be nonnegative");
    // m counts every nonzero vector of norm <= 3 in C^perp, which is what the published tables list.
    std::map<uint64_t, int64_t> byMask;  // mask -> number of pairs
    for (size_t i = 0; i < A.sv.size(); ++i) byMask[A.compMask[i]]++;
    std::vector<std::pair<uint64_t, int64_t>> masks(byMask.begin(), byMask.end());
    Delta out;
    const int k = static_cast<int>(A.roots.componentClass.size());
    for_subsets(k, s, [&](uint64_t S) {
        int64_t m = 0;
        for (auto& [mask, c] : masks)
            if ((mask & S) == 0) m += 2 * c;
        out.push_back(DeltaTerm{class_of_mask(A.roots, S), m, -1});
    });
    sort_delta(out);
    return out;
}

Delta delta_s(const GramLattice& L, int s) { return delta_s(analyze(L), s); }

int64_t graph_rank_mod_p(const std::vector<Vec64>& vecs, const Mat64& gram, int p) {
    if (p < 2) throw std::invalid_argument("graph_rank_mod_p: p must be prime");
    const size_t N = vecs.size();
    if (N == 0) return 0;
    const size_t n = gram.size();
    std::vector<Vec64> vg(N, Vec64(n, 0));
    for (size_t a = 0; a < N; ++a)
        for (size_t i = 0; i < n; ++i) {
            if (vecs[a][i] == 0) continue;
            for (size_t j = 0; j < n; ++j) vg[a][j] += vecs[a][i] * gram[i][j];
        }
    std::vector<std::vector<uint8_t>> m(N, std::vector<uint8_t>(N));
    for (size_t a = 0; a < N; ++a)
        for (size_t b = a; b < N; ++b) {
            int64_t v = 0;
            for (size_t j = 0; j < n; ++j) v += vg[a][j] * vecs[b][j];
            m[a][b] = m[b][a] = static_cast<uint8_t>(std::llabs(v) % p);
        }
    std::vector<uint8_t> inv(p, 0);
    for (int a = 1; a < p; ++a)
        for (int b = 1; b < p; ++b)
            if ((a * b) % p == 1) inv[a] = static_cast<uint8_t>(b);
    int64_t rank = 0;
    for (size_t c = 0; c < N && rank < static_cast<int64_t>(N); ++c) {
        size_t piv = rank;
        while (piv < N && m[piv][c] == 0) ++piv;
        if (piv == N) continue;
        std::swap(m[piv], m[rank]);
        auto& prow = m[rank];
        const int iv = inv[prow[c]];
        for (size_t j = c; j < N; ++j) prow[j] = static_cast<uint8_t>((prow[j] * iv) % p);
        for (size_t r = rank + 1; r < N; ++r) {
            const int f = m[r][c];
            if (f == 0) continue;
            auto& row = m[r];
            const int nf = p - f;
            for (size_t j = c; j < N; ++j) row[j] = static_cast<uint8_t>((row[j] + nf * prow[j]) % p);
        }
        ++rank;
    }
    return rank;
}

int64_t graph_rank_mod_p(const GramLattice& L, int p) {
    if (L.rank() == 0) return 0;
    GramLattice R = lll_reduce(L);
    ShortVectorSet sv = short_vectors(R, 3);
    return graph_rank_mod_p(sv.vecs, to_mat64(R.gram), p);
}

Delta delta_sp(const Analysis& A, int s, int p) {
    Mat64 g = A.lattice.rank() ? to_mat64(A.lattice.gram) : Mat64{};
    Delta out;
    const int k = static_cast<int>(A.roots.componentClass.size());
    for_subsets(k, s, [&](uint64_t S) {
        std::vector<Vec64> verts;
        int64_t m = 0;
        for (size_t i = 0; i < A.sv.size(); ++i) {
            if (A.compMask[i] & S) continue;
            verts.push_back(A.sv.vecs[i]);
            m += 2;
        }
        out.push_back(DeltaTerm{class_of_mask(A.roots, S), m, graph_rank_mod_p(verts, g, p)});
    });
    sort_delta(out);
    return out;
}

std::string format_delta(const Delta& d) {
    std::ostringstream os;
    size_t i = 0;
    bool first = true;
    while (i < d.size()) {
        size_t j = i;
        while (j < d.size() && d[j] == d[i]) ++j;
        if (!first) os << "+";
        first = false;
        if (j - i > 1) os << (j - i);
        os << "(" << d[i].cls.str() << "," << d[i].m;
        if (d[i].rank >= 0) os << "," << d[i].rank;
        os << ")";
        i = j;
    }
    return os.str();
}

ExcSet exc_set(const GramLattice& L) {
    ExcSet out;
    const int n = L.rank();
    out.norm = n % 8;
    if (n == 0) {
        out.size = 1;
        out.reps.push_back({});
        return out;
    }
    CharacteristicCoset xi = characteristic_rep(L);
    std::vector<Rat> t(n);
    for (int i = 0; i < n; ++i) t[i] = make_rat(xi.xi[i], 2);
    Rat target = make_rat(out.norm, 4);
    CosetVectors cv = coset_vectors(L, t, target);
    for (auto& y : cv.vecs) {
        Rat nm = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) nm += y[i] * L.gram[i][j] * y[j];
        if (nm != target) continue;
        IntVec e(n);
        for (int i = 0; i < n; ++i) {
            Rat v = 2 * y[i];
            if (v.get_den() != 1) throw std::logic_error("exc_set: non-integral characteristic vector");
            e[i] = v.get_num();
        }
        out.reps.push_back(std::move(e));
    }
    out.size = static_cast<int64_t>(out.reps.size());
    return out;
}

Rat r3_predicted(int n, int64_t r2, int64_t excSize) {
    Rat a = make_rat(4, 3) * n * (static_cast<long>(n) * n - 69L * n + 1208);
    Int pw;
    if (36 - n < 0) throw std::invalid_argument("r3_predicted: n > 36");
    mpz_ui_pow_ui(pw.get_mpz_t(), 2, static_cast<unsigned long>(36 - n));
    return a + Rat(2L * (n - 24) * r2) - Rat(pw * excSize);
}

bool r3_consistency(const GramLattice& L) {
    const int n = L.rank();
    if (n < 24 || n > 28) throw std::invalid_argument("r3_consistency: rank must be in [24, 28]");
    GramLattice R = lll_reduce(L);
    ShortVectorSet sv = short_vectors(R, 3);
    if (sv.counts[1] != 0) throw std::invalid_argument("r3_consistency: lattice has norm 1 vectors");
    ExcSet e = exc_set(R);
    return Rat(sv.counts[3]) == r3_predicted(n, sv.counts[2], e.size);
}

// ---------------------------------------------------------------- fingerprint

bool needs_deep_delta(const RootSystemClass& c) {
    static const char* list[] = {"3A1",     "6A1",     "7A1",     "3A1 A2",  "5A1 A2",
                                 "7A1 A2", "4A1 2A2", "6A1 2A2", "8A1 2A2", "5A1 3A2"};
    std::string s = c.str();
    for (auto* l : list)
        if (s == l) return true;
    return false;
}

nlohmann::json InvariantFingerprint::to_json() const {
    nlohmann::json j;
    j["depth"] = layerDepth;
    j["root"] = rootClass.str();
    j["r1"] = r1;
    j["r2"] = r2;
    j["r3"] = r3;
    if (layerDepth >= 2) {
        j["delta1"] = format_delta(delta1);
        j["delta2"] = format_delta(delta2);
        j["exc"] = excSize;
    }
    if (layerDepth >= 3) {
        nlohmann::json sp = nlohmann::json::object();
        for (auto& [k, v] : deltaSP) sp[k] = format_delta(v);
        j["deltaSP"] = sp;
    }
    return j;
}

std::string InvariantFingerprint::canonical() const { return to_json().dump(); }

uint64_t InvariantFingerprint::hash() const {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

InvariantFingerprint fingerprint(const Analysis& A, int depth) {
    if (depth < 1 || depth > 3) throw std::invalid_argument("fingerprint: depth must be 1, 2 or 3");
    InvariantFingerprint f;
    f.layerDepth = depth;
    f.rootClass = A.roots.cls;
    f.r1 = A.sv.counts.size() > 1 ? A.sv.counts[1] : 0;
    f.r2 = A.sv.counts.size() > 2 ? A.sv.counts[2] : 0;
    f.r3 = A.sv.counts.size() > 3 ? A.sv.counts[3] : 0;
    if (depth >= 2) {
        f.delta1 = delta_s(A, 1);
        f.delta2 = delta_s(A, 2);
        f.excSize = exc_set(A.lattice).size;
    }
    if (depth >= 3) {
        bool deep = needs_deep_delta(A.roots.cls);
        std::vector<int> primes = deep ? std::vector<int>{5, 7} : std::vector<int>{5};
        int smax = deep ? 7 : 3;
        for (int p : primes)
            for (int s = 0; s <= smax; ++s)
                f.deltaSP[std::to_string(s) + "," + std::to_string(p)] = delta_sp(A, s, p);
    }
    return f;
}

InvariantFingerprint fingerprint(const GramLattice& L, int depth) { return fingerprint(analyze(L), depth); }

}  // namespace unimod
