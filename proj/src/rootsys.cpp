#include "unimod/rootsys.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace unimod {

// ---------------------------------------------------------------- classes

void RootSystemClass::add(char type, int rank, int mult) {
    if (mult <= 0) return;
    if (type == 'D') {
        if (rank <= 1) return;
        if (rank == 2) {
            add('A', 1, 2 * mult);
            return;
        }
        if (rank == 3) {
            add('A', 3, mult);
            return;
        }
    } else if (type == 'A') {
        if (rank <= 0) return;
    } else if (type == 'E') {
        if (rank < 6 || rank > 8) throw std::invalid_argument("E rank must be 6, 7 or 8");
    } else {
        throw std::invalid_argument(std::string("unknown root system type ") + type);
    }
    comps_[{type, rank}] += mult;
}

void RootSystemClass::add(const RootSystemClass& other) {
    for (auto& [k, m] : other.comps_) comps_[k] += m;
}

int RootSystemClass::rank() const {
    int r = 0;
    for (auto& [k, m] : comps_) r += k.second * m;
    return r;
}

int RootSystemClass::num_components() const {
    int c = 0;
    for (auto& [k, m] : comps_) c += m;
    return c;
}

int64_t RootSystemClass::root_count() const {
    int64_t c = 0;
    for (auto& [k, m] : comps_) {
        int64_t r = k.second, each = 0;
        switch (k.first) {
            case 'A': each = r * (r + 1); break;
            case 'D': each = 2 * r * (r - 1); break;
            case 'E': each = r == 6 ? 72 : r == 7 ? 126 : 240; break;
        }
        c += each * m;
    }
    return c;
}

std::vector<std::pair<char, int>> RootSystemClass::expanded() const {
    std::vector<std::pair<char, int>> out;
    for (auto& [k, m] : comps_)
        for (int i = 0; i < m; ++i) out.push_back(k);
    return out;
}

std::string RootSystemClass::str() const {
    if (comps_.empty()) return "0";
    std::string s;
    for (auto& [k, m] : comps_) {
        if (!s.empty()) s += ' ';
        if (m > 1) s += std::to_string(m);
        s += k.first;
        s += std::to_string(k.second);
    }
    return s;
}

RootSystemClass RootSystemClass::parse(const std::string& s) {
    RootSystemClass c;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        if (tok == "0") continue;
        size_t i = 0;
        int mult = 0;
        while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) mult = mult * 10 + (tok[i++] - '0');
        if (i == 0) mult = 1;
        if (i >= tok.size()) throw std::invalid_argument("bad root system token: " + tok);
        char type = tok[i++];
        if (i >= tok.size()) throw std::invalid_argument("bad root system token: " + tok);
        int rank = std::stoi(tok.substr(i));
        c.add(type, rank, mult);
    }
    return c;
}

bool RootSystemClass::operator<(const RootSystemClass& o) const { return comps_ < o.comps_; }

RootSystemClass irreducible(char type, int rank) {
    RootSystemClass c;
    c.add(type, rank);
    return c;
}

RootSystemClass operator+(RootSystemClass a, const RootSystemClass& b) {
    a.add(b);
    return a;
}

// ---------------------------------------------------------------- Dynkin diagrams

namespace {

// Classifies a connected simply-laced Dynkin diagram given as adjacency lists.
std::pair<char, int> classify_connected(const std::vector<std::vector<int>>& adj) {
    const int k = static_cast<int>(adj.size());
    int edges = 0, branch = -1;
    for (int v = 0; v < k; ++v) {
        edges += static_cast<int>(adj[v].size());
        if (adj[v].size() >= 3) {
            if (branch >= 0 || adj[v].size() > 3) throw std::invalid_argument("not an ADE diagram");
            branch = v;
        }
    }
    edges /= 2;
    if (edges != k - 1) throw std::invalid_argument("not an ADE diagram (cycle)");
    if (branch < 0) return {'A', k};
    std::vector<int> arms;
    for (int nb : adj[branch]) {
        int len = 1, prev = branch, cur = nb;
        while (true) {
            int next = -1;
            for (int w : adj[cur])
                if (w != prev) next = w;
            if (next < 0) break;
            prev = cur;
            cur = next;
            ++len;
        }
        arms.push_back(len);
    }
    std::sort(arms.begin(), arms.end());
    if (arms[0] == 1 && arms[1] == 1) return {'D', k};
    if (arms[0] == 1 && arms[1] == 2) {
        if (arms[2] == 2) return {'E', 6};
        if (arms[2] == 3) return {'E', 7};
        if (arms[2] == 4) return {'E', 8};
    }
    throw std::invalid_argument("not an ADE diagram");
}

// Class of an arbitrary (possibly disconnected) diagram on vertices `alive`.
RootSystemClass classify_graph(const std::vector<std::vector<int>>& adj, const std::vector<bool>& alive) {
    const int k = static_cast<int>(adj.size());
    std::vector<int> comp(k, -1);
    RootSystemClass c;
    for (int s = 0; s < k; ++s) {
        if (!alive[s] || comp[s] >= 0) continue;
        std::vector<int> verts{s};
        comp[s] = s;
        for (size_t i = 0; i < verts.size(); ++i)
            for (int w : adj[verts[i]])
                if (alive[w] && comp[w] < 0) {
                    comp[w] = s;
                    verts.push_back(w);
                }
        std::vector<int> idx(k, -1);
        for (size_t i = 0; i < verts.size(); ++i) idx[verts[i]] = static_cast<int>(i);
        std::vector<std::vector<int>> sub(verts.size());
        for (size_t i = 0; i < verts.size(); ++i)
            for (int w : adj[verts[i]])
                if (alive[w]) sub[i].push_back(idx[w]);
        auto [t, r] = classify_connected(sub);
        c.add(t, r);
    }
    return c;
}

std::vector<int64_t> first_primes(int n) {
    std::vector<int64_t> p;
    for (int64_t c = 2; static_cast<int>(p.size()) < n; ++c) {
        bool ok = true;
        for (auto q : p) {
            if (q * q > c) break;
            if (c % q == 0) {
                ok = false;
                break;
            }
        }
        if (ok) p.push_back(c);
    }
    return p;
}

}  // namespace

RootDatum identify(const GramLattice& L, const std::vector<Vec64>& rootPairs, uint64_t seed) {
    RootDatum rd;
    const int n = L.rank();
    const int N = static_cast<int>(rootPairs.size());
    rd.rho2.assign(n, 0);
    if (N == 0) return rd;
    Mat64 g = to_mat64(L.gram);
    auto gv = [&](const Vec64& v) {
        Vec64 w(n, 0);
        for (int i = 0; i < n; ++i) {
            if (v[i] == 0) continue;
            for (int j = 0; j < n; ++j) w[j] += v[i] * g[i][j];
        }
        return w;
    };
    auto dot64 = [](const Vec64& a, const Vec64& b) {
        int64_t s = 0;
        for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };
    for (auto& r : rootPairs)
        if (dot64(gv(r), r) != 2) throw std::invalid_argument("identify: vector of norm != 2");

    // Generic linear form; perturb until no root lies in its kernel.
    std::vector<int64_t> phi = first_primes(n);
    std::mt19937_64 rng(seed ? seed : 0x5eed5eedULL);
    std::vector<Vec64> pos(rootPairs);
    while (true) {
        bool ok = true;
        for (auto& r : pos) {
            __int128 s = 0;
            for (int i = 0; i < n; ++i) s += static_cast<__int128>(phi[i]) * r[i];
            if (s == 0) {
                ok = false;
                break;
            }
            if (s < 0)
                for (auto& e : r) e = -e;
        }
        if (ok) break;
        for (auto& p : phi) p = p * static_cast<int64_t>(2 * (rng() % 50) + 1) + static_cast<int64_t>(rng() % 7);
    }
    for (auto& r : pos)
        for (int i = 0; i < n; ++i) rd.rho2[i] += r[i];
    rd.roots = pos;
    Vec64 grho = gv(rd.rho2);
    for (int i = 0; i < N; ++i)
        if (dot64(grho, pos[i]) == 2) rd.simple.push_back(i);

    // Irreducible components: connectivity under non-orthogonality.
    std::vector<Vec64> gr(N);
    for (int i = 0; i < N; ++i) gr[i] = gv(pos[i]);
    std::vector<int> parent(N);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j)
            if (dot64(gr[i], pos[j]) != 0) parent[find(i)] = find(j);
    std::map<int, int> compId;
    rd.componentOf.assign(N, -1);
    for (int i = 0; i < N; ++i) {
        int r = find(i);
        auto it = compId.find(r);
        if (it == compId.end()) it = compId.emplace(r, static_cast<int>(compId.size())).first;
        rd.componentOf[i] = it->second;
    }
    const int K = static_cast<int>(compId.size());
    std::vector<std::vector<int>> simpleOf(K);
    std::vector<int64_t> rootsOf(K, 0);
    for (int s : rd.simple) simpleOf[rd.componentOf[s]].push_back(s);
    for (int i = 0; i < N; ++i) rootsOf[rd.componentOf[i]] += 2;
    rd.componentClass.resize(K);
    for (int c = 0; c < K; ++c) {
        const auto& sv = simpleOf[c];
        const int k = static_cast<int>(sv.size());
        std::vector<std::vector<int>> adj(k);
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b) {
                int64_t p = dot64(gr[sv[a]], pos[sv[b]]);
                if (p == -1) {
                    adj[a].push_back(b);
                    adj[b].push_back(a);
                } else if (p != 0) {
                    throw std::invalid_argument("identify: input is not a root system");
                }
            }
        if (k == 0) throw std::invalid_argument("identify: input is not a root system");
        auto [t, r] = classify_connected(adj);
        RootSystemClass cc = irreducible(t, r);
        if (cc.num_components() != 1 || cc.root_count() != rootsOf[c])
            throw std::invalid_argument("identify: input is not a root system");
        rd.componentClass[c] = cc;
        rd.cls.add(cc);
    }
    return rd;
}

Int weyl_order(const RootSystemClass& c) {
    Int w = 1;
    for (auto [t, r] : c.expanded()) {
        Int f;
        mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(t == 'A' ? r + 1 : r));
        switch (t) {
            case 'A': w *= f; break;
            case 'D': {
                Int p;
                mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(r - 1));
                w *= p * f;
                break;
            }
            case 'E':
                w *= r == 6 ? Int(51840) : r == 7 ? Int(2903040) : Int(696729600);
                break;
        }
    }
    return w;
}

// ---------------------------------------------------------------- visible root systems

VisibleShape visible_shape(const Vec64& x, int64_t d) {
    VisibleShape s;
    std::map<int64_t, int> classes;
    for (auto xi : x) {
        int64_t r = ((xi % d) + d) % d;
        if (r == 0) {
            ++s.mPrime;
        } else if (d % 2 == 0 && r == d / 2) {
            ++s.m;
        } else {
            ++classes[std::min(r, d - r)];
        }
    }
    for (auto& [k, v] : classes) s.partition.push_back(v);
    std::sort(s.partition.rbegin(), s.partition.rend());
    return s;
}

RootSystemClass class_of_shape(const VisibleShape& s) {
    RootSystemClass c;
    c.add('D', s.m);
    c.add('D', s.mPrime);
    for (int a : s.partition) c.add('A', a - 1);
    return c;
}

RootSystemClass visible_root_system(const Vec64& x, int64_t d) { return class_of_shape(visible_shape(x, d)); }

// ---------------------------------------------------------------- d-kernels

namespace {

struct Affine {
    std::vector<std::vector<int>> adj;
    std::vector<int> marks;
};

Affine affine_diagram(char t, int r) {
    Affine a;
    auto link = [&](int u, int v) {
        a.adj[u].push_back(v);
        a.adj[v].push_back(u);
    };
    if (t == 'D') {
        // 0..r, Bourbaki: chain 1..r-2, r-1 and r on r-2, 0 on 2.
        a.adj.assign(r + 1, {});
        a.marks.assign(r + 1, 2);
        a.marks[0] = a.marks[1] = a.marks[r - 1] = a.marks[r] = 1;
        for (int i = 1; i + 1 <= r - 2; ++i) link(i, i + 1);
        link(r - 2, r - 1);
        link(r - 2, r);
        link(0, 2);
    } else if (t == 'E') {
        a.adj.assign(r + 1, {});
        link(1, 3);
        link(2, 4);
        for (int i = 3; i < r; ++i) link(i, i + 1);
        if (r == 6) {
            link(0, 2);
            a.marks = {1, 1, 2, 2, 3, 2, 1};
        } else if (r == 7) {
            link(0, 1);
            a.marks = {1, 2, 2, 3, 4, 3, 2, 1};
        } else {
            link(0, 8);
            a.marks = {1, 2, 3, 4, 6, 5, 4, 3, 2};
        }
    } else {
        throw std::invalid_argument("affine_diagram: A is handled separately");
    }
    return a;
}

// Positive x_j with sum x_j h_j = d and gcd(d, x) = 1?
bool kac_solvable(const std::vector<int>& marks, int64_t d) {
    std::set<std::pair<int64_t, int64_t>> states{{0, d}};
    for (int h : marks) {
        std::set<std::pair<int64_t, int64_t>> next;
        for (auto [s, g] : states)
            for (int64_t x = 1; s + x * h <= d; ++x) next.insert({s + x * h, std::gcd(g, x)});
        states.swap(next);
        if (states.empty()) return false;
    }
    return states.count({d, 1}) > 0;
}

void partitions(int n, int maxPart, std::vector<int>& cur, const std::function<void(const std::vector<int>&)>& f) {
    if (n == 0) {
        f(cur);
        return;
    }
    for (int p = std::min(n, maxPart); p >= 1; --p) {
        cur.push_back(p);
        partitions(n - p, p, cur, f);
        cur.pop_back();
    }
}

std::set<RootSystemClass> irreducible_kernels(char t, int r, int64_t d) {
    std::set<RootSystemClass> out;
    if (d == 1) {
        out.insert(irreducible(t, r));
        return out;
    }
    if (t == 'A') {
        std::vector<int> cur;
        partitions(r + 1, r + 1, cur, [&](const std::vector<int>& p) {
            int64_t s = static_cast<int64_t>(p.size());
            if (s < 2 || s > d) return;
            RootSystemClass c;
            for (int a : p) c.add('A', a - 1);
            out.insert(c);
        });
        return out;
    }
    Affine a = affine_diagram(t, r);
    const int V = static_cast<int>(a.marks.size());
    std::vector<bool> inJ(V, false);
    std::vector<int> jm;
    std::function<void(int, int64_t)> rec = [&](int v, int64_t sum) {
        if (v == V) {
            if (jm.empty() || !kac_solvable(jm, d)) return;
            std::vector<bool> alive(V);
            for (int i = 0; i < V; ++i) alive[i] = !inJ[i];
            out.insert(classify_graph(a.adj, alive));
            return;
        }
        rec(v + 1, sum);
        if (sum + a.marks[v] <= d) {
            inJ[v] = true;
            jm.push_back(a.marks[v]);
            rec(v + 1, sum + a.marks[v]);
            jm.pop_back();
            inJ[v] = false;
        }
    };
    rec(0, 0);
    return out;
}

}  // namespace

std::set<RootSystemClass> d_kernels(const RootSystemClass& c, int64_t d) {
    if (d < 1) throw std::invalid_argument("d_kernels: d must be positive");
    std::vector<int64_t> divs;
    for (int64_t e = 1; e <= d; ++e)
        if (d % e == 0) divs.push_back(e);
    std::map<std::tuple<char, int, int64_t>, std::set<RootSystemClass>> memo;
    std::map<int64_t, std::set<RootSystemClass>> state{{1, {RootSystemClass{}}}};
    for (auto [t, r] : c.expanded()) {
        std::map<int64_t, std::set<RootSystemClass>> next;
        for (auto& [l, classes] : state)
            for (int64_t e : divs) {
                auto key = std::make_tuple(t, r, e);
                auto it = memo.find(key);
                if (it == memo.end()) it = memo.emplace(key, irreducible_kernels(t, r, e)).first;
                if (it->second.empty()) continue;
                int64_t nl = std::lcm(l, e);
                auto& dst = next[nl];
                for (auto& base : classes)
                    for (auto& k : it->second) dst.insert(base + k);
            }
        state.swap(next);
    }
    auto it = state.find(d);
    return it == state.end() ? std::set<RootSystemClass>{} : it->second;
}

// ---------------------------------------------------------------- residues

int residue_order(char type, int rank) {
    switch (type) {
        case 'A': return rank + 1;
        case 'D': return 4;
        case 'E': return rank == 6 ? 3 : rank == 7 ? 2 : 1;
    }
    throw std::invalid_argument("residue_order: bad type");
}

Rat venkov_qm(const RootSystemClass& c, const std::vector<int>& element) {
    auto comps = c.expanded();
    if (element.size() != comps.size()) throw std::invalid_argument("venkov_qm: element has wrong length");
    Rat q = 0;
    for (size_t k = 0; k < comps.size(); ++k) {
        auto [t, r] = comps[k];
        int i = element[k];
        if (i < 0 || i >= residue_order(t, r)) throw std::invalid_argument("venkov_qm: invalid residue index");
        if (i == 0) continue;
        switch (t) {
            case 'A': q += make_rat(i * (r + 1 - i), 2 * (r + 1)); break;
            case 'D': q += (i == 2) ? make_rat(1, 2) : make_rat(r, 8); break;
            case 'E': q += (r == 6) ? make_rat(2, 3) : make_rat(3, 4); break;
        }
    }
    q.canonicalize();
    return q;
}

bool is_detecting(const RootSystemClass& c) {
    auto comps = c.expanded();
    std::vector<int> ord;
    int64_t total = 1;
    for (auto [t, r] : comps) {
        ord.push_back(residue_order(t, r));
        total *= ord.back();
        if (total > 1000000) throw std::invalid_argument("is_detecting: residue group too large");
    }
    std::vector<int> e(comps.size(), 0);
    for (int64_t it = 0; it < total; ++it) {
        int64_t rem = it;
        for (size_t k = 0; k < comps.size(); ++k) {
            e[k] = static_cast<int>(rem % ord[k]);
            rem /= ord[k];
        }
        Rat q = venkov_qm(c, e);
        Rat twice = 2 * q;
        if (twice.get_den() == 1 && q > 1) return false;
    }
    return true;
}

bool safe_witness(const RootSystemClass& R, const RootSystemClass& S) {
    for (auto& [k, m] : S.components()) {
        auto it = R.components().find(k);
        if (it == R.components().end() || it->second < m)
            throw std::invalid_argument("safe_witness: S is not a union of components of R");
    }
    return is_detecting(S);
}

GramLattice root_lattice(const RootSystemClass& c) {
    GramLattice L;
    for (auto [t, r] : c.expanded()) L = direct_sum(L, standard_lattice(t, r));
    return L;
}

}  // namespace unimod
