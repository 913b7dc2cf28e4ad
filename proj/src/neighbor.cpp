#include "unimod/neighbor.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace unimod {

namespace {

int64_t mod(int64_t a, int64_t m) {
    int64_t r = a % m;
    return r < 0 ? r + m : r;
}

__int128 sum_squares(const Vec64& x) {
    __int128 s = 0;
    for (auto v : x) s += static_cast<__int128>(v) * v;
    return s;
}

// Returns (g, s, t) with g = s a + t b.
std::tuple<int64_t, int64_t, int64_t> ext_gcd(int64_t a, int64_t b) {
    int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        int64_t q = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
        std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
    }
    if (old_r < 0) return {-old_r, -old_s, -old_t};
    return {old_r, old_s, old_t};
}

int64_t inv_mod(int64_t a, int64_t m) {
    auto [g, s, t] = ext_gcd(mod(a, m), m);
    (void)t;
    if (g != 1) throw std::invalid_argument("inv_mod: not invertible");
    return mod(s, m);
}

int64_t crt(int64_t a, int64_t m, int64_t b, int64_t n) {
    // x = a mod m, x = b mod n, gcd(m,n) = 1
    __int128 mn = static_cast<__int128>(m) * n;
    __int128 x = a + static_cast<__int128>(m) * mod(static_cast<int64_t>((static_cast<__int128>(mod(b - a, n)) * inv_mod(m, n)) % n), n);
    x %= mn;
    if (x < 0) x += mn;
    return static_cast<int64_t>(x);
}

int64_t gcd_all(const Vec64& x, int64_t d) {
    int64_t g = d;
    for (auto v : x) g = std::gcd(g, std::abs(v));
    return g;
}

GramLattice identity_embedded(int n) {
    GramLattice L = standard_lattice('I', n);
    L.embedding = Embedding{Int(1), identity_matrix(n)};
    return L;
}

}  // namespace

void NeighborForm::validate() const {
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("neighbor form: x has wrong length");
    if (d < 1) throw std::invalid_argument("neighbor form: d must be positive");
    if (eps != 0 && eps != 1) throw std::invalid_argument("neighbor form: eps must be 0 or 1");
    if (d % 2 == 1 && eps != 0) throw std::invalid_argument("neighbor form: eps must be 0 for odd d");
    if (gcd_all(x, d) != 1) throw std::invalid_argument("neighbor form: x is not d-primitive");
    const int64_t e = d % 2 == 0 ? 2 : 1;
    if (sum_squares(x) % (e * d) != 0) throw std::invalid_argument("neighbor form: x is not d-isotropic");
}

bool NeighborForm::valid() const {
    try {
        validate();
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

nlohmann::json NeighborForm::to_json() const {
    return nlohmann::json{{"n", n}, {"d", d}, {"x", x}, {"eps", eps}};
}

NeighborForm NeighborForm::from_json(const nlohmann::json& j) {
    NeighborForm f;
    f.d = j.at("d").get<int64_t>();
    f.x = j.at("x").get<Vec64>();
    f.n = j.contains("n") ? j.at("n").get<int>() : static_cast<int>(f.x.size());
    f.eps = j.contains("eps") ? j.at("eps").get<int>() : 0;
    f.validate();
    return f;
}

std::string NeighborForm::str() const {
    std::ostringstream os;
    os << "N_" << d << "(";
    for (size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ")";
    if (d % 2 == 0) os << (eps ? "+" : "-");
    return os.str();
}

Vec64 choose_y(const Vec64& x, int64_t d) {
    const size_t n = x.size();
    Vec64 y(n, 0);
    if (d == 1) return y;
    for (size_t i = 0; i < n; ++i) {
        if (std::gcd(mod(x[i], d), d) == 1) {
            y[i] = inv_mod(x[i], d);
            return y;
        }
    }
    // g = c_d * d + sum c_i x_i, folded coordinate by coordinate.
    int64_t g = d;
    Vec64 c(n, 0);
    for (size_t i = 0; i < n && g != 1; ++i) {
        int64_t xi = mod(x[i], d);
        if (xi == 0) continue;
        auto [ng, s, t] = ext_gcd(g, xi);
        if (ng == g) continue;
        for (size_t j = 0; j < i; ++j) c[j] = mod(static_cast<int64_t>((static_cast<__int128>(c[j]) * mod(s, d)) % d), d);
        c[i] = mod(t, d);
        g = ng;
    }
    if (g != 1) throw std::invalid_argument("choose_y: x is not d-primitive");
    return c;
}

GramLattice m_lattice(const NeighborForm& f) {
    f.validate();
    if (f.d == 1) return identity_embedded(f.n);
    IntMat k = congruence_kernel(to_int_vec(f.x), Int(static_cast<long>(f.d)));
    GramLattice L = sublattice(identity_embedded(f.n), k);
    return L;
}

GramLattice build_with_y(const NeighborForm& f, const Vec64& y) {
    f.validate();
    const int n = f.n;
    if (f.d == 1) return identity_embedded(n);
    const Int d(static_cast<long>(f.d));
    IntVec x = to_int_vec(f.x);
    Int xx = dot(x, x);
    Int k = xx / d;
    Int r;
    if (f.d % 2 == 1) {
        r = -((d + 1) / 2) * k;
    } else {
        r = -(k / 2) + f.eps * (d / 2);
    }
    IntVec yt = to_int_vec(y);
    if (dot(x, yt) % d != 1 && (dot(x, yt) % d + d) % d != 1) throw std::invalid_argument("build: x.y != 1 mod d");
    IntVec xt(n);
    for (int i = 0; i < n; ++i) xt[i] = x[i] + r * d * yt[i];
    IntMat gens = congruence_kernel(x, d);
    for (auto& row : gens)
        for (auto& e : row) e *= d;
    gens.push_back(xt);
    IntMat B = hnf_rows(gens);
    if (static_cast<int>(B.size()) != n) throw std::logic_error("build: rank defect");
    GramLattice N;
    N.gram.assign(n, IntVec(n));
    Int d2 = d * d;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            Int v = dot(B[i], B[j]);
            if (!mpz_divisible_p(v.get_mpz_t(), d2.get_mpz_t())) throw std::logic_error("build: gram not integral");
            N.gram[i][j] = N.gram[j][i] = v / d2;
        }
    N.embedding = Embedding{d, B};
    N = lll_reduce(N);
    if (!is_unimodular(N)) throw std::logic_error("build: lattice is not unimodular");
    return N;
}

GramLattice build(const NeighborForm& f) { return build_with_y(f, choose_y(f.x, f.d)); }

bool is_even_neighbor(const NeighborForm& f) {
    f.validate();
    if (f.d % 2 == 1) return is_even(build(f));
    for (auto v : f.x)
        if (mod(v, 2) == 0) return false;
    __int128 s = sum_squares(f.x) - static_cast<__int128>(f.d) * (2 + f.d) * f.eps;
    __int128 m = static_cast<__int128>(4) * f.d;
    return s % m == 0;
}

NeighborForm canonical_line(const Vec64& x, int64_t d, int eps) {
    NeighborForm f;
    f.n = static_cast<int>(x.size());
    f.d = d;
    int e = eps & 1;
    f.x.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        int64_t r = mod(x[i], d);
        int64_t q = (x[i] - r) / d;  // x_i = q d + r
        e ^= static_cast<int>(mod(q, 2));
        if (2 * r > d) {
            r = d - r;  // r - d, then negate
            e ^= 1;
        }
        f.x[i] = r;
    }
    std::sort(f.x.begin(), f.x.end());
    f.eps = d % 2 == 0 ? e : 0;
    return f;
}

// ---------------------------------------------------------------- patterns

int IsotropicLinePattern::total() const {
    return std::accumulate(parts.begin(), parts.end(), 0) + halfD + free;
}

RootSystemClass IsotropicLinePattern::root_class() const {
    RootSystemClass c;
    for (int p : parts) c.add('A', p - 1);
    c.add('D', halfD);
    return c;
}

IsotropicLinePattern IsotropicLinePattern::unconstrained(int n) {
    IsotropicLinePattern p;
    p.free = n;
    return p;
}

IsotropicLinePattern IsotropicLinePattern::parse(const std::string& s, int n) {
    IsotropicLinePattern p;
    if (s.empty() || s == "free") return unconstrained(n);
    std::stringstream ss(s);
    std::string term;
    while (std::getline(ss, term, '+')) {
        term.erase(std::remove_if(term.begin(), term.end(), ::isspace), term.end());
        if (term.empty()) continue;
        if (term[0] == 'h') {
            p.halfD += std::stoi(term.substr(1));
            continue;
        }
        auto star = term.find('*');
        int count = 1, size = 0;
        if (star == std::string::npos) {
            size = std::stoi(term);
        } else {
            count = std::stoi(term.substr(0, star));
            size = std::stoi(term.substr(star + 1));
        }
        if (count < 0 || size < 1) throw std::invalid_argument("pattern: bad term " + term);
        for (int i = 0; i < count; ++i) p.parts.push_back(size);
    }
    std::sort(p.parts.rbegin(), p.parts.rend());
    int t = p.total();
    if (t > n) throw std::invalid_argument("pattern: total exceeds rank");
    p.free = n - t;
    return p;
}

// ---------------------------------------------------------------- enumeration

namespace {

bool sub_multiset(const RootSystemClass& small, const RootSystemClass& big) {
    for (auto& [k, m] : small.components()) {
        auto it = big.components().find(k);
        if (it == big.components().end() || it->second < m) return false;
    }
    return true;
}

struct LineEnum {
    int n;
    int64_t d;
    const IsotropicLinePattern& pat;
    const EnumerateOptions& opt;
    const std::function<bool(const NeighborForm&)>& emit;
    int64_t h;        // largest value d/2 (floor)
    int64_t hNon;     // largest value not equal to d/2
    std::vector<int> counts;  // counts[v] for v in [0, h]
    uint64_t index = 0;
    bool stopped = false;
    RootSystemClass patClass;
    std::map<int, int> remaining;  // part size -> multiplicity
    int maxCount = 1 << 30;

    LineEnum(int n_, int64_t d_, const IsotropicLinePattern& p, const EnumerateOptions& o,
             const std::function<bool(const NeighborForm&)>& e)
        : n(n_), d(d_), pat(p), opt(o), emit(e) {
        h = d / 2;
        hNon = d % 2 == 0 ? h - 1 : h;
        counts.assign(h + 1, 0);
        patClass = pat.root_class();
        for (int s : pat.parts) remaining[s]++;
    }

    void leaf() {
        Vec64 x;
        x.reserve(n);
        __int128 ss = 0;
        int64_t g = d;
        for (int64_t v = 0; v <= h; ++v)
            for (int c = 0; c < counts[v]; ++c) {
                x.push_back(v);
                ss += static_cast<__int128>(v) * v;
            }
        for (int64_t v = 0; v <= h; ++v)
            if (counts[v]) g = std::gcd(g, v);
        if (g != 1) return;
        const int64_t e = d % 2 == 0 ? 2 : 1;
        if (ss % (e * d) != 0) return;
        if (pat.free != n && pat.free != 0) {
            if (!sub_multiset(patClass, visible_root_system(x, d))) return;
        }
        uint64_t k = index++;
        if (k < opt.skip) return;
        if (opt.shards > 1 && k % opt.shards != opt.shard) return;
        NeighborForm f;
        f.n = n;
        f.d = d;
        f.x = std::move(x);
        f.eps = 0;
        if (!emit(f)) stopped = true;
    }

    // Unconstrained: any multiplicities.
    void free_rec(int64_t v, int left) {
        if (stopped) return;
        if (v > h) {
            if (left == 0) leaf();
            return;
        }
        if (v == h) {
            if (left <= maxCount || v == 1) {
                counts[v] = left;
                if (!(opt.firstIsOne && v == 1 && left == 0)) leaf();
                counts[v] = 0;
            }
            return;
        }
        for (int c = left; c >= 0; --c) {
            if (opt.firstIsOne && v == 1) {
                if (c == 0) continue;
                maxCount = c;
            } else if (c > maxCount) {
                continue;
            }
            counts[v] = c;
            free_rec(v + 1, left - c);
            counts[v] = 0;
        }
        if (opt.firstIsOne && v == 1) maxCount = 1 << 30;
    }

    int parts_left() const {
        int s = 0;
        for (auto& [k, m] : remaining) s += m;
        return s;
    }

    // Prescribed classes: each non-half value takes 0 or a remaining part size.
    void pattern_rec(int64_t v) {
        if (stopped) return;
        if (v > hNon) {
            // half slot
            if (d % 2 == 0) {
                if (pat.halfD > 0) {
                    if (parts_left() != 0) return;
                    counts[h] = pat.halfD;
                    leaf();
                    counts[h] = 0;
                } else {
                    int pl = parts_left();
                    if (pl == 0) {
                        leaf();
                    } else if (pl == 1 && remaining.count(1) && remaining.at(1) == 1) {
                        counts[h] = 1;
                        leaf();
                        counts[h] = 0;
                    }
                }
            } else if (parts_left() == 0) {
                leaf();
            }
            return;
        }
        int64_t slots = (hNon - v + 1) + ((d % 2 == 0 && pat.halfD == 0) ? 1 : 0);
        if (parts_left() > slots) return;
        std::vector<int> sizes;
        for (auto& [k, m] : remaining)
            if (m > 0) sizes.push_back(k);
        std::sort(sizes.rbegin(), sizes.rend());
        for (int s : sizes) {
            if (opt.firstIsOne) {
                if (v == 1) maxCount = s;
                else if (s > maxCount) continue;
            }
            counts[v] = s;
            if (--remaining[s] == 0) remaining.erase(s);
            pattern_rec(v + 1);
            remaining[s]++;
            counts[v] = 0;
            if (stopped) return;
        }
        if (!(opt.firstIsOne && v == 1)) pattern_rec(v + 1);
    }
};

}  // namespace

uint64_t enumerate_lines(int n, int64_t d, const IsotropicLinePattern& pattern, const EnumerateOptions& opt,
                         const std::function<bool(const NeighborForm&)>& emit) {
    if (pattern.total() != n) throw std::invalid_argument("enumerate_lines: pattern total differs from n");
    if (d < 2 || n == 0) return 0;
    LineEnum e(n, d, pattern, opt, emit);
    if (pattern.free == 0)
        e.pattern_rec(1);
    else
        e.free_rec(opt.allowZero ? 0 : 1, n);
    return e.index;
}

NeighborForm add_Im(const NeighborForm& f, int m) {
    NeighborForm g = f;
    g.n += m;
    g.x.resize(g.n, 0);
    return g;
}

// ---------------------------------------------------------------- line map and composition

LineOf line_of(const GramLattice& N) {
    if (!N.embedding) throw std::invalid_argument("line_of: lattice has no embedding");
    const int n = N.rank();
    const Int& D = N.embedding->denom;
    const IntMat& B = N.embedding->rows;
    IntMat gens = B;
    for (int j = 0; j < n; ++j) {
        IntVec e(n, 0);
        e[j] = D;
        gens.push_back(e);
    }
    IntMat H = hnf_rows(gens);
    Int dt = det(H);
    if (dt < 0) dt = -dt;
    Int Dn;
    mpz_pow_ui(Dn.get_mpz_t(), D.get_mpz_t(), n);
    Int order = Dn / dt;
    LineOf out;
    if (!order.fits_slong_p()) throw std::overflow_error("line_of: order too large");
    out.order = order.get_si();
    out.y.assign(n, 0);
    if (out.order == 1) return out;
    std::mt19937_64 rng(12345);
    for (int attempt = 0; attempt < 4096; ++attempt) {
        IntVec v(n, 0);
        for (int i = 0; i < n; ++i) {
            long c = attempt == 0 ? (i == 0 ? 1 : 0) : static_cast<long>(rng() % static_cast<uint64_t>(out.order));
            if (c == 0) continue;
            for (int j = 0; j < n; ++j) v[j] += c * B[i][j];
        }
        Int g = D;
        for (auto& e : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t());
        if (D / g != order) continue;
        Int k = D / order;
        for (int j = 0; j < n; ++j) {
            Int q = v[j] / k;
            Int r;
            mpz_fdiv_r(r.get_mpz_t(), q.get_mpz_t(), order.get_mpz_t());
            out.y[j] = r.get_si();
        }
        return out;
    }
    throw std::invalid_argument("line_of: quotient is not cyclic");
}

bool same_embedded_lattice(const GramLattice& a, const GramLattice& b) {
    if (!a.embedding || !b.embedding) throw std::invalid_argument("same_embedded_lattice: missing embedding");
    if (a.rank() != b.rank()) return false;
    Int D;
    mpz_lcm(D.get_mpz_t(), a.embedding->denom.get_mpz_t(), b.embedding->denom.get_mpz_t());
    auto scaled = [&](const Embedding& e) {
        IntMat r = e.rows;
        Int f = D / e.denom;
        for (auto& row : r)
            for (auto& v : row) v *= f;
        return hnf_rows(r);
    };
    return scaled(*a.embedding) == scaled(*b.embedding);
}

GramLattice neighbor_of(const GramLattice& L, const InnerNeighbor& inner) {
    const int n = L.rank();
    if (inner.d == 1) return L;
    const Int d(static_cast<long>(inner.d));
    IntVec a = vec_mat(inner.z, L.gram);  // v -> z.v
    Int zz = dot(a, inner.z);
    const Int e = inner.d % 2 == 0 ? 2 : 1;
    if (zz % (e * d) != 0) throw std::invalid_argument("neighbor_of: z is not isotropic");
    Vec64 am(n);
    for (int i = 0; i < n; ++i) {
        Int r;
        mpz_fdiv_r(r.get_mpz_t(), a[i].get_mpz_t(), d.get_mpz_t());
        am[i] = r.get_si();
    }
    if (gcd_all(am, inner.d) != 1) throw std::invalid_argument("neighbor_of: z is not primitive");
    Vec64 y = choose_y(am, inner.d);
    Int k = zz / d;
    Int r = inner.d % 2 == 1 ? Int(-((d + 1) / 2) * k) : Int(-(k / 2) + inner.eps * (d / 2));
    IntVec zt(n);
    for (int i = 0; i < n; ++i) zt[i] = inner.z[i] + r * d * y[i];
    IntMat gens = congruence_kernel(a, d);
    for (auto& row : gens)
        for (auto& v : row) v *= d;
    gens.push_back(zt);
    IntMat C = hnf_rows(gens);  // coordinates in L, scaled by d
    GramLattice N;
    N.gram.assign(n, IntVec(n));
    IntMat CG = mat_mul(C, L.gram);
    Int d2 = d * d;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Int v = dot(CG[i], C[j]);
            if (!mpz_divisible_p(v.get_mpz_t(), d2.get_mpz_t())) throw std::logic_error("neighbor_of: not integral");
            N.gram[i][j] = v / d2;
        }
    if (L.embedding) N.embedding = Embedding{d * L.embedding->denom, mat_mul(C, L.embedding->rows)};
    return lll_reduce(N);
}

NeighborForm compose(const NeighborForm& outer, const InnerNeighbor& inner) {
    if (std::gcd(outer.d, inner.d) != 1) throw std::invalid_argument("compose: d and d' are not coprime");
    if (inner.d == 1) return outer;
    GramLattice L = build(outer);
    GramLattice N = neighbor_of(L, inner);
    LineOf line = line_of(N);
    const int64_t dd = outer.d * inner.d;
    if (line.order != dd) throw std::logic_error("compose: unexpected line order");
    Vec64 y = line.y;
    if (outer.d > 1) {
        int64_t lambda = -1;
        for (int64_t l = 1; l < outer.d && lambda < 0; ++l) {
            if (std::gcd(l, outer.d) != 1) continue;
            bool ok = true;
            for (int i = 0; i < outer.n && ok; ++i) ok = mod(y[i] - l * outer.x[i], outer.d) == 0;
            if (ok) lambda = l;
        }
        if (lambda < 0) throw std::logic_error("compose: line does not reduce to the outer line");
        int64_t mu = crt(inv_mod(lambda, outer.d), outer.d, 1, inner.d);
        for (auto& v : y) v = static_cast<int64_t>((static_cast<__int128>(v) * mu) % dd);
    }
    for (int e = 0; e < (dd % 2 == 0 ? 2 : 1); ++e) {
        NeighborForm f{outer.n, dd, y, e};
        if (!f.valid()) continue;
        if (same_embedded_lattice(build(f), N)) return f;
    }
    throw std::logic_error("compose: no form reproduces the composed neighbor");
}

void add_Dm_candidates(const NeighborForm& f, int m, bool filter,
                       const std::function<bool(const NeighborForm&)>& emit) {
    if (f.d % 2 == 0) throw std::invalid_argument("add_Dm_candidates: d must be odd");
    if (m < 2) throw std::invalid_argument("add_Dm_candidates: m must be at least 2");
    const int n = f.n;
    if (n > 40) throw std::invalid_argument("add_Dm_candidates: rank too large");
    const int64_t d2 = 2 * f.d;
    RootSystemClass want;
    if (filter) {
        want = visible_root_system(f.x, f.d);
        want.add('D', m);
    }
    for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
        NeighborForm g;
        g.n = n + m;
        g.d = d2;
        g.x.resize(n + m);
        for (int i = 0; i < n; ++i) g.x[i] = mod(f.x[i], f.d) + (((mask >> i) & 1) ? f.d : 0);
        for (int i = n; i < n + m; ++i) g.x[i] = f.d;
        if (!g.valid()) continue;
        if (filter && visible_root_system(g.x, g.d) != want) continue;
        if (!emit(g)) return;
    }
}

std::pair<NeighborForm, NeighborForm> companions(const NeighborForm& f) {
    if (f.d % 2 == 0) throw std::invalid_argument("companions: d must be odd");
    if (mod(f.n, 8) != 4) throw std::invalid_argument("companions: n must be 4 mod 8");
    NeighborForm a;
    a.n = f.n;
    a.d = 2 * f.d;
    a.x.resize(f.n);
    for (int i = 0; i < f.n; ++i) {
        int64_t r = mod(f.x[i], f.d);
        a.x[i] = (r % 2 == 1) ? r : r + f.d;
    }
    a.eps = 0;
    NeighborForm b = a;
    b.eps = 1;
    a.validate();
    return {a, b};
}

VisibleIsometry visible_isometry_group(const NeighborForm& f) {
    const int64_t d = f.d;
    VisibleIsometry out;
    auto classes = [&](int64_t lambda) {
        std::map<int64_t, int> X;
        for (auto v : f.x) {
            int64_t r = mod(static_cast<int64_t>((static_cast<__int128>(lambda) * v) % d), d);
            X[std::min(r, d - r)]++;
        }
        return X;
    };
    if (d == 1) {
        out.H = {0};
    } else {
        auto X = classes(1);
        for (int64_t l = 1; l < d; ++l)
            if (std::gcd(l, d) == 1 && classes(l) == X) out.H.push_back(l);
    }
    VisibleShape s = visible_shape(f.x, d);
    auto fact = [](long k) {
        Int r;
        mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(k));
        return r;
    };
    auto pow2 = [](long k) {
        Int r;
        mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(k));
        return r;
    };
    out.kernelOrder = pow2(s.m) * fact(s.m) * pow2(s.mPrime) * fact(s.mPrime);
    for (int a : s.partition) out.kernelOrder *= fact(a);
    return out;
}

NeighborForm stable_line(int n, int q, int k, int64_t p, int64_t omega, int64_t dCoprime, const Vec64& yTail) {
    if (q < 2 || k < 1 || q * k > n) throw std::invalid_argument("stable_line: need q >= 2, k >= 1, qk <= n");
    if (std::gcd(p, dCoprime) != 1) throw std::invalid_argument("stable_line: p and d must be coprime");
    if (mod(p - 1, q) != 0) throw std::invalid_argument("stable_line: p must be 1 mod q");
    if (static_cast<int>(yTail.size()) != n) throw std::invalid_argument("stable_line: yTail has wrong length");
    int64_t w = 1;
    for (int j = 1; j <= q; ++j) {
        w = static_cast<int64_t>((static_cast<__int128>(w) * mod(omega, p)) % p);
        if ((w == 1) != (j == q)) throw std::invalid_argument("stable_line: omega must have order q");
    }
    for (int c = 0; c < k; ++c)
        for (int s = 1; s < q; ++s)
            if (mod(yTail[c * q + s] - yTail[c * q], dCoprime) != 0)
                throw std::invalid_argument("stable_line: yTail must be constant on each cycle");
    Vec64 xp(n, 0);
    for (int c = 0; c < k; ++c) {
        int64_t v = 1;
        for (int s = 0; s < q; ++s) {
            xp[c * q + s] = v;
            v = static_cast<int64_t>((static_cast<__int128>(v) * mod(omega, p)) % p);
        }
    }
    if (q == 2 && sum_squares(xp) % p != 0) throw std::invalid_argument("stable_line: line mod p is not isotropic");
    NeighborForm f;
    f.n = n;
    f.d = p * dCoprime;
    f.x.resize(n);
    for (int i = 0; i < n; ++i) f.x[i] = crt(xp[i], p, mod(yTail[i], dCoprime), dCoprime);
    f.eps = 0;
    f.validate();
    return f;
}

bool visible_char_conditions(const NeighborForm& f, int r) {
    if (f.d % 2 != 0) throw std::invalid_argument("visible_char_conditions: d must be even");
    const int n = f.n;
    if (r < 1 || r >= n) throw std::invalid_argument("visible_char_conditions: need 1 <= r < n");
    __int128 tail = 0;
    for (int i = 0; i < n; ++i) {
        bool odd = mod(f.x[i], 2) == 1;
        if (i < n - r && !odd) return false;
        if (i >= n - r && odd) return false;
        if (i >= n - r) tail += f.x[i];
    }
    if (tail % f.d != 0) return false;
    __int128 m4 = static_cast<__int128>(4) * f.d;
    __int128 lhs = 2 * tail - sum_squares(f.x) - static_cast<__int128>(f.d) * f.eps * (2 + f.d);
    return lhs % m4 == 0;
}

void visible_char_lines(int n, int r, int64_t d, const std::function<bool(const NeighborForm&)>& emit) {
    if (d % 2 != 0) throw std::invalid_argument("visible_char_lines: d must be even");
    if (r < 1 || r >= n) throw std::invalid_argument("visible_char_lines: need 1 <= r < n");
    Vec64 x(n);
    bool stop = false;
    std::function<void(int, int64_t)> rec = [&](int i, int64_t minv) {
        if (stop) return;
        if (i == n) {
            for (int e = 0; e < 2 && !stop; ++e) {
                NeighborForm f{n, d, x, e};
                if (!f.valid() || !visible_char_conditions(f, r)) continue;
                if (!emit(f)) stop = true;
            }
            return;
        }
        bool odd = i < n - r;
        int64_t start = (i == n - r) ? 0 : minv;
        for (int64_t v = start; v < d; ++v) {
            if ((mod(v, 2) == 1) != odd) continue;
            x[i] = v;
            rec(i + 1, v);
            if (stop) return;
        }
    };
    rec(0, 0);
}

}  // namespace unimod
