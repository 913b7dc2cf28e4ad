#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace unimod;
using namespace testsupport;

namespace {

Int factorial(int n) {
    Int r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

void check_witness(const GramLattice& a, const GramLattice& b, const IsoResult& r) {
    REQUIRE(r.isometric);
    REQUIRE(r.witness);
    const IntMat& W = *r.witness;
    CHECK(mat_mul(mat_mul(W, b.gram), transpose(W)) == a.gram);
    CHECK(abs(det(W)) == 1);
}

}  // namespace

TEST_CASE("orders of named lattices") {
    for (int n = 1; n <= 8; ++n) {
        Int want = factorial(n);
        mpz_mul_2exp(want.get_mpz_t(), want.get_mpz_t(), static_cast<unsigned long>(n));
        CAPTURE(n);
        CHECK(aut_order(standard_lattice('I', n)).fullOrder == want);
    }
    AutResult e8 = aut_order(standard_lattice('E', 8));
    CHECK(e8.fullOrder == 696729600);
    CHECK(e8.reducedOrder == 1);
    CHECK(aut_order(standard_lattice('D', 4)).fullOrder == 1152);
    CHECK(aut_order(standard_lattice('A', 2)).fullOrder == 12);
    // Odd Leech: |O| / phi(49) = 23876075520.
    AutResult ol = aut_order(build(form(49, range_vec(1, 24))));
    CHECK(ol.fullOrder == Int("23876075520") * 42);
    CHECK(ol.weylOrder == 1);
}

TEST_CASE("full order is Weyl order times reduced order; generators fix rho") {
    Rng rng(31);
    for (int t = 0; t < 25;) {
        int n = static_cast<int>(uniform(rng, 2, 12));
        int64_t d = uniform(rng, 2, 30);
        auto f = try_random_form(n, d, rng);
        if (!f) continue;
        ++t;
        GramLattice L = build(*f);
        AutResult r = aut_order(L);
        CAPTURE(f->str());
        CHECK(r.fullOrder == r.weylOrder * r.reducedOrder);
        CHECK(r.weylOrder == weyl_order(r.rootClass));
        // rho from the root datum, in the same basis.
        ShortVectorSet sv = short_vectors(L, 2);
        std::vector<Vec64> roots;
        for (size_t i = 0; i < sv.size(); ++i)
            if (sv.norms[i] == 2) roots.push_back(sv.vecs[i]);
        RootDatum rd = identify(L, roots);
        IntVec rho = to_int_vec(rd.rho2);
        for (auto& g : r.generators) {
            CHECK(mat_mul(mat_mul(g, L.gram), transpose(g)) == L.gram);
            CHECK(vec_mat(rho, g) == rho);
        }
    }
}

TEST_CASE("agrees with brute force at rank <= 4") {
    Rng rng(32);
    for (int t = 0; t < 60; ++t) {
        int n = static_cast<int>(uniform(rng, 1, 4));
        Mat64 g = random_gram(n, 5, rng);
        CAPTURE(n);
        CHECK(aut_order(gram64(g)).fullOrder == brute_aut_order(g));
    }
}

TEST_CASE("direct sums with distinct determinants multiply") {
    GramLattice A2 = standard_lattice('A', 2), I3 = standard_lattice('I', 3);
    GramLattice S = direct_sum(A2, I3);
    Int a = aut_order(A2).fullOrder, b = aut_order(I3).fullOrder;
    CHECK(aut_order(S).fullOrder == a * b);
    CHECK(aut_order(S).fullOrder == brute_aut_order(to_mat64(S.gram)));
    Rng rng(33);
    for (int t = 0; t < 10; ++t) {
        GramLattice X = gram64(random_gram(static_cast<int>(uniform(rng, 1, 2)), 5, rng));
        GramLattice Y = gram64(random_gram(static_cast<int>(uniform(rng, 1, 3)), 5, rng));
        if (det(X) == det(Y)) continue;
        GramLattice Z = direct_sum(X, Y);
        CHECK(aut_order(Z).fullOrder == brute_aut_order(to_mat64(Z.gram)));
    }
}

TEST_CASE("order is a basis-change invariant") {
    Rng rng(34);
    for (int t = 0; t < 15;) {
        int n = static_cast<int>(uniform(rng, 3, 12));
        int64_t d = uniform(rng, 2, 30);
        auto f = try_random_form(n, d, rng);
        if (!f) continue;
        ++t;
        GramLattice L = build(*f);
        CAPTURE(f->str());
        CHECK(aut_order(scramble(L, rng)).fullOrder == aut_order(L).fullOrder);
    }
}

TEST_CASE("isometry: named and scrambled pairs") {
    GramLattice E8 = standard_lattice('E', 8);
    GramLattice N = build(form(2, Vec64(8, 1)));
    check_witness(N, E8, is_isometric(N, E8));
    Rng rng(35);
    for (int t = 0; t < 15;) {
        int n = static_cast<int>(uniform(rng, 2, 12));
        int64_t d = uniform(rng, 2, 30);
        auto f = try_random_form(n, d, rng);
        if (!f) continue;
        ++t;
        GramLattice L = build(*f);
        GramLattice S = scramble(L, rng);
        check_witness(L, S, is_isometric(L, S));
        check_witness(S, L, is_isometric(S, L));
    }
    CHECK_FALSE(is_isometric(standard_lattice('I', 8), E8).isometric);
    CHECK_FALSE(is_isometric(standard_lattice('I', 3), standard_lattice('I', 4)).isometric);
}

TEST_CASE("isometry separates lattices with root system 2A1 2A2 2A3 2A4") {
    NeighborForm f = form(25, {1, 1, 1, 1, 1, 2, 2, 2, 4, 4, 4, 4, 5, 5, 6, 6, 6, 6, 6, 11, 11, 11, 12, 12, 12, 12});
    GramLattice L = build(f);
    Analysis A = analyze(L);
    REQUIRE(A.roots.cls == RootSystemClass::parse("2A1 2A2 2A3 2A4"));
    std::vector<NeighborForm> others{
        form(25, {1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 3, 3, 3, 5, 5, 5, 7, 7, 9, 9, 9, 9, 12, 12, 12, 12}),
        form(25, {1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 3, 3, 5, 5, 5, 5, 9, 9, 9, 11, 11, 11, 12, 12, 12, 12}),
        form(25, {1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 3, 3, 6, 6, 6, 6, 7, 7, 7, 7, 8, 8, 8, 10, 10, 10}),
    };
    for (auto& g : others) {
        GramLattice M = build(g);
        CAPTURE(g.str());
        CHECK(analyze(M).roots.cls == A.roots.cls);
        CHECK_FALSE(is_isometric(L, M).isometric);
    }
}

TEST_CASE("isometry is an equivalence relation on a small pool") {
    Rng rng(36);
    std::vector<GramLattice> pool;
    for (int k = 0; k < 6; ++k) {
        int n = 8;
        GramLattice base;
        while (true) {
            auto f = try_random_form(n, uniform(rng, 2, 12), rng);
            if (f) {
                base = build(*f);
                break;
            }
        }
        pool.push_back(base);
        pool.push_back(scramble(base, rng));
    }
    const size_t P = pool.size();
    std::vector<std::vector<bool>> iso(P, std::vector<bool>(P));
    for (size_t i = 0; i < P; ++i)
        for (size_t j = 0; j < P; ++j) iso[i][j] = is_isometric(pool[i], pool[j]).isometric;
    for (size_t i = 0; i < P; ++i) {
        CHECK(iso[i][i]);
        for (size_t j = 0; j < P; ++j) {
            CHECK(iso[i][j] == iso[j][i]);
            for (size_t k = 0; k < P; ++k)
                if (iso[i][j] && iso[j][k]) CHECK(iso[i][k]);
        }
    }
}
