// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.
#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include "support.hpp"

using namespace unimod;
using namespace testsupport;

namespace {

// Wall-clock budgets in seconds. Equalities are exact throughout.
constexpr double kBudgetClassify = 600;
constexpr double kBudgetMassTable = 600;
constexpr double kBudgetE8Witness = 1;
constexpr double kBudgetLeech94 = 30;
constexpr double kBudgetOddFamily = 120;  // each n
constexpr double kBudgetDelta = 300;
constexpr double kBudgetSubLedger = 3600;
constexpr double kBudgetVisibleIsometry = 1;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream note;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (!pass) note << "; ";
            note << what;
            pass = false;
        }
    }
};

int failures = 0;

void report(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    auto t0 = Clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    double s = since(t0);
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << title << " (" << std::fixed
              << std::setprecision(1) << s << " s)";
    if (!o.pass) std::cout << ": " << o.note.str();
    std::cout << std::endl;
    failures += !o.pass;
}

RootDatum roots_of(const GramLattice& L) {
    ShortVectorSet sv = short_vectors(L, 2);
    std::vector<Vec64> pairs;
    for (size_t i = 0; i < sv.size(); ++i)
        if (sv.norms[i] == 2) pairs.push_back(sv.vecs[i]);
    return identify(L, pairs);
}

int64_t euler_phi(int64_t m) {
    int64_t c = 0;
    for (int64_t l = 1; l <= m; ++l) c += std::gcd(l, m) == 1;
    return c;
}

IntMat scaled_rows(const Embedding& e, const Int& D) {
    IntMat r = e.rows;
    for (auto& row : r)
        for (auto& v : row) v *= D / e.denom;
    return r;
}

// [A + B : A] for embedded full-rank lattices.
Int sum_index(const GramLattice& A, const GramLattice& B) {
    Int D;
    mpz_lcm(D.get_mpz_t(), A.embedding->denom.get_mpz_t(), B.embedding->denom.get_mpz_t());
    IntMat a = scaled_rows(*A.embedding, D), both = a;
    for (auto& r : scaled_rows(*B.embedding, D)) both.push_back(r);
    return abs(det(hnf_rows(a))) / abs(det(hnf_rows(both)));
}

std::vector<RunResult> gRuns;  // n = 1..16, shared by criteria 1 and 2

}  // namespace

int main() {
    report(1, "classification exactness, n <= 16", [](Outcome& o) {
        auto t0 = Clock::now();
        for (int n = 1; n <= 16; ++n) {
            SearchConfig c;
            c.n = n;
            c.dMax = 12;
            gRuns.push_back(run(c));
            const RunResult& r = gRuns.back();
            int got = static_cast<int>(r.classes.size());
            o.require(r.exhausted && r.ledger.remaining() == 0, "n=" + std::to_string(n) + " not exhausted");
            o.require(got == genus_size(n), "n=" + std::to_string(n) + ": " + std::to_string(got) + " classes");
        }
        o.require(since(t0) <= kBudgetClassify, "over time budget");
    });

    report(2, "mass table cross-check, n <= 16", [](Outcome& o) {
        auto t0 = Clock::now();
        o.require(gRuns.size() == 16, "criterion 1 did not finish");
        for (size_t k = 0; k < gRuns.size(); ++k) {
            int n = static_cast<int>(k) + 1;
            Rat sum = 0;
            // Orders recomputed from the forms, not taken from the ledger.
            for (auto& f : gRuns[k].classes) sum += make_rat(1, aut_order(build(f)).fullOrder);
            o.require(sum == mass_full(n), "n=" + std::to_string(n) + ": sum " + rat_str(sum));
        }
        o.require(since(t0) <= kBudgetMassTable, "over time budget");
    });

    report(3, "named constructions", [](Outcome& o) {
        auto t0 = Clock::now();
        GramLattice N = build(form(2, Vec64(8, 1)));
        GramLattice E8 = standard_lattice('E', 8);
        IsoResult iso = is_isometric(N, E8);
        o.require(iso.isometric && iso.witness &&
                      mat_mul(mat_mul(*iso.witness, E8.gram), transpose(*iso.witness)) == N.gram,
                  "no E8 witness");
        o.require(since(t0) <= kBudgetE8Witness, "E8 over budget");

        t0 = Clock::now();
        NeighborForm leech = form(94, range_vec(1, 47, 2));
        bool found = false;
        for (int e = 0; e < 2; ++e) {
            leech.eps = e;
            if (!is_even_neighbor(leech)) continue;
            GramLattice L = build(leech);
            found = true;
            o.require(is_even(L), "94-neighbor predicted even is odd");
            o.require(short_vectors(L, 2).counts[2] == 0, "94-neighbor has roots");
        }
        o.require(found, "no even eps at d=94");
        o.require(since(t0) <= kBudgetLeech94, "Leech over budget");

        for (int n : {23, 24, 26}) {
            t0 = Clock::now();
            GramLattice L = build(form(2 * n + 1, range_vec(1, n)));
            auto sv = short_vectors(L, 2);
            o.require(sv.counts[2] == 0, "r2 != 0 at n=" + std::to_string(n));
            o.require(since(t0) <= kBudgetOddFamily, "n=" + std::to_string(n) + " over budget");
        }
    });

    report(4, "visible root system oracle, 200 instances", [](Outcome& o) {
        Rng rng(4004);
        int mismatches = 0;
        for (int t = 0; t < 200;) {
            int n = static_cast<int>(uniform(rng, 1, 10));
            int64_t d = uniform(rng, 2, 20);
            auto f = try_random_form(n, d, rng);
            if (!f) continue;
            ++t;
            if (visible_root_system(f->x, d) != roots_of(m_lattice(*f)).cls) {
                if (mismatches == 0) o.require(false, "first mismatch " + f->str());
                ++mismatches;
            }
        }
        o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    });

    report(5, "d-kernel oracle, rank <= 4, d <= 6", [](Outcome& o) {
        int bad = 0;
        for (auto& c : small_classes(4))
            for (int64_t d = 1; d <= 6; ++d)
                if (d_kernels(c, d) != brute_d_kernels(c, d)) {
                    if (bad == 0) o.require(false, "first mismatch " + c.str() + " d=" + std::to_string(d));
                    ++bad;
                }
        o.require(bad == 0, std::to_string(bad) + " mismatches");
        std::set<RootSystemClass> e8{RootSystemClass::parse("A1 E7"), RootSystemClass::parse("D8")};
        o.require(d_kernels(RootSystemClass::parse("E8"), 2) == e8, "2-kernels of E8");
    });

    report(6, "delta invariants of the first 10A1 lattice", [](Outcome& o) {
        auto t0 = Clock::now();
        Analysis A = analyze(build(ten_a1_forms()[0].first));
        std::string d1 = format_delta(delta_s(A, 1)), d2 = format_delta(delta_s(A, 2));
        o.require(d1 == "10(A1,2578)", "delta_1 = " + d1);
        o.require(d2 == "4(2A1,1968)+6(2A1,2000)+20(2A1,2032)+15(2A1,2064)", "delta_2 = " + d2);
        o.require(since(t0) <= kBudgetDelta, "over time budget");
    });

    report(7, "10A1 sub-ledger", [](Outcome& o) {
        auto t0 = Clock::now();
        std::vector<NeighborForm> forms;
        for (auto& [f, m] : ten_a1_forms()) forms.push_back(f);
        VerifyReport rep = verify_list(forms, parse_rat(kTenA1Target), true);
        o.require(rep.pass, rep.message);
        auto rows = ten_a1_forms();
        for (size_t k = 0; k < rows.size() && k < rep.masses.size(); ++k)
            o.require(rep.masses[k] == parse_rat(rows[k].second),
                      "row " + std::to_string(k) + " mass " + rat_str(rep.masses[k]));
        o.require(since(t0) <= kBudgetSubLedger, "over time budget");
    });

    report(8, "r3 theta relation, 20 lattices of rank 24..28", [](Outcome& o) {
        Rng rng(8008);
        for (int t = 0; t < 20; ++t) {
            int n = 24 + t % 5;
            NeighborForm f = random_form_no_norm_one(n, 40, 120, rng);
            GramLattice L = build(f);
            o.require(r3_consistency(L), "fails on " + f.str());
            if (n == 26) {
                auto sv = short_vectors(lll_reduce(L), 3);
                int64_t e = exc_set(L).size;
                Rat want(3120 + 4 * sv.counts[2] - 1024 * e);
                o.require(r3_predicted(26, sv.counts[2], e) == want, "n=26 specialization");
                o.require(Rat(sv.counts[3]) == want, "r3 at n=26 on " + f.str());
            }
        }
    });

    report(9, "visible isometry of N_{2n+1}(1..n)", [](Outcome& o) {
        auto t0 = Clock::now();
        for (int n : {5, 12, 23, 24, 26}) {
            auto v = visible_isometry_group(form(2 * n + 1, range_vec(1, n)));
            o.require(static_cast<int64_t>(v.H.size()) == euler_phi(2 * n + 1), "|H| at n=" + std::to_string(n));
            o.require(v.kernelOrder == 1, "kernel at n=" + std::to_string(n));
        }
        o.require(since(t0) <= kBudgetVisibleIsometry, "over time budget");
    });

    report(10, "property suites", [](Outcome& o) {
        Rng rng(1010);
        int fails = 0;
        auto check = [&](bool ok, const std::string& what) {
            if (!ok && fails++ == 0) o.require(false, what);
        };
        // Unimodular, index d against I_n.
        for (int t = 0; t < 60;) {
            int n = static_cast<int>(uniform(rng, 2, 12));
            int64_t d = uniform(rng, 2, 40);
            auto f = try_random_form(n, d, rng);
            if (!f) continue;
            ++t;
            GramLattice N = build(*f);
            GramLattice I = standard_lattice('I', n);
            I.embedding = Embedding{Int(1), identity_matrix(n)};
            check(det(N) == 1, "not unimodular: " + f->str());
            check(sum_index(N, I) == d && sum_index(I, N) == d, "index: " + f->str());
            // Line map recovery up to a unit.
            LineOf l = line_of(N);
            bool found = false;
            for (int64_t lam = 1; lam < d && !found; ++lam) {
                if (std::gcd(lam, d) != 1) continue;
                bool ok = true;
                for (int i = 0; i < n && ok; ++i) ok = (((l.y[i] - lam * f->x[i]) % d) + d) % d == 0;
                found = ok;
            }
            check(l.order == d && found, "line map: " + f->str());
        }
        // eps distinct, or collapsed when some x_i = d/2.
        for (int t = 0; t < 40;) {
            int n = static_cast<int>(uniform(rng, 2, 10));
            int64_t d = 2 * uniform(rng, 1, 12);
            auto f = try_random_form(n, d, rng);
            if (!f) continue;
            ++t;
            NeighborForm a = *f, b = *f;
            a.eps = 0;
            b.eps = 1;
            bool half = std::any_of(a.x.begin(), a.x.end(), [&](int64_t v) { return v % d == d / 2; });
            GramLattice A = build(a), B = build(b);
            if (half)
                check(is_isometric(A, B).isometric, "no collapse: " + a.str());
            else
                check(!same_embedded_lattice(A, B), "eps coincide: " + a.str());
        }
        // Parity predicate against direct evenness, including all even lines of rank 8.
        for (int t = 0; t < 200;) {
            int n = static_cast<int>(uniform(rng, 2, 12));
            int64_t d = 2 * uniform(rng, 1, 12);
            auto f = try_random_form(n, d, rng);
            if (!f) continue;
            ++t;
            check(is_even_neighbor(*f) == is_even(build(*f)), "parity: " + f->str());
        }
        for (int64_t d = 2; d <= 8; d += 2)
            enumerate_lines(8, d, IsotropicLinePattern::unconstrained(8), {}, [&](const NeighborForm& f) {
                for (int e = 0; e < 2; ++e) {
                    NeighborForm g = f;
                    g.eps = e;
                    check(is_even_neighbor(g) == is_even(build(g)), "parity: " + g.str());
                }
                return true;
            });
        // Q(R^v) saturated in M_d(x) when no coordinate vanishes.
        for (int t = 0; t < 60;) {
            int n = static_cast<int>(uniform(rng, 2, 9));
            int64_t d = uniform(rng, 2, 16);
            auto f = try_random_form(n, d, rng, 1);
            if (!f) continue;
            GramLattice M = m_lattice(*f);
            ShortVectorSet sv = short_vectors(M, 2);
            IntMat roots;
            for (size_t i = 0; i < sv.size(); ++i)
                if (sv.norms[i] == 2) roots.push_back(to_int_vec(sv.vecs[i]));
            if (roots.empty()) continue;
            ++t;
            check(saturate(M, roots).index == 1, "saturation: " + f->str());
        }
        // aut_order against brute force.
        for (int t = 0; t < 60; ++t) {
            Mat64 g = random_gram(static_cast<int>(uniform(rng, 1, 4)), 5, rng);
            check(aut_order(gram64(g)).fullOrder == brute_aut_order(g), "aut_order vs brute force");
        }
        o.require(fails == 0, std::to_string(fails) + " property failures");
    });

    return failures;
}
