#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "support.hpp"

using namespace unimod;
using namespace testsupport;

namespace {

Rat inv(const Int& a) { return make_rat(1, a); }

Int io(int n) {
    Int f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    mpz_mul_2exp(f.get_mpz_t(), f.get_mpz_t(), static_cast<unsigned long>(n));
    return f;
}

std::string fp(const GramLattice& L) { return fingerprint(L, 2).canonical(); }

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("unimod_test_" + name)).string();
}

}  // namespace

TEST_CASE("masses without norm one vectors") {
    CHECK(mass_no_norm_one(0) == 1);
    CHECK(mass_no_norm_one(8) == parse_rat("1/696729600"));
    CHECK(mass_no_norm_one(16) == parse_rat("5213041/277667181515243520000"));
    CHECK(mass_no_norm_one(13) == 0);
    CHECK(mass_no_norm_one(1) == 0);
    CHECK_THROWS_AS(mass_no_norm_one(29), std::invalid_argument);
    CHECK_THROWS_AS(mass_no_norm_one(-1), std::invalid_argument);
}

TEST_CASE("full masses") {
    CHECK(mass_full(0) == 1);
    CHECK(mass_full(1) == parse_rat("1/2"));
    CHECK(mass_full(8) == parse_rat("1/696729600") + inv(io(8)));
    // Up to rank 7 the genus is I_n alone; ranks 9 to 11 add E8 + I_{n-8}.
    for (int n = 1; n <= 7; ++n) CHECK(mass_full(n) == inv(io(n)));
    for (int n = 9; n <= 11; ++n) CHECK(mass_full(n) == inv(io(n)) + inv(Int(696729600) * io(n - 8)));
}

TEST_CASE("reduced masses") {
    CHECK(reduced_mass(Int(696729600), RootSystemClass::parse("E8")) == 1);
    for (int n = 5; n <= 9; ++n) CHECK(reduced_mass(io(n), irreducible('D', n)) == parse_rat("1/2"));
    AutResult r = aut_order(build(ten_a1_forms()[0].first));
    CHECK(reduced_mass(r.fullOrder, r.rootClass) == parse_rat("1/64"));
    CHECK_THROWS_AS(reduced_mass(Int(3), RootSystemClass::parse("A1")), std::invalid_argument);
    CHECK(reduced_mass(Int(6), RootSystemClass::parse("A1")) > 0);
}

TEST_CASE("rational helpers") {
    CHECK(parse_rat("6/8") == parse_rat("3/4"));
    CHECK(rat_str(parse_rat("6/8")) == "3/4");
    CHECK(parse_rat("5") == 5);
    CHECK_THROWS_AS(parse_rat("x/2"), std::invalid_argument);
}

TEST_CASE("ledger: I_8 and E_8 exhaust rank 8") {
    MassLedger L(mass_full(8));
    NeighborForm i8 = form(1, Vec64(8, 0)), e8 = form(2, Vec64(8, 1));
    GramLattice a = build(i8), b = build(e8);
    auto fa = fingerprint(a, 2), fb = fingerprint(b, 2);
    CHECK(L.insert(i8, fa.hash(), fa.canonical(), aut_order(a).fullOrder, fa.rootClass) == InsertStatus::Inserted);
    CHECK_FALSE(L.exhausted());
    Rat before = L.remaining();
    CHECK(L.insert(i8, fa.hash(), fa.canonical(), aut_order(a).fullOrder, fa.rootClass) == InsertStatus::Duplicate);
    CHECK(L.remaining() == before);
    CHECK(L.entries().size() == 1);
    CHECK(L.insert(e8, fb.hash(), fb.canonical(), aut_order(b).fullOrder, fb.rootClass) == InsertStatus::Inserted);
    CHECK(L.exhausted());
    CHECK(L.remaining() == 0);
    // One more class would overdraw.
    CHECK_THROWS_AS(L.insert(form(3, {1, 1, 1, 0, 0, 0, 0, 0}), 1, "other", Int(2), RootSystemClass{}),
                    std::runtime_error);
}

TEST_CASE("ledger: tie checker decides duplicates") {
    MassLedger L(Rat(1));
    NeighborForm f = form(1, {0, 0});
    CHECK(L.insert(f, 7, "same", Int(8), RootSystemClass{}) == InsertStatus::Inserted);
    auto never = [](const LedgerEntry&) { return false; };
    CHECK(L.insert(f, 7, "same", Int(8), RootSystemClass{}, never) == InsertStatus::Inserted);
    auto always = [](const LedgerEntry&) { return true; };
    CHECK(L.insert(f, 7, "same", Int(8), RootSystemClass{}, always) == InsertStatus::Duplicate);
    CHECK(L.remaining() == parse_rat("3/4"));
}

TEST_CASE("ledger: the 10A1 sub-ledger") {
    MassLedger L(parse_rat("4424507/116121600"), true);
    auto rows = ten_a1_forms();
    Rat last = L.remaining();
    for (size_t k = 0; k < rows.size(); ++k) {
        GramLattice N = build(rows[k].first);
        auto f = fingerprint(N, 2);
        AutResult r = aut_order(N);
        CHECK(L.insert(rows[k].first, f.hash(), f.canonical(), r.fullOrder, f.rootClass) == InsertStatus::Inserted);
        CHECK(L.entries().back().mass == parse_rat(rows[k].second));
        CHECK(L.remaining() <= last);
        last = L.remaining();
        if (k == 4) CHECK(L.remaining() == parse_rat("17/116121600"));
    }
    CHECK(L.exhausted());
}

TEST_CASE("ledger: save and load") {
    MassLedger L(mass_full(9));
    NeighborForm f = form(1, Vec64(9, 0));
    GramLattice N = build(f);
    auto fpN = fingerprint(N, 2);
    L.insert(f, fpN.hash(), fpN.canonical(), aut_order(N).fullOrder, fpN.rootClass);
    L.state = {{"d", 2}, {"cursor", 5}};
    std::string path = temp_path("ledger.jsonl");
    L.save(path);
    MassLedger M = MassLedger::load(path);
    CHECK(M.target() == L.target());
    CHECK(M.remaining() == L.remaining());
    CHECK(M.reduced() == L.reduced());
    CHECK(M.state == L.state);
    REQUIRE(M.entries().size() == 1);
    CHECK(M.entries()[0].form == f);
    CHECK(M.entries()[0].fingerprint == fp(N));
    CHECK(M.entries()[0].autOrder == aut_order(N).fullOrder);
    CHECK(M.entries()[0].mass == L.entries()[0].mass);
    std::remove(path.c_str());
    CHECK_THROWS(MassLedger::load(temp_path("missing.jsonl")));
}
