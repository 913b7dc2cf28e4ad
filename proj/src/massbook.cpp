#include "unimod/massbook.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace unimod {

namespace {

// Nonzero masses of the groupoid of rank n lattices with r_1 = 0.
const char* kMassNoNormOne[29] = {
    "1",
    nullptr,
    nullptr,
    nullptr,
    nullptr,
    nullptr,
    nullptr,
    nullptr,
    "1/696729600",
    nullptr,
    nullptr,
    nullptr,
    "1/980995276800",
    nullptr,
    "1/16855282483200",
    "1/41845579776000",
    "5213041/277667181515243520000",
    "1/49662885888000",
    "1073351/32780153373327360000",
    "37813/450541700775936000",
    "4060488226549/11479871952566228090880000",
    "138813595637/54497004983156736000000",
    "1475568922019/45471119389159682211840",
    "21569773276937492389/28590262351867673365708800000",
    "4261904533831299496396870055017/129477933340026851560636148613120000000",
    "103079509578355844357599/37291646545914356563968000000",
    "15661211867944570315962162816169/34253421518525622105988399104000000",
    "18471746857358122138056975582390629/121385562506275173338096389324800000",
    "1722914776839913679032185321786744287148737/16573175467523436999761427022479360000000",
};

}  // namespace

Rat parse_rat(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("not a rational: " + s);
    r.canonicalize();
    return r;
}

std::string rat_str(const Rat& r) { return r.get_str(); }

Rat mass_no_norm_one(int n) {
    if (n < 0 || n > 28) throw std::invalid_argument("mass_no_norm_one: n must be in [0, 28]");
    return kMassNoNormOne[n] ? parse_rat(kMassNoNormOne[n]) : Rat(0);
}

Rat mass_full(int n) {
    if (n < 0 || n > 28) throw std::invalid_argument("mass_full: n must be in [0, 28]");
    Rat total = 0;
    for (int m = 0; m <= n; ++m) {
        Rat mm = mass_no_norm_one(n - m);
        if (mm == 0) continue;
        Int f, p;
        mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(m));
        mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(m));
        total += mm / Rat(f * p);
    }
    return total;
}

Rat reduced_mass(const Int& autOrder, const RootSystemClass& rootClass) {
    Int w = weyl_order(rootClass);
    if (sgn(autOrder) <= 0 || !mpz_divisible_p(autOrder.get_mpz_t(), w.get_mpz_t()))
        throw std::invalid_argument("reduced_mass: Weyl order does not divide the automorphism order");
    Rat r(w, autOrder);
    r.canonicalize();
    return r;
}

nlohmann::json LedgerEntry::to_json() const {
    std::ostringstream h;
    h << std::hex << hash;
    return nlohmann::json{{"hash", h.str()},
                          {"fingerprint", nlohmann::json::parse(fingerprint)},
                          {"form", form.to_json()},
                          {"autOrder", autOrder.get_str()},
                          {"root", rootClass.str()},
                          {"mass", rat_str(mass)}};
}

LedgerEntry LedgerEntry::from_json(const nlohmann::json& j) {
    LedgerEntry e;
    e.hash = std::stoull(j.at("hash").get<std::string>(), nullptr, 16);
    e.fingerprint = j.at("fingerprint").dump();
    e.form = NeighborForm::from_json(j.at("form"));
    e.autOrder = Int(j.at("autOrder").get<std::string>());
    e.rootClass = RootSystemClass::parse(j.at("root").get<std::string>());
    e.mass = parse_rat(j.at("mass").get<std::string>());
    return e;
}

MassLedger::MassLedger(Rat target, bool reduced) : target_(target), remaining_(target), reduced_(reduced) {
    if (target <= 0) throw std::invalid_argument("ledger: target must be positive");
}

InsertStatus MassLedger::insert(const NeighborForm& form, uint64_t hash, const std::string& fingerprint,
                                const Int& autOrder, const RootSystemClass& rootClass,
                                const std::function<bool(const LedgerEntry&)>& sameClass) {
    for (const auto& e : entries_) {
        if (e.hash != hash || e.fingerprint != fingerprint) continue;
        if (!sameClass || sameClass(e)) return InsertStatus::Duplicate;
    }
    LedgerEntry e;
    e.hash = hash;
    e.fingerprint = fingerprint;
    e.form = form;
    e.autOrder = autOrder;
    e.rootClass = rootClass;
    e.mass = reduced_ ? reduced_mass(autOrder, rootClass) : Rat(Int(1), autOrder);
    e.mass.canonicalize();
    Rat rem = remaining_ - e.mass;
    if (rem < 0)
        throw std::runtime_error("ledger overdraw: inserting " + form.str() + " leaves " + rat_str(rem));
    remaining_ = rem;
    entries_.push_back(std::move(e));
    return InsertStatus::Inserted;
}

void MassLedger::save(const std::string& path) const {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        nlohmann::json head{{"target", rat_str(target_)}, {"reduced", reduced_}, {"state", state}};
        out << head.dump() << "\n";
        for (const auto& e : entries_) out << e.to_json().dump() << "\n";
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot replace " + path);
}

MassLedger MassLedger::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty ledger " + path);
    auto head = nlohmann::json::parse(line);
    MassLedger L(parse_rat(head.at("target").get<std::string>()), head.value("reduced", false));
    if (head.contains("state")) L.state = head.at("state");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        LedgerEntry e = LedgerEntry::from_json(nlohmann::json::parse(line));
        L.remaining_ -= e.mass;
        if (L.remaining_ < 0) throw std::runtime_error("ledger overdraw while loading " + path);
        L.entries_.push_back(std::move(e));
    }
    return L;
}

}  // namespace unimod
