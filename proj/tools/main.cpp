// unimod command-line front end. Every subcommand forwards to the library.
#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "unimod/autiso.hpp"
#include "unimod/classify.hpp"
#include "unimod/invariants.hpp"
#include "unimod/massbook.hpp"
#include "unimod/neighbor.hpp"
#include "unimod/rootsys.hpp"

using namespace unimod;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Opts {
    bool json = false;
    uint64_t seed = 0;
    // Lattice input, shared by several subcommands.
    std::string form;
    std::string gramFile;
    int64_t d = 0;
    std::string x;
    int eps = 0;
    int depth = 2;
    // classify / verify-list / farness
    int rank = 0;
    int64_t dMin = 1, dMax = 0;
    std::string bias, target, resume, file, out, rootFilter, kind;
    int workers = 1;
    bool reduced = false, noNormOne = false, firstIsOne = false, quiet = false;
    int familyN = 0;
};

Vec64 parse_x(const std::string& s) {
    // "1,2,3", also "1^8,2^3" for repeated entries.
    Vec64 x;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        auto caret = tok.find('^');
        try {
            if (caret == std::string::npos) {
                x.push_back(std::stoll(tok));
            } else {
                int64_t v = std::stoll(tok.substr(0, caret));
                int64_t k = std::stoll(tok.substr(caret + 1));
                if (k < 0) throw UsageError("negative repeat in " + tok);
                x.insert(x.end(), k, v);
            }
        } catch (const std::logic_error&) {
            throw UsageError("bad coordinate list: " + s);
        }
    }
    return x;
}

// Accepts a JSON record {"d":..,"x":[..],"eps":..} or "N_d(x1,...,xn)" with an optional +/- suffix.
NeighborForm parse_form(const std::string& s) {
    NeighborForm f;
    try {
        if (!s.empty() && s[0] == '{') return NeighborForm::from_json(json::parse(s));
        static const std::regex re(R"(\s*N_(\d+)\(([^)]*)\)\s*([+-]?)\s*)");
        std::smatch m;
        if (!std::regex_match(s, m, re)) throw UsageError("cannot parse form: " + s);
        f.d = std::stoll(m[1]);
        f.x = parse_x(m[2]);
        f.n = static_cast<int>(f.x.size());
        f.eps = m[3] == "+" ? 1 : 0;
        f.validate();
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    return f;
}

IntMat read_gram(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    IntMat g;
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        g = gram_from_json(json::parse(text));
    } else {
        std::stringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
            std::stringstream ls(line);
            IntVec row;
            std::string tok;
            while (ls >> tok) row.emplace_back(tok);
            if (!row.empty()) g.push_back(row);
        }
    }
    for (auto& r : g)
        if (r.size() != g.size()) throw UsageError("Gram matrix in " + path + " is not square");
    return g;
}

struct Input {
    GramLattice lattice;
    std::optional<NeighborForm> form;
};

Input read_input(const Opts& o) {
    int given = !o.form.empty() + !o.gramFile.empty() + (o.d > 0);
    if (given != 1) throw UsageError("give exactly one of --form, --gram, or --d/--x");
    Input in;
    if (!o.gramFile.empty()) {
        GramLattice L = GramLattice::from_gram(read_gram(o.gramFile));
        try {
            L.validate();
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
        if (!is_unimodular(L)) throw UsageError("Gram matrix is not unimodular positive definite");
        in.lattice = L;
        return in;
    }
    NeighborForm f;
    if (!o.form.empty()) {
        f = parse_form(o.form);
    } else {
        f.d = o.d;
        f.x = parse_x(o.x);
        f.n = static_cast<int>(f.x.size());
        f.eps = o.eps;
        try {
            f.validate();
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
    }
    in.form = f;
    in.lattice = build(f);
    return in;
}

json num(const Int& v) {
    if (v.fits_slong_p()) return v.get_si();
    return v.get_str();
}

json gram_json(const IntMat& g) {
    json j = json::array();
    for (auto& row : g) {
        json r = json::array();
        for (auto& e : row) r.push_back(num(e));
        j.push_back(r);
    }
    return j;
}

std::string gram_text(const IntMat& g) {
    std::ostringstream os;
    for (auto& row : g) {
        for (size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << row[i].get_str();
        os << "\n";
    }
    return os.str();
}

void emit(const Opts& o, const std::string& cmd, const json& result, const std::string& human) {
    if (o.json)
        std::cout << json{{"command", cmd}, {"result", result}}.dump() << "\n";
    else
        std::cout << human;
}

std::string kv(const std::string& k, const std::string& v) {
    std::ostringstream os;
    os << std::left << std::setw(16) << k << v << "\n";
    return os.str();
}

int cmd_build(const Opts& o) {
    Input in = read_input(o);
    json r{{"form", in.form ? in.form->to_json() : json()},
           {"even", is_even(in.lattice)},
           {"gram", gram_json(in.lattice.gram)}};
    std::string h = (in.form ? kv("form", in.form->str()) : "") + kv("even", is_even(in.lattice) ? "yes" : "no") +
                    "gram\n" + gram_text(in.lattice.gram);
    emit(o, "build", r, h);
    return 0;
}

int cmd_invariants(const Opts& o) {
    Input in = read_input(o);
    Analysis A = analyze(in.lattice, o.seed);
    InvariantFingerprint fp = fingerprint(A, o.depth);
    json r = fp.to_json();
    r["even"] = is_even(A.lattice);
    r["hash"] = fp.hash();
    if (in.form) r["form"] = in.form->to_json();
    std::string h = kv("root system", fp.rootClass.str()) + kv("even", is_even(A.lattice) ? "yes" : "no") +
                    kv("r1", std::to_string(fp.r1)) + kv("r2", std::to_string(fp.r2)) + kv("r3", std::to_string(fp.r3));
    if (o.depth >= 2) {
        h += kv("delta1", format_delta(fp.delta1)) + kv("delta2", format_delta(fp.delta2));
        if (fp.excSize >= 0) h += kv("|Exc|", std::to_string(fp.excSize));
    }
    for (auto& [k, v] : fp.deltaSP) h += kv("delta(" + k + ")", format_delta(v));
    const int n = A.lattice.rank();
    if (n >= 24 && n <= 28 && fp.r1 == 0) {
        bool ok = r3_consistency(A.lattice);
        r["r3Relation"] = ok;
        h += kv("r3 relation", ok ? "holds" : "FAILS");
        if (!ok) {
            emit(o, "invariants", r, h);
            std::cerr << "r3 relation failed\n";
            return 1;
        }
    }
    emit(o, "invariants", r, h);
    return 0;
}

int cmd_rootsys(const Opts& o) {
    Input in = read_input(o);
    Analysis A = analyze(in.lattice, o.seed);
    const RootSystemClass& R = A.roots.cls;
    json r{{"rootSystem", R.str()}, {"rank", R.rank()}, {"weylOrder", num(weyl_order(R))}};
    std::string h = kv("root system", R.str()) + kv("rank", std::to_string(R.rank())) +
                    kv("|W(R)|", weyl_order(R).get_str());
    if (in.form) {
        RootSystemClass V = visible_root_system(in.form->x, in.form->d);
        r["visible"] = V.str();
        h += kv("visible", V.str());
    }
    emit(o, "rootsys", r, h);
    return 0;
}

int cmd_aut(const Opts& o) {
    Input in = read_input(o);
    AutResult a = aut_order(in.lattice, o.seed);
    Rat red = reduced_mass(a.fullOrder, a.rootClass);
    json r{{"order", num(a.fullOrder)},
           {"rootSystem", a.rootClass.str()},
           {"weylOrder", num(a.weylOrder)},
           {"reducedOrder", num(a.reducedOrder)},
           {"reducedMass", rat_str(red)}};
    std::string h = kv("|O(L)|", a.fullOrder.get_str()) + kv("root system", a.rootClass.str()) +
                    kv("|W(R)|", a.weylOrder.get_str()) + kv("|O(L)|/|W(R)|", a.reducedOrder.get_str()) +
                    kv("reduced mass", rat_str(red));
    emit(o, "aut", r, h);
    return 0;
}

int cmd_classify(const Opts& o) {
    SearchConfig c;
    c.n = o.rank;
    c.dMin = o.dMin;
    c.dMax = o.dMax;
    c.workerCount = o.workers;
    c.fingerprintDepth = o.depth;
    c.requireNoNormOne = o.noNormOne;
    c.firstIsOne = o.firstIsOne;
    c.reducedTarget = o.reduced;
    c.ledgerPath = o.resume;
    try {
        if (!o.bias.empty()) c.bias = IsotropicLinePattern::parse(o.bias, o.rank);
        if (!o.target.empty()) c.targetMass = parse_rat(o.target);
        if (!o.rootFilter.empty()) c.rootFilter = RootSystemClass::parse(o.rootFilter);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (!o.quiet) c.log = [](const std::string& s) { std::cerr << s << "\n"; };
    RunResult res;
    try {
        res = run(c);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    json classes = json::array();
    std::ostringstream h;
    h << std::left << std::setw(24) << "root system" << std::setw(28) << "|O(L)|"
      << "form\n";
    std::map<std::string, const LedgerEntry*> byForm;
    for (auto& e : res.ledger.entries()) byForm[e.form.str()] = &e;
    for (auto& f : res.classes) {
        const LedgerEntry& e = *byForm.at(f.str());
        classes.push_back(e.to_json());
        h << std::setw(24) << e.rootClass.str() << std::setw(28) << e.autOrder.get_str() << f.str() << "\n";
    }
    if (!o.out.empty()) {
        std::ofstream out(o.out);
        if (!out) throw std::runtime_error("cannot write " + o.out);
        for (auto& f : res.classes) out << f.to_json().dump() << "\n";
    }
    h << kv("classes", std::to_string(res.classes.size())) << kv("remaining", rat_str(res.ledger.remaining()))
      << kv("status", res.exhausted ? "exhausted" : "NOT exhausted");
    json r{{"classes", classes},
           {"count", res.classes.size()},
           {"target", rat_str(res.ledger.target())},
           {"remaining", rat_str(res.ledger.remaining())},
           {"exhausted", res.exhausted}};
    emit(o, "classify", r, h.str());
    return res.exhausted ? 0 : 1;
}

int cmd_verify(const Opts& o) {
    std::vector<NeighborForm> forms;
    Rat target;
    try {
        forms = read_forms_jsonl(o.file);
        target = parse_rat(o.target);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (forms.empty()) throw UsageError("no records in " + o.file);
    for (auto& f : forms)
        if (f.n != o.rank) throw UsageError("record " + f.str() + " does not have rank " + std::to_string(o.rank));
    VerifyReport rep = verify_list(forms, target, o.reduced);
    json rows = json::array();
    std::ostringstream h;
    for (size_t i = 0; i < forms.size(); ++i) {
        rows.push_back({{"form", forms[i].to_json()}, {"order", num(rep.autOrders[i])}, {"mass", rat_str(rep.masses[i])}});
        h << std::left << std::setw(32) << rep.autOrders[i].get_str() << std::setw(20) << rat_str(rep.masses[i])
          << forms[i].str() << "\n";
    }
    json dups = json::array();
    for (auto& [a, b] : rep.duplicates) dups.push_back({a, b});
    h << kv("sum", rat_str(rep.sum)) << kv("target", rat_str(rep.target)) << (rep.pass ? "PASS\n" : "FAIL\n" + rep.message);
    json r{{"records", rows}, {"sum", rat_str(rep.sum)}, {"target", rat_str(rep.target)}, {"duplicates", dups},
           {"pass", rep.pass}};
    emit(o, "verify-list", r, h.str());
    return rep.pass ? 0 : 1;
}

int cmd_farness(const Opts& o) {
    Opts in = o;
    in.form.clear();
    in.d = 0;
    if (o.gramFile.empty()) throw UsageError("farness needs --gram");
    GramLattice L = read_input(in).lattice;
    auto d = farness_search(L, o.dMax);
    json r{{"dMax", o.dMax}, {"far", d ? json(*d) : json()}};
    std::string h = d ? kv("far", std::to_string(*d)) : kv("far", "> " + std::to_string(o.dMax));
    emit(o, "farness", r, h);
    return 0;
}

int cmd_family(const Opts& o) {
    NeighborForm f;
    if (o.kind == "leech") {
        f.d = 94;
        for (int i = 1; i <= 47; i += 2) f.x.push_back(i);
        f.n = 24;
        // the even choice of eps
        for (int e = 0; e < 2; ++e) {
            f.eps = e;
            if (is_even_neighbor(f)) break;
        }
    } else if (o.kind == "odd-borcherds") {
        if (o.familyN < 1) throw UsageError("odd-borcherds needs --n >= 1");
        f.d = 2 * o.familyN + 1;
        for (int i = 1; i <= o.familyN; ++i) f.x.push_back(i);
        f.n = o.familyN;
    } else if (o.kind == "e-n") {
        if (o.familyN < 4 || o.familyN % 4 != 0) throw UsageError("e-n needs --n divisible by 4");
        f.d = 2;
        f.x.assign(o.familyN, 1);
        f.n = o.familyN;
    } else {
        throw UsageError("unknown family " + o.kind);
    }
    f.validate();
    Analysis A = analyze(build(f), o.seed);
    json r{{"form", f.to_json()},
           {"even", is_even(A.lattice)},
           {"rootSystem", A.roots.cls.str()},
           {"r1", A.sv.counts[1]},
           {"r2", A.sv.counts[2]}};
    std::string h = kv("form", f.str()) + kv("even", is_even(A.lattice) ? "yes" : "no") +
                    kv("root system", A.roots.cls.str()) + kv("r1", std::to_string(A.sv.counts[1])) +
                    kv("r2", std::to_string(A.sv.counts[2]));
    emit(o, "family", r, h);
    return 0;
}

void lattice_flags(CLI::App* s, Opts& o) {
    s->add_option("--form", o.form, "N_d(x1,...,xn)[+|-] or a JSON record");
    s->add_option("--gram", o.gramFile, "file with a Gram matrix (JSON or whitespace rows)");
    s->add_option("--d", o.d, "modulus d")->check(CLI::PositiveNumber);
    s->add_option("--x", o.x, "comma separated coordinates, v^k repeats v");
    s->add_option("--eps", o.eps, "0 or 1 (even d only)")->check(CLI::Range(0, 1));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unimodular lattices as cyclic neighbors of Z^n"};
    app.require_subcommand(1);
    Opts o;
    app.add_flag("--json", o.json, "print a JSON envelope");
    app.add_option("--seed", o.seed, "seed for randomized internals");

    auto* b = app.add_subcommand("build", "build N_d(x; eps) and print its reduced Gram matrix");
    lattice_flags(b, o);
    auto* inv = app.add_subcommand("invariants", "root system, r_i, delta invariants");
    lattice_flags(inv, o);
    inv->add_option("--depth", o.depth, "fingerprint depth")->check(CLI::Range(1, 3));
    auto* rs = app.add_subcommand("rootsys", "root system and visible root system");
    lattice_flags(rs, o);
    auto* au = app.add_subcommand("aut", "order of the isometry group");
    lattice_flags(au, o);

    auto* cl = app.add_subcommand("classify", "mass-exhaustion search over d-neighbors of I_n");
    cl->add_option("--rank", o.rank, "n")->required()->check(CLI::Range(1, 28));
    cl->add_option("--d-max", o.dMax, "largest d")->required()->check(CLI::PositiveNumber);
    cl->add_option("--d-min", o.dMin, "smallest d")->check(CLI::PositiveNumber);
    cl->add_option("--bias", o.bias, "visible shape, e.g. 8*2+10*1");
    cl->add_option("--target", o.target, "target mass num/den");
    cl->add_flag("--reduced", o.reduced, "target and masses are reduced masses");
    cl->add_option("--root-filter", o.rootFilter, "keep only this root system, e.g. 10A1");
    cl->add_flag("--no-norm-one", o.noNormOne, "skip lattices with norm 1 vectors");
    cl->add_flag("--first-is-one", o.firstIsOne, "restrict to x_1 = 1 with maximal multiplicity");
    cl->add_option("--workers", o.workers, "worker threads")->check(CLI::Range(1, 1024));
    cl->add_option("--depth", o.depth, "fingerprint depth")->check(CLI::Range(1, 3));
    cl->add_option("--resume", o.resume, "ledger snapshot (JSONL), created or resumed");
    cl->add_option("--out", o.out, "write the class list as JSONL");
    cl->add_flag("--quiet", o.quiet, "no progress on stderr");

    auto* vl = app.add_subcommand("verify-list", "check a list of forms against a mass");
    vl->add_option("--rank", o.rank, "n")->required()->check(CLI::PositiveNumber);
    vl->add_option("--file", o.file, "JSONL forms")->required();
    vl->add_option("--target", o.target, "target mass num/den")->required();
    vl->add_flag("--reduced", o.reduced, "compare reduced masses");

    auto* fa = app.add_subcommand("farness", "least d making L a d-neighbor of I_n");
    fa->add_option("--gram", o.gramFile, "Gram matrix file")->required();
    fa->add_option("--d-max", o.dMax, "largest d")->required()->check(CLI::PositiveNumber);

    auto* fm = app.add_subcommand("family", "special forms");
    fm->add_option("--kind", o.kind, "odd-borcherds, leech or e-n")
        ->required()
        ->check(CLI::IsMember({"odd-borcherds", "leech", "e-n"}));
    fm->add_option("--n", o.familyN, "rank parameter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*b) return cmd_build(o);
        if (*inv) return cmd_invariants(o);
        if (*rs) return cmd_rootsys(o);
        if (*au) return cmd_aut(o);
        if (*cl) return cmd_classify(o);
        if (*vl) return cmd_verify(o);
        if (*fa) return cmd_farness(o);
        if (*fm) return cmd_family(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
