#include "unimod/classify.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace unimod {

namespace {

struct Candidate {
    NeighborForm form;
    GramLattice lattice;
    RootSystemClass root;
    InvariantFingerprint fp;
    std::string canonical;
    uint64_t hash = 0;
    bool kept = false;
};

void evaluate(Candidate& c, const SearchConfig& cfg) {
    GramLattice N = build(c.form);
    Analysis A = analyze(N);
    c.lattice = A.lattice;
    c.root = A.roots.cls;
    if (cfg.requireNoNormOne && A.sv.counts[1] != 0) return;
    if (cfg.rootFilter && c.root != *cfg.rootFilter) return;
    c.fp = fingerprint(A, cfg.fingerprintDepth);
    c.canonical = c.fp.canonical();
    c.hash = c.fp.hash();
    c.kept = true;
}

void evaluate_all(std::vector<Candidate>& batch, const SearchConfig& cfg) {
    const int W = std::max(1, cfg.workerCount);
    if (W == 1 || batch.size() < 2) {
        for (auto& c : batch) evaluate(c, cfg);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(W);
    for (int w = 0; w < W; ++w)
        pool.emplace_back([&, w] {
            try {
                for (size_t i = w; i < batch.size(); i += W) evaluate(batch[i], cfg);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

bool has_half(const NeighborForm& f) {
    if (f.d % 2 != 0) return false;
    for (auto v : f.x)
        if (((v % f.d) + f.d) % f.d == f.d / 2) return true;
    return false;
}

void expand_eps(const NeighborForm& f, std::vector<Candidate>& out) {
    Candidate c;
    c.form = f;
    c.form.eps = 0;
    out.push_back(c);
    if (f.d % 2 == 0 && !has_half(f)) {
        c.form.eps = 1;
        out.push_back(c);
    }
}

void say(const SearchConfig& cfg, const std::string& s) {
    if (cfg.log) cfg.log(s);
}

}  // namespace

RunResult run(const SearchConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("classify: rank must be positive");
    if (cfg.dMin < 1 || cfg.dMax < cfg.dMin) throw std::invalid_argument("classify: empty d range");
    if (cfg.fingerprintDepth < 1 || cfg.fingerprintDepth > 3) throw std::invalid_argument("classify: bad depth");
    if (cfg.reducedTarget && !cfg.targetMass) throw std::invalid_argument("classify: reduced runs need a target");
    if (cfg.bias && cfg.bias->total() != cfg.n) throw std::invalid_argument("classify: bias total differs from rank");
    Rat target = cfg.targetMass ? *cfg.targetMass : (cfg.requireNoNormOne ? mass_no_norm_one(cfg.n) : mass_full(cfg.n));
    if (target <= 0) throw std::invalid_argument("classify: target mass must be positive");

    RunResult res;
    int64_t startD = cfg.dMin;
    uint64_t startCursor = 0;
    if (!cfg.ledgerPath.empty() && std::filesystem::exists(cfg.ledgerPath)) {
        res.ledger = MassLedger::load(cfg.ledgerPath);
        if (res.ledger.target() != target || res.ledger.reduced() != cfg.reducedTarget)
            throw std::invalid_argument("classify: ledger target does not match the configuration");
        startD = std::max<int64_t>(startD, res.ledger.state.value("d", cfg.dMin));
        startCursor = res.ledger.state.value("cursor", uint64_t(0));
        say(cfg, "resumed at d=" + std::to_string(startD) + " cursor=" + std::to_string(startCursor));
    } else {
        res.ledger = MassLedger(target, cfg.reducedTarget);
    }
    std::vector<GramLattice> known;
    for (const auto& e : res.ledger.entries()) known.push_back(lll_reduce(build(e.form)));

    auto snapshot = [&](int64_t d, uint64_t cursor) {
        if (cfg.ledgerPath.empty()) return;
        res.ledger.state = {{"d", d}, {"cursor", cursor}};
        res.ledger.save(cfg.ledgerPath);
    };

    auto process = [&](std::vector<Candidate>& batch, DStats& st) {
        evaluate_all(batch, cfg);
        for (auto& c : batch) {
            ++st.lattices;
            if (!c.kept || res.ledger.exhausted()) continue;
            ++st.kept;
            bool dup = false;
            const auto& entries = res.ledger.entries();
            for (size_t i = 0; i < entries.size() && !dup; ++i) {
                if (entries[i].hash != c.hash || entries[i].fingerprint != c.canonical) continue;
                dup = is_isometric(c.lattice, known[i]).isometric;
            }
            if (dup) continue;
            AutResult aut = aut_order(c.lattice);
            res.ledger.insert(c.form, c.hash, c.canonical, aut.fullOrder, c.root,
                              [](const LedgerEntry&) { return false; });
            known.push_back(c.lattice);
            ++st.newClasses;
            say(cfg, "new class " + c.form.str() + " root " + c.root.str() + " |O| = " + aut.fullOrder.get_str() +
                         " remaining " + rat_str(res.ledger.remaining()));
        }
        batch.clear();
    };

    for (int64_t d = startD; d <= cfg.dMax && !res.ledger.exhausted(); ++d) {
        DStats st;
        st.d = d;
        uint64_t cursor = d == startD ? startCursor : 0;
        std::vector<Candidate> batch;
        if (d == 1) {
            if (!cfg.requireNoNormOne && !cfg.bias && cursor == 0) {
                NeighborForm f{cfg.n, 1, Vec64(cfg.n, 0), 0};
                expand_eps(f, batch);
                st.lines = 1;
                process(batch, st);
            }
        } else {
            EnumerateOptions opt;
            opt.firstIsOne = cfg.firstIsOne;
            opt.skip = cursor;
            opt.allowZero = !cfg.requireNoNormOne && !cfg.bias;
            IsotropicLinePattern pat = cfg.bias ? *cfg.bias : IsotropicLinePattern::unconstrained(cfg.n);
            uint64_t consumed = cursor;
            size_t linesInBatch = 0;
            enumerate_lines(cfg.n, d, pat, opt, [&](const NeighborForm& f) {
                expand_eps(f, batch);
                ++st.lines;
                ++linesInBatch;
                if (linesInBatch >= cfg.batchSize) {
                    process(batch, st);
                    consumed += linesInBatch;
                    linesInBatch = 0;
                    snapshot(d, consumed);
                }
                return !res.ledger.exhausted();
            });
            process(batch, st);
        }
        snapshot(d + 1, 0);
        say(cfg, "d=" + std::to_string(d) + " lines " + std::to_string(st.lines) + " kept " + std::to_string(st.kept) +
                     " new " + std::to_string(st.newClasses) + " remaining " + rat_str(res.ledger.remaining()));
        res.stats.push_back(st);
    }
    res.exhausted = res.ledger.exhausted();
    std::vector<std::pair<std::string, NeighborForm>> order;
    for (const auto& e : res.ledger.entries()) order.emplace_back(e.fingerprint + e.form.to_json().dump(), e.form);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [k, f] : order) res.classes.push_back(f);
    return res;
}

VerifyReport verify_list(const std::vector<NeighborForm>& forms, const Rat& target, bool reduced) {
    VerifyReport rep;
    rep.target = target;
    if (forms.empty()) throw std::invalid_argument("verify_list: empty list");
    for (const auto& f : forms)
        if (f.n != forms[0].n) throw std::invalid_argument("verify_list: records have different ranks");
    std::vector<GramLattice> lat;
    std::vector<std::string> fp;
    std::vector<RootSystemClass> roots;
    for (const auto& f : forms) {
        Analysis A = analyze(build(f));
        lat.push_back(A.lattice);
        roots.push_back(A.roots.cls);
        fp.push_back(fingerprint(A, 2).canonical());
    }
    for (size_t i = 0; i < forms.size(); ++i)
        for (size_t j = i + 1; j < forms.size(); ++j) {
            if (fp[i] != fp[j]) continue;
            // Escalate before the isometry test.
            if (fingerprint(lat[i], 3) != fingerprint(lat[j], 3)) continue;
            if (is_isometric(lat[i], lat[j]).isometric) rep.duplicates.emplace_back(i, j);
        }
    for (size_t i = 0; i < forms.size(); ++i) {
        AutResult a = aut_order(lat[i]);
        rep.autOrders.push_back(a.fullOrder);
        Rat m = reduced ? reduced_mass(a.fullOrder, roots[i]) : Rat(Int(1), a.fullOrder);
        m.canonicalize();
        rep.masses.push_back(m);
        rep.sum += m;
    }
    std::ostringstream msg;
    for (auto& [i, j] : rep.duplicates) msg << "duplicate: records " << i << " and " << j << " are isometric\n";
    if (rep.sum != target) msg << "mass mismatch: sum " << rat_str(rep.sum) << " vs target " << rat_str(target) << "\n";
    rep.pass = rep.duplicates.empty() && rep.sum == target;
    rep.message = rep.pass ? "PASS" : msg.str();
    return rep;
}

std::vector<NeighborForm> read_forms_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<NeighborForm> out;
    std::string line;
    size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(NeighborForm::from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::invalid_argument(path + ":" + std::to_string(lineNo) + ": malformed record: " + e.what());
        }
    }
    return out;
}

std::optional<int64_t> farness_search(const GramLattice& L, int64_t dMax) {
    const int n = L.rank();
    if (n == 0) return 1;
    GramLattice R = lll_reduce(L);
    const std::string want = fingerprint(R, 1).canonical();
    const bool even = is_even(R);
    for (int64_t d = 1; d <= dMax; ++d) {
        if (even && d % 2 == 1) continue;  // even neighbors of I_n need d even
        std::optional<int64_t> hit;
        auto test = [&](const NeighborForm& f) {
            GramLattice N = build(f);
            if (fingerprint(N, 1).canonical() != want) return false;
            return is_isometric(N, R).isometric;
        };
        if (d == 1) {
            if (test(NeighborForm{n, 1, Vec64(n, 0), 0})) return 1;
            continue;
        }
        EnumerateOptions opt;
        opt.allowZero = true;
        enumerate_lines(n, d, IsotropicLinePattern::unconstrained(n), opt, [&](const NeighborForm& f) {
            std::vector<Candidate> cs;
            expand_eps(f, cs);
            for (auto& c : cs)
                if (test(c.form)) {
                    hit = d;
                    return false;
                }
            return true;
        });
        if (hit) return hit;
    }
    return std::nullopt;
}

}  // namespace unimod
