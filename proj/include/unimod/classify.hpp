#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unimod/autiso.hpp"
#include "unimod/invariants.hpp"
#include "unimod/massbook.hpp"
#include "unimod/neighbor.hpp"

namespace unimod {

struct SearchConfig {
    int n = 0;
    int64_t dMin = 1;
    int64_t dMax = 0;
    std::optional<IsotropicLinePattern> bias;
    // Full genus mass (or the no-norm-one mass) when unset.
    std::optional<Rat> targetMass;
    bool reducedTarget = false;               // target and entries are reduced masses
    std::optional<RootSystemClass> rootFilter;  // keep only lattices with this root system
    int fingerprintDepth = 2;
    int workerCount = 1;
    bool requireNoNormOne = false;
    bool firstIsOne = false;
    std::string ledgerPath;  // snapshot file; resumed from when it exists
    size_t batchSize = 256;
    std::function<void(const std::string&)> log;
};

struct DStats {
    int64_t d = 0;
    uint64_t lines = 0;       // lines emitted by the enumerator
    uint64_t lattices = 0;    // lattices built (both eps counted)
    uint64_t kept = 0;        // passing the norm-one and root filters
    uint64_t newClasses = 0;
};

struct RunResult {
    MassLedger ledger;
    std::vector<NeighborForm> classes;  // sorted by fingerprint then form
    bool exhausted = false;
    std::vector<DStats> stats;
};

RunResult run(const SearchConfig& cfg);

struct VerifyReport {
    bool pass = false;
    std::vector<Int> autOrders;
    std::vector<Rat> masses;
    std::vector<std::pair<size_t, size_t>> duplicates;
    Rat sum = 0;
    Rat target = 0;
    std::string message;
};

// Checks that the forms are pairwise non-isometric and that their masses sum to target.
VerifyReport verify_list(const std::vector<NeighborForm>& forms, const Rat& target, bool reduced = false);
std::vector<NeighborForm> read_forms_jsonl(const std::string& path);

// Least d <= dMax such that L is a cyclic d-neighbor of I_n.
std::optional<int64_t> farness_search(const GramLattice& L, int64_t dMax);

}  // namespace unimod
