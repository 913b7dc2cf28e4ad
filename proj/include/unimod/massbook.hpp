#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "unimod/core.hpp"
#include "unimod/neighbor.hpp"
#include "unimod/rootsys.hpp"

namespace unimod {

// mass of the unimodular lattices of rank n without norm 1 vectors, 0 <= n <= 28.
Rat mass_no_norm_one(int n);
// mass of all unimodular lattices of rank n: sum_m mass_no_norm_one(n - m) / (2^m m!).
Rat mass_full(int n);
// |W(R)| / |O(L)|; throws if |W(R)| does not divide autOrder.
Rat reduced_mass(const Int& autOrder, const RootSystemClass& rootClass);

Rat parse_rat(const std::string& s);  // "num/den" or "num"
std::string rat_str(const Rat& r);

struct LedgerEntry {
    uint64_t hash = 0;
    std::string fingerprint;  // canonical fingerprint payload
    NeighborForm form;
    Int autOrder;
    RootSystemClass rootClass;
    Rat mass;  // 1/|O(L)|, or the reduced mass in a reduced ledger

    nlohmann::json to_json() const;
    static LedgerEntry from_json(const nlohmann::json& j);
};

enum class InsertStatus { Inserted, Duplicate };

class MassLedger {
public:
    MassLedger() = default;
    // With `reduced`, entries carry reduced masses and the target is a reduced mass.
    explicit MassLedger(Rat target, bool reduced = false);

    // Entries whose fingerprint ties with the new one are passed to sameClass; a true answer
    // marks a duplicate. Without a checker, equal fingerprints count as the same class.
    // Throws std::runtime_error if the remaining mass would become negative.
    InsertStatus insert(const NeighborForm& form, uint64_t hash, const std::string& fingerprint, const Int& autOrder,
                        const RootSystemClass& rootClass,
                        const std::function<bool(const LedgerEntry&)>& sameClass = nullptr);

    const Rat& target() const { return target_; }
    const Rat& remaining() const { return remaining_; }
    bool reduced() const { return reduced_; }
    bool exhausted() const { return remaining_ == 0; }
    const std::vector<LedgerEntry>& entries() const { return entries_; }

    // Free-form resume state (for the classifier cursor).
    nlohmann::json state = nlohmann::json::object();

    // JSONL: a header line {"target": "num/den", "reduced": b, "state": {...}} then one entry per line.
    // save writes to a temporary file and renames it over the target.
    void save(const std::string& path) const;
    static MassLedger load(const std::string& path);

private:
    Rat target_ = 0;
    Rat remaining_ = 0;
    bool reduced_ = false;
    std::vector<LedgerEntry> entries_;
};

}  // namespace unimod
