#pragma once

#include "zerosum/group.hpp"
#include "zerosum/sequence.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace zs {

struct EnumerationBudget {
    // Longest atom to emit; unset means unbounded (the search terminates on
    // its own because zero-sum free sequences are shorter than D(G)).
    std::optional<std::int64_t> max_length;
    std::optional<std::int64_t> max_atoms;
    std::optional<double> time_budget;  // wall-clock seconds
    std::int64_t max_nodes = 10'000'000;
    int workers = 1;
};

struct ResourceUsage {
    std::int64_t nodes = 0;
    std::string cap_hit;  // empty, "nodes", "atoms" or "time"
};

struct AtomSet {
    GroupSpec group;
    std::vector<Index> support;  // sorted G0
    std::vector<Sequence> atoms;  // canonical order
    std::optional<std::int64_t> max_length;
    bool complete = false;
    ResourceUsage budget_used;

    // True iff the list holds every atom over the support, with no length cap.
    bool covers_all_atoms() const { return complete && !max_length; }
};

AtomSet enumerate_atoms(const GroupSpec& group, std::span<const Index> support,
                        const EnumerationBudget& budget);

struct DavenportResult {
    std::int64_t value = 0;  // exact D(G), or the best lower bound
    bool exact = false;
    Sequence witness{GroupSpec()};  // zero-sum free, length value-1
    ResourceUsage budget_used;
};

DavenportResult davenport(const GroupSpec& group, const EnumerationBudget& budget);

// All atoms of length D(G). Computes D(G) by search unless `known_davenport`
// is supplied. With `negation_dedup`, only the smaller of U and -U is kept.
AtomSet enumerate_max_atoms(const GroupSpec& group, const EnumerationBudget& budget,
                            bool negation_dedup = false,
                            std::optional<std::int64_t> known_davenport = std::nullopt);

// Persists complete or partial AtomSets under a directory, keyed by
// (group, sorted support, max_length).
class AtomCache {
public:
    explicit AtomCache(std::filesystem::path dir);

    std::optional<AtomSet> load(const GroupSpec& group, std::span<const Index> support,
                                std::optional<std::int64_t> max_length) const;
    void store(const AtomSet& atoms) const;
    std::filesystem::path path_for(const GroupSpec& group, std::span<const Index> support,
                                   std::optional<std::int64_t> max_length) const;

private:
    std::filesystem::path dir_;
};

// Cache-aware wrapper: a complete cached result is returned as-is, an
// incomplete one is recomputed.
AtomSet enumerate_atoms_cached(const GroupSpec& group, std::span<const Index> support,
                               const EnumerationBudget& budget, const AtomCache* cache);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace zs
