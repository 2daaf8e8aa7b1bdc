#pragma once

#include "zerosum/atoms.hpp"
#include "zerosum/lattice.hpp"
#include "zerosum/lengths.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace zs {

enum class Verdict { Holds, Fails, Inconclusive };
std::string to_string(Verdict v);

struct CaseClaim {
    std::string name;  // "a", "b", "c.i", ..., "d"
    nlohmann::json params;
};

struct CaseClassification {
    std::optional<std::string> excluded;  // "cyclic" or "elementary 2-group"
    std::vector<CaseClaim> cases;
    std::vector<std::string> needs_davenport;  // undecided for lack of D(G)
    std::optional<std::int64_t> davenport;     // the value used, if any

    bool has(std::string_view name) const;
    std::string summary() const;  // "b,d" / "excluded: cyclic" / "none"
};

// Pure function of (G, D). For p-groups D defaults to d_star when not given.
CaseClassification classify_group(const GroupSpec& group, std::optional<std::int64_t> davenport = std::nullopt);

// gcd of |U|-2, ord(g)-2 for g in pm_support(U), and |V|-2 for the given
// atom lengths, zero terms skipped. 0 when every term vanishes.
std::int64_t divisor_constraints(const Sequence& u, std::span<const std::int64_t> atom_lengths);

struct Lemma31Certificate {
    enum class Kind { Basis, Relation };
    Kind kind = Kind::Basis;
    std::vector<Index> tuple;  // independent, from supp(U)
    Index g = 0;               // Relation only
    std::int64_t a = 0;
    std::vector<std::int64_t> k;  // a*g = sum k_i e_i
};

bool lemma31_applicable(const GroupSpec& group);
std::optional<Lemma31Certificate> lemma31_check(const Sequence& u);
bool check_lemma31_certificate(const Sequence& u, const Lemma31Certificate& c);

// Two factorizations of one zero-sum sequence, as explicit atoms.
struct FactorizationPair {
    std::vector<std::pair<Sequence, std::int64_t>> left, right;
    std::int64_t difference() const;
};

FactorizationPair to_factorization_pair(const AtomMatrix& m, const Witness& w);

// Re-checks atoms and products using the sequence module only.
bool check_factorization_pair(const FactorizationPair& f, std::int64_t expected_difference);

enum class FastPath { Divisor, Lemma31, Kernel };
std::string to_string(FastPath f);

struct AtomRecord {
    Sequence atom{GroupSpec()};
    FastPath fast_path = FastPath::Kernel;
    Verdict status = Verdict::Inconclusive;
    std::optional<std::int64_t> min_delta;  // unset with half_factorial or Inconclusive
    bool half_factorial = false;
    std::int64_t divisor_bound = 0;         // g*
    std::optional<Lemma31Certificate> certificate;
    std::optional<std::int64_t> kernel_gcd;
    std::optional<FactorizationPair> witness;
    std::optional<bool> audit_agrees;       // set when a fast path was audited
    std::optional<bool> observations_hold;  // d | |V|-2 and d | ord(g)-2, on Fails
    std::optional<std::int64_t> bruteforce_min_delta;
    std::int64_t support_atoms = 0;         // |A(G0)| when enumerated
    std::string note;
};

struct VerifyOptions {
    EnumerationBudget budget;
    bool audit = false;
    bool negation_dedup = true;
    bool bruteforce_fallback = false;
    std::int64_t bruteforce_bound = 12;
    const AtomCache* cache = nullptr;
};

struct VerificationReport {
    GroupSpec group;
    std::int64_t davenport = 0;
    bool davenport_exact = false;
    std::string davenport_source;  // "d_star" or "search"
    std::int64_t d_star = 0;
    CaseClassification classification;
    std::int64_t max_atoms_total = 0;
    bool max_atoms_complete = false;
    std::vector<AtomRecord> per_atom;
    Verdict overall = Verdict::Inconclusive;
    std::int64_t nodes = 0;
    std::string note;

    // Largest d over Fails atoms, 0 for half-factorial only; unset if none.
    std::optional<std::int64_t> worst_d() const;
};

VerificationReport verify_conjecture(const GroupSpec& group, const VerifyOptions& options);

struct Remark24Record {
    std::int64_t p = 0, r = 0, k = 0;
    GroupSpec group;
    Sequence u{GroupSpec()};
    bool u_is_atom = false;
    std::int64_t u_length = 0;
    std::int64_t d_star = 0;
    std::optional<std::int64_t> davenport;  // by search, if it finished
    std::vector<std::int64_t> lengths;      // L(A_k)
    std::int64_t min_l = 0, max_l = 0;
    bool gap_at_2k_plus_1 = false;
    Rational rho;
    std::int64_t spot_checked = 0;     // nonzero g tested
    std::int64_t spot_in_max_atom = 0; // ... found in supp of a max atom
    Verdict status = Verdict::Inconclusive;
    std::string note;
};

Remark24Record remark24_suite(std::int64_t p, std::int64_t r, std::int64_t k, const EnumerationBudget& budget);

struct SweepEntry {
    std::string group;
    std::int64_t davenport = 0;
    std::int64_t d_star = 0;
    std::string classification;
    Verdict overall = Verdict::Inconclusive;
    std::optional<std::int64_t> worst_d;
    std::string error;
    bool resumed = false;
};

nlohmann::json to_json(const SweepEntry& e);
SweepEntry sweep_entry_from_json(const nlohmann::json& j);
SweepEntry summarize(const VerificationReport& r);

// Runs verify_conjecture per group, isolating failures. With a state file,
// each finished group is appended as one JSON line tagged with `tag`, and
// groups already present with the same tag are not re-run.
std::vector<SweepEntry> sweep(const std::vector<GroupSpec>& groups, const VerifyOptions& options,
                              const std::optional<std::filesystem::path>& state_file = std::nullopt,
                              const std::string& tag = "",
                              const std::function<void(const VerificationReport&)>& on_report = {});

}  // namespace zs
