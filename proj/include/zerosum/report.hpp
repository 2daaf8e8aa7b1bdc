#pragma once

#include "zerosum/verifier.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace zs {

struct RunConfig {
    std::string command;
    std::vector<std::string> groups;  // as typed
    std::string support;              // atoms / min-delta
    std::string family;               // sweep
    std::int64_t max_nodes = 10'000'000;
    std::optional<double> budget_seconds;
    std::optional<std::int64_t> max_atoms;
    std::optional<std::int64_t> max_length;
    std::optional<std::int64_t> bruteforce_bound;
    std::int64_t p = 5, r = 2, k = 1;  // remark24
    bool audit = false;
    bool negation_dedup = true;
    std::string cache_dir;
    std::string out = "reports";
    int workers = 1;
    std::string format = "text";

    nlohmann::json to_json() const;
    // Hash of the fields that can change a result (not out/format/workers).
    std::string hash() const;
    EnumerationBudget budget() const;
};

nlohmann::json to_json(const CaseClassification& c);
nlohmann::json to_json(const GroupSpec& g, const Lemma31Certificate& c);
nlohmann::json to_json(const FactorizationPair& f);
nlohmann::json to_json(const AtomRecord& r);
nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const Remark24Record& r);
nlohmann::json to_json(const DavenportResult& d);
nlohmann::json to_json(const AtomSet& a);
nlohmann::json to_json(const MinDeltaResult& m);
nlohmann::json group_info(const GroupSpec& g);

// {tool, command, config, config_hash, timestamp, result}
nlohmann::json make_document(const RunConfig& cfg, nlohmann::json result, const std::string& timestamp);
std::string utc_timestamp();

std::string report_file_name(const std::string& group, const std::string& command, const std::string& hash,
                             const std::string& extension = "json");
// Atomic write of `text` to dir/name; returns the path.
std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name, const std::string& text);

// Human-readable summary built only from a report document.
std::string render_text(const nlohmann::json& doc);
std::string summary_csv_header();
std::string summary_csv_row(const SweepEntry& e);

// "order<=N", "<template> for <var> in a..b", or a ';'-separated list.
std::vector<GroupSpec> parse_family(std::string_view spec);
// All groups of order <= n by invariant factors, optionally without the
// cyclic and elementary 2-groups.
std::vector<GroupSpec> groups_up_to_order(std::int64_t n, bool skip_excluded);

}  // namespace zs
