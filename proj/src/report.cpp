#include "zerosum/report.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

namespace zs {

using nlohmann::json;

namespace {

template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

std::string element_text(const GroupSpec& g, Index c) { return GroupElement(g, c).to_string(); }

json codes_json(const GroupSpec& g, std::span<const Index> codes) {
    auto a = json::array();
    for (Index c : codes) a.push_back(element_text(g, c));
    return a;
}

}  // namespace

json RunConfig::to_json() const {
    return json{{"command", command},
                {"groups", groups},
                {"support", support},
                {"family", family},
                {"max_nodes", max_nodes},
                {"budget_seconds", opt(budget_seconds)},
                {"max_atoms", opt(max_atoms)},
                {"max_length", opt(max_length)},
                {"bruteforce_bound", opt(bruteforce_bound)},
                {"p", p},
                {"r", r},
                {"k", k},
                {"audit", audit},
                {"negation_dedup", negation_dedup},
                {"cache_dir", cache_dir},
                {"out", out},
                {"workers", workers},
                {"format", format}};
}

std::string RunConfig::hash() const {
    auto j = to_json();
    j.erase("out");
    j.erase("format");
    j.erase("workers");
    return hex64(fnv1a64(j.dump())).substr(0, 12);
}

EnumerationBudget RunConfig::budget() const {
    EnumerationBudget b;
    b.max_nodes = max_nodes;
    b.time_budget = budget_seconds;
    b.max_atoms = max_atoms;
    b.max_length = max_length;
    b.workers = workers;
    return b;
}

json to_json(const CaseClassification& c) {
    json j;
    j["excluded"] = opt(c.excluded);
    auto& cases = j["cases"] = json::array();
    for (const auto& cc : c.cases) cases.push_back({{"case", cc.name}, {"params", cc.params}});
    j["needs_davenport"] = c.needs_davenport;
    j["davenport"] = opt(c.davenport);
    j["summary"] = c.summary();
    return j;
}

json to_json(const GroupSpec& g, const Lemma31Certificate& c) {
    json j{{"kind", c.kind == Lemma31Certificate::Kind::Basis ? "basis" : "relation"},
           {"tuple", codes_json(g, c.tuple)}};
    if (c.kind == Lemma31Certificate::Kind::Relation) {
        j["g"] = element_text(g, c.g);
        j["a"] = c.a;
        j["k"] = c.k;
    }
    return j;
}

json to_json(const FactorizationPair& f) {
    auto side = [](const auto& s) {
        auto a = json::array();
        for (const auto& [atom, m] : s) a.push_back({{"atom", atom.to_string()}, {"mult", m}});
        return a;
    };
    std::int64_t l = 0, r = 0;
    for (const auto& x : f.left) l += x.second;
    for (const auto& x : f.right) r += x.second;
    return json{{"left", side(f.left)},
                {"right", side(f.right)},
                {"left_length", l},
                {"right_length", r},
                {"difference", f.difference()}};
}

json to_json(const AtomRecord& r) {
    json j{{"U", r.atom.to_string()},
           {"fast_path", to_string(r.fast_path)},
           {"status", to_string(r.status)},
           {"divisor_bound", r.divisor_bound},
           {"support_atoms", r.support_atoms}};
    j["min_delta"] = r.half_factorial ? json("half_factorial") : opt(r.min_delta);
    j["kernel_gcd"] = opt(r.kernel_gcd);
    j["certificate"] = r.certificate ? to_json(r.atom.group(), *r.certificate) : json(nullptr);
    j["witness"] = r.witness ? to_json(*r.witness) : json(nullptr);
    j["audit_agrees"] = opt(r.audit_agrees);
    j["observations_hold"] = opt(r.observations_hold);
    j["bruteforce_min_delta"] = opt(r.bruteforce_min_delta);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

json to_json(const VerificationReport& r) {
    json j{{"group", r.group.to_string()},
           {"invariant_factors", r.group.factors()},
           {"davenport", r.davenport},
           {"davenport_exact", r.davenport_exact},
           {"davenport_source", r.davenport_source},
           {"d_star", r.d_star},
           {"classification", to_json(r.classification)},
           {"max_atoms_total", r.max_atoms_total},
           {"max_atoms_complete", r.max_atoms_complete},
           {"overall", to_string(r.overall)},
           {"worst_d", opt(r.worst_d())},
           {"claim", "min Delta(supp((-U)U)) = 1 for every atom U with |U| = D(G)"}};
    std::map<std::string, std::int64_t> paths;
    for (const auto& a : r.per_atom) ++paths[to_string(a.fast_path)];
    j["fast_path_counts"] = paths;
    auto& per = j["per_atom"] = json::array();
    for (const auto& a : r.per_atom) per.push_back(to_json(a));
    j["resources"] = {{"nodes", r.nodes}};
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

json to_json(const Remark24Record& r) {
    return json{{"p", r.p},
                {"r", r.r},
                {"k", r.k},
                {"group", r.group.to_string()},
                {"U", r.u.to_string()},
                {"U_is_atom", r.u_is_atom},
                {"U_length", r.u_length},
                {"d_star", r.d_star},
                {"davenport", opt(r.davenport)},
                {"lengths", r.lengths},
                {"min_L", r.min_l},
                {"max_L", r.max_l},
                {"gap_at_2k_plus_1", r.gap_at_2k_plus_1},
                {"rho", r.rho.to_string()},
                {"spot_checked", r.spot_checked},
                {"spot_in_max_atom", r.spot_in_max_atom},
                {"status", to_string(r.status)},
                {"note", r.note}};
}

json to_json(const DavenportResult& d) {
    return json{{"davenport", d.value},
                {"exact", d.exact},
                {"witness_zero_sum_free", d.witness.to_string()},
                {"resources", {{"nodes", d.budget_used.nodes}, {"cap_hit", d.budget_used.cap_hit}}}};
}

json to_json(const AtomSet& a) {
    auto atoms = json::array();
    for (const auto& s : a.atoms) atoms.push_back(s.to_string());
    return json{{"group", a.group.to_string()},
                {"support", codes_json(a.group, a.support)},
                {"max_length", opt(a.max_length)},
                {"complete", a.complete},
                {"count", a.atoms.size()},
                {"atoms", atoms},
                {"resources", {{"nodes", a.budget_used.nodes}, {"cap_hit", a.budget_used.cap_hit}}}};
}

json to_json(const MinDeltaResult& m) {
    json j{{"status", to_string(m.status)},
           {"distances", m.distances},
           {"zero_sum_elements", m.zero_sum_elements}};
    j["min_delta"] = m.witness ? json(m.min_delta) : json(nullptr);
    j["witness"] = m.witness ? json(m.witness->to_string()) : json(nullptr);
    j["witness_lengths"] = m.witness ? json({m.witness_lengths.first, m.witness_lengths.second}) : json(nullptr);
    return j;
}

json group_info(const GroupSpec& g) {
    json pr = json::object();
    for (auto p : prime_divisors(g.order())) pr[std::to_string(p)] = g.p_rank(p);
    std::string excluded;
    if (g.is_cyclic()) excluded = "cyclic";
    else if (g.is_elementary_2_group()) excluded = "elementary 2-group";
    return json{{"group", g.to_string()},
                {"invariant_factors", g.factors()},
                {"order", g.order()},
                {"exponent", g.exponent()},
                {"rank", g.rank()},
                {"p_ranks", pr},
                {"d_star", g.d_star()},
                {"p_group", opt(g.p_group_prime())},
                {"excluded", excluded.empty() ? json(nullptr) : json(excluded)}};
}

std::string utc_timestamp() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json make_document(const RunConfig& cfg, json result, const std::string& timestamp) {
    return json{{"tool", "zerosum"},
                {"command", cfg.command},
                {"config", cfg.to_json()},
                {"config_hash", cfg.hash()},
                {"timestamp", timestamp},
                {"result", std::move(result)}};
}

std::string report_file_name(const std::string& group, const std::string& command, const std::string& hash,
                             const std::string& extension) {
    std::string safe;
    for (char c : group) safe += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return safe + "_" + command + "_" + hash + "." + extension;
}

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    const auto tmp = dir / (name + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot write " + tmp.string());
        os << text;
        if (!os) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
    return path;
}

namespace {

std::string scalar(const json& v) {
    if (v.is_null()) return "-";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

}  // namespace

std::string render_text(const json& doc) {
    std::ostringstream os;
    const auto& cmd = doc.at("command").get_ref<const std::string&>();
    const auto& r = doc.at("result");
    if (cmd == "info") {
        os << "group      " << scalar(r["group"]) << "\n"
           << "factors    " << r["invariant_factors"].dump() << "\n"
           << "order      " << scalar(r["order"]) << "\n"
           << "exponent   " << scalar(r["exponent"]) << "\n"
           << "rank       " << scalar(r["rank"]) << "\n"
           << "p-ranks    " << r["p_ranks"].dump() << "\n"
           << "D*         " << scalar(r["d_star"]) << "\n"
           << "excluded   " << scalar(r["excluded"]) << "\n";
    } else if (cmd == "davenport") {
        os << scalar(r["group"]) << ": D = " << scalar(r["davenport"]) << (r["exact"].get<bool>() ? "" : " (lower bound)")
           << "\nzero-sum free witness " << scalar(r["witness_zero_sum_free"]) << "\n";
    } else if (cmd == "atoms") {
        os << scalar(r["group"]) << ": " << scalar(r["count"]) << " atoms over " << r["support"].size()
           << " elements" << (r["complete"].get<bool>() ? "" : " (incomplete)") << "\n";
        for (const auto& a : r["atoms"]) os << "  " << scalar(a) << "\n";
    } else if (cmd == "min-delta") {
        os << scalar(r["group"]) << " support " << r["support"].dump() << "\n"
           << "atoms " << scalar(r["atom_count"]) << (r["complete"].get<bool>() ? "" : " (incomplete)")
           << ", kernel gcd " << scalar(r["kernel_gcd"]) << "\n";
        if (!r["witness"].is_null())
            os << "witness lengths " << scalar(r["witness"]["left_length"]) << " vs "
               << scalar(r["witness"]["right_length"]) << "\n";
        if (r.contains("bruteforce")) os << "brute force min gap " << scalar(r["bruteforce"]["min_delta"]) << "\n";
    } else if (cmd == "verify") {
        os << scalar(r["group"]) << ": D = " << scalar(r["davenport"]) << " (" << scalar(r["davenport_source"])
           << "), D* = " << scalar(r["d_star"]) << "\n"
           << "cases      " << scalar(r["classification"]["summary"]) << "\n"
           << "max atoms  " << scalar(r["max_atoms_total"]) << (r["max_atoms_complete"].get<bool>() ? "" : " (incomplete)")
           << "\n"
           << "paths      " << r["fast_path_counts"].dump() << "\n"
           << "overall    " << scalar(r["overall"]) << "\n";
        if (!r["worst_d"].is_null()) os << "worst d    " << scalar(r["worst_d"]) << "\n";
        for (const auto& a : r["per_atom"])
            if (a["status"] != "Holds")
                os << "  " << scalar(a["U"]) << " " << scalar(a["status"]) << " min_delta=" << scalar(a["min_delta"])
                   << "\n";
        if (r.contains("note")) os << "note       " << scalar(r["note"]) << "\n";
    } else if (cmd == "sweep") {
        os << summary_csv_header();
        for (const auto& e : r["entries"]) os << summary_csv_row(sweep_entry_from_json(e));
    } else if (cmd == "remark24") {
        os << scalar(r["group"]) << " U = " << scalar(r["U"]) << " atom=" << scalar(r["U_is_atom"])
           << " |U|=" << scalar(r["U_length"]) << "\n"
           << "L(A_k) = " << r["lengths"].dump() << "\n"
           << "min " << scalar(r["min_L"]) << ", max " << scalar(r["max_L"]) << ", 2k+1 missing "
           << scalar(r["gap_at_2k_plus_1"]) << ", rho " << scalar(r["rho"]) << "\n"
           << "status " << scalar(r["status"]) << "\n";
    } else {
        os << r.dump(2) << "\n";
    }
    return os.str();
}

std::string summary_csv_header() { return "group,D,D_star,classification,overall,worst_d\n"; }

std::string summary_csv_row(const SweepEntry& e) {
    std::string cls = e.classification;
    if (cls.find(',') != std::string::npos) cls = "\"" + cls + "\"";
    return e.group + "," + std::to_string(e.davenport) + "," + std::to_string(e.d_star) + "," + cls + "," +
           (e.error.empty() ? to_string(e.overall) : "Error") + "," + (e.worst_d ? std::to_string(*e.worst_d) : "") +
           "\n";
}

namespace {

void chains(std::int64_t remaining, std::int64_t last, std::vector<std::int64_t>& cur,
            std::vector<std::vector<std::int64_t>>& out) {
    if (remaining == 1) {
        out.push_back(cur);
        return;
    }
    for (std::int64_t f = last; f <= remaining; f += last) {
        if (f < 2 || remaining % f != 0) continue;
        const auto rest = remaining / f;
        if (rest != 1 && rest % f != 0) continue;
        cur.push_back(f);
        chains(rest, f, cur, out);
        cur.pop_back();
    }
}

std::string trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\n");
    if (a == std::string_view::npos) return "";
    const auto b = s.find_last_not_of(" \t\n");
    return std::string(s.substr(a, b - a + 1));
}

}  // namespace

std::vector<GroupSpec> groups_up_to_order(std::int64_t n, bool skip_excluded) {
    std::vector<GroupSpec> out;
    for (std::int64_t order = 2; order <= n; ++order) {
        std::vector<std::vector<std::int64_t>> found;
        std::vector<std::int64_t> cur;
        chains(order, 1, cur, found);
        std::sort(found.begin(), found.end());
        for (auto& f : found) {
            auto g = GroupSpec::from_invariant_factors(f);
            if (skip_excluded && (g.is_cyclic() || g.is_elementary_2_group())) continue;
            out.push_back(g);
        }
    }
    return out;
}

std::vector<GroupSpec> parse_family(std::string_view spec) {
    const auto s = trim(spec);
    if (s.empty()) return {};
    if (s.rfind("order<=", 0) == 0) {
        std::int64_t n = 0;
        try {
            std::size_t used = 0;
            n = std::stoll(s.substr(7), &used);
            if (used != s.size() - 7) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("bad family '" + s + "': expected order<=N");
        }
        return groups_up_to_order(n, true);
    }
    if (const auto pos = s.find(" for "); pos != std::string::npos) {
        const auto tmpl = trim(s.substr(0, pos));
        std::istringstream rest(s.substr(pos + 5));
        std::string var, in, range;
        rest >> var >> in >> range;
        const auto dots = range.find("..");
        if (var.size() != 1 || in != "in" || dots == std::string::npos)
            throw ParseError("bad family '" + s + "': expected '<template> for <var> in a..b'");
        std::int64_t a = 0, b = 0;
        try {
            a = std::stoll(range.substr(0, dots));
            b = std::stoll(range.substr(dots + 2));
        } catch (const std::exception&) {
            throw ParseError("bad range '" + range + "'");
        }
        std::vector<GroupSpec> out;
        for (auto v = a; v <= b; ++v) {
            std::string t;
            for (char c : tmpl) t += c == var[0] ? std::to_string(v) : std::string(1, c);
            out.push_back(parse_group(t));
        }
        return out;
    }
    std::vector<GroupSpec> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ';');) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_group(item));
    }
    return out;
}

}  // namespace zs
