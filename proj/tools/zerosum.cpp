#include "zerosum/report.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <memory>

using namespace zs;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kUsage = 1, kFails = 2, kInconclusive = 3;

int exit_code(Verdict v) {
    switch (v) {
    case Verdict::Holds: return kOk;
    case Verdict::Fails: return kFails;
    case Verdict::Inconclusive: return kInconclusive;
    }
    return kUsage;
}

struct Outcome {
    std::string label;  // file name stem
    json result;
    int code = kOk;
    std::vector<std::pair<std::string, std::string>> extra_files;  // (name, text)
};

std::string flat_csv(const json& r) {
    std::string head, row;
    for (auto it = r.begin(); it != r.end(); ++it) {
        if (it.value().is_structured()) continue;
        head += (head.empty() ? "" : ",") + it.key();
        auto v = it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
        if (v.find_first_of(",\"") != std::string::npos) {
            std::string q;
            for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
            v = "\"" + q + "\"";
        }
        row += (row.empty() ? "" : ",") + v;
    }
    return head + "\n" + row + "\n";
}

GroupSpec single_group(const RunConfig& cfg) {
    if (cfg.groups.size() != 1) throw PreconditionViolated("exactly one --group is required");
    return parse_group(cfg.groups.front());
}

std::vector<Index> support_codes(const GroupSpec& g, const std::string& text) {
    std::vector<Index> codes;
    if (text.empty()) {
        for (Index c = 0; c < static_cast<Index>(g.order()); ++c) codes.push_back(c);
        return codes;
    }
    for (const auto& e : parse_element_set(g, text)) codes.push_back(e.code());
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    return codes;
}

VerifyOptions verify_options(const RunConfig& cfg, const AtomCache* cache) {
    VerifyOptions o;
    o.budget = cfg.budget();
    o.budget.max_length.reset();
    o.audit = cfg.audit;
    o.negation_dedup = cfg.negation_dedup;
    o.cache = cache;
    if (cfg.bruteforce_bound) {
        o.bruteforce_fallback = true;
        o.bruteforce_bound = *cfg.bruteforce_bound;
    }
    return o;
}

Outcome run(const RunConfig& cfg, const AtomCache* cache) {
    Outcome out;
    const auto& c = cfg.command;
    if (c == "info") {
        const auto g = single_group(cfg);
        out.label = g.to_string();
        out.result = group_info(g);
    } else if (c == "davenport") {
        const auto g = single_group(cfg);
        out.label = g.to_string();
        const auto d = davenport(g, cfg.budget());
        out.result = to_json(d);
        out.result["group"] = g.to_string();
        out.result["d_star"] = g.d_star();
        out.code = d.exact ? kOk : kInconclusive;
    } else if (c == "atoms") {
        const auto g = single_group(cfg);
        out.label = g.to_string();
        const auto s = support_codes(g, cfg.support);
        const auto a = enumerate_atoms_cached(g, s, cfg.budget(), cache);
        out.result = to_json(a);
        out.code = a.complete ? kOk : kInconclusive;
    } else if (c == "min-delta") {
        const auto g = single_group(cfg);
        out.label = g.to_string();
        const auto s = support_codes(g, cfg.support);
        auto b = cfg.budget();
        b.max_length.reset();
        const auto a = enumerate_atoms_cached(g, s, b, cache);
        json r{{"group", g.to_string()}, {"support", to_json(a)["support"]}, {"atom_count", a.atoms.size()},
               {"complete", a.covers_all_atoms()}, {"kernel_gcd", nullptr}, {"witness", nullptr}};
        out.code = kInconclusive;
        if (a.covers_all_atoms()) {
            const auto m = build_atom_matrix(a);
            const auto k = integer_kernel(m);
            const auto d = kernel_sum_gcd(k);
            r["kernel_gcd"] = d;
            r["half_factorial"] = d == 0;
            r["kernel"] = to_json(k);
            if (d > 0) {
                const auto w = d == 1 ? *distance_one_witness(m, k) : general_distance_witness(m, k, d);
                const auto f = to_factorization_pair(m, w);
                if (!check_factorization_pair(f, d)) throw std::logic_error("witness failed re-verification");
                r["witness"] = to_json(f);
            }
            out.code = kOk;
        }
        if (cfg.bruteforce_bound) {
            const auto bf = min_delta_bruteforce(g, s, *cfg.bruteforce_bound, cfg.max_nodes);
            r["bruteforce"] = to_json(bf);
            r["bruteforce"]["bound"] = *cfg.bruteforce_bound;
        }
        r["resources"] = {{"nodes", a.budget_used.nodes}, {"cap_hit", a.budget_used.cap_hit}};
        out.result = r;
    } else if (c == "verify") {
        const auto g = single_group(cfg);
        out.label = g.to_string();
        const auto rep = verify_conjecture(g, verify_options(cfg, cache));
        out.result = to_json(rep);
        out.code = exit_code(rep.overall);
    } else if (c == "sweep") {
        std::vector<GroupSpec> groups;
        if (!cfg.family.empty()) groups = parse_family(cfg.family);
        for (const auto& s : cfg.groups) groups.push_back(parse_group(s));
        out.label = "sweep";
        const auto state = std::filesystem::path(cfg.out) / report_file_name("sweep", "state", cfg.hash(), "jsonl");
        std::filesystem::create_directories(cfg.out);
        const auto ts = utc_timestamp();
        const auto entries = sweep(groups, verify_options(cfg, cache), state, cfg.hash(), [&](const VerificationReport& r) {
            RunConfig per = cfg;
            per.command = "verify";
            per.groups = {r.group.to_string()};
            per.family.clear();
            write_file(cfg.out, report_file_name(r.group.to_string(), "verify", per.hash()),
                       make_document(per, to_json(r), ts).dump(2) + "\n");
        });
        json list = json::array();
        std::string csv = summary_csv_header();
        bool fails = false, inconclusive = false;
        for (const auto& e : entries) {
            list.push_back(to_json(e));
            csv += summary_csv_row(e);
            fails = fails || e.overall == Verdict::Fails;
            inconclusive = inconclusive || e.overall == Verdict::Inconclusive;
        }
        out.result = {{"family", cfg.family}, {"count", entries.size()}, {"entries", list}};
        out.extra_files.emplace_back(report_file_name("sweep", "summary", cfg.hash(), "csv"), csv);
        out.code = inconclusive ? kInconclusive : fails ? kFails : kOk;
    } else if (c == "remark24") {
        const auto r = remark24_suite(cfg.p, cfg.r, cfg.k, cfg.budget());
        out.label = r.group.to_string();
        out.result = to_json(r);
        out.code = exit_code(r.status);
    } else {
        throw PreconditionViolated("unknown command " + c);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-sum sequences, Davenport constants and minimal distances over finite abelian groups"};
    app.require_subcommand(1);
    RunConfig cfg;
    double seconds = 0;
    std::int64_t max_atoms = 0, max_length = 0, bf = 0;
    bool no_neg_dedup = false;

    auto common = [&](CLI::App* s, bool with_group) {
        if (with_group) s->add_option("-g,--group", cfg.groups, "group, e.g. C2xC6, 4,6 or C2^3");
        s->add_option("--budget-seconds", seconds, "wall-clock budget per search");
        s->add_option("--max-nodes", cfg.max_nodes, "search node budget")->capture_default_str();
        s->add_option("--max-atoms", max_atoms, "stop after this many atoms");
        s->add_flag("--audit", cfg.audit, "run the kernel path even when a fast path succeeds");
        s->add_flag("--no-neg-dedup", no_neg_dedup, "keep both U and -U");
        s->add_option("--cache-dir", cfg.cache_dir, "atom cache directory");
        s->add_option("--out", cfg.out, "report directory")->capture_default_str();
        s->add_option("--workers", cfg.workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
        s->add_option("--format", cfg.format, "console format")
            ->check(CLI::IsMember({"json", "csv", "text"}))
            ->capture_default_str();
    };

    auto* info = app.add_subcommand("info", "structure summary of a group");
    common(info, true);
    auto* dav = app.add_subcommand("davenport", "exact Davenport constant with a witness");
    common(dav, true);
    auto* atoms = app.add_subcommand("atoms", "list atoms over a support");
    common(atoms, true);
    atoms->add_option("--support", cfg.support, "elements, e.g. \"(1,0),(0,1)\"; default all of G");
    atoms->add_option("--max-length", max_length, "longest atom to list");
    auto* md = app.add_subcommand("min-delta", "kernel gcd and witness over a support");
    common(md, true);
    md->add_option("--support", cfg.support, "elements, e.g. \"(1,0),(0,1)\"")->required();
    md->add_option("--bruteforce", bf, "also run the brute-force length search up to this |B|");
    auto* ver = app.add_subcommand("verify", "check every max atom of a group");
    common(ver, true);
    ver->add_option("--bruteforce", bf, "cross-check gcd != 1 supports by brute force up to this |B|");
    auto* sw = app.add_subcommand("sweep", "verify a family of groups");
    common(sw, true);
    sw->add_option("--family", cfg.family, "\"order<=N\", \"C2^r x C6 for r in 1..4\" or \"C3xC3; C7\"");
    auto* rk = app.add_subcommand("remark24", "the (-U)^k U^k construction over C_p^r");
    common(rk, false);
    rk->add_option("--p", cfg.p)->capture_default_str();
    rk->add_option("--r", cfg.r)->capture_default_str();
    rk->add_option("--k", cfg.k)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    if (seconds > 0) cfg.budget_seconds = seconds;
    if (max_atoms > 0) cfg.max_atoms = max_atoms;
    if (max_length > 0) cfg.max_length = max_length;
    if (bf > 0) cfg.bruteforce_bound = bf;
    cfg.negation_dedup = !no_neg_dedup;

    try {
        std::unique_ptr<AtomCache> cache;
        if (!cfg.cache_dir.empty()) cache = std::make_unique<AtomCache>(cfg.cache_dir);
        auto out = run(cfg, cache.get());
        const auto doc = make_document(cfg, out.result, utc_timestamp());
        const auto path =
            write_file(cfg.out, report_file_name(out.label, cfg.command, cfg.hash()), doc.dump(2) + "\n");
        for (const auto& [name, text] : out.extra_files) write_file(cfg.out, name, text);
        if (cfg.format == "json") {
            std::cout << doc.dump(2) << "\n";
        } else if (cfg.format == "csv") {
            if (cfg.command == "sweep" && !out.extra_files.empty())
                std::cout << out.extra_files.front().second;
            else if (cfg.command == "verify")
                std::cout << summary_csv_header() << summary_csv_row(sweep_entry_from_json(
                                                         json{{"group", out.result["group"]},
                                                              {"D", out.result["davenport"]},
                                                              {"D_star", out.result["d_star"]},
                                                              {"classification", out.result["classification"]["summary"]},
                                                              {"overall", out.result["overall"]},
                                                              {"worst_d", out.result["worst_d"]}}));
            else
                std::cout << flat_csv(out.result);
        } else {
            std::cout << render_text(doc) << "report " << path.string() << "\n";
        }
        return out.code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kUsage;
    }
}
