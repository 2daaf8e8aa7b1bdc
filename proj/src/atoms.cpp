#include "zerosum/atoms.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace zs {

namespace {

using Clock = std::chrono::steady_clock;

enum class Cap : int { None = 0, Nodes, Atoms, Time };

const char* cap_name(Cap c) {
    switch (c) {
    case Cap::Nodes: return "nodes";
    case Cap::Atoms: return "atoms";
    case Cap::Time: return "time";
    default: return "";
    }
}

// Counters and stop flag shared by all workers of one search.
class SearchControl {
public:
    explicit SearchControl(const EnumerationBudget& b) : max_nodes_(b.max_nodes), max_atoms_(b.max_atoms) {
        if (b.time_budget)
            deadline_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(*b.time_budget));
    }

    bool tick() {
        const auto n = nodes_.fetch_add(1, std::memory_order_relaxed) + 1;
        if (n > max_nodes_) halt(Cap::Nodes);
        if (deadline_ && (n & 1023) == 0 && Clock::now() > *deadline_) halt(Cap::Time);
        return !stopped();
    }
    // Reserves one emission slot; false once the atom cap is exhausted.
    bool claim_atom() {
        if (!max_atoms_) return true;
        if (emitted_.fetch_add(1, std::memory_order_relaxed) + 1 > *max_atoms_) {
            halt(Cap::Atoms);
            return false;
        }
        return true;
    }
    bool stopped() const { return stop_.load(std::memory_order_relaxed); }
    void halt(Cap c) {
        int expected = 0;
        cap_.compare_exchange_strong(expected, static_cast<int>(c));
        stop_.store(true, std::memory_order_relaxed);
    }
    ResourceUsage usage() const {
        return {std::min(nodes_.load(), max_nodes_), cap_name(static_cast<Cap>(cap_.load()))};
    }

private:
    std::int64_t max_nodes_;
    std::optional<std::int64_t> max_atoms_;
    std::optional<Clock::time_point> deadline_;
    std::atomic<std::int64_t> nodes_{0};
    std::atomic<std::int64_t> emitted_{0};
    std::atomic<bool> stop_{false};
    std::atomic<int> cap_{0};
};

// Depth-first search over non-decreasing zero-sum free sequences drawn from
// a sorted alphabet of nonzero elements. Subsequence sums are maintained
// incrementally; appending x keeps the prefix zero-sum free iff -x is not
// yet a subsequence sum. The visitor decides emission and pruning.
template <class Visitor>
class ZeroSumFreeDfs {
public:
    ZeroSumFreeDfs(const GroupSpec& group, std::span<const Index> alphabet, SearchControl& control,
                   Visitor& visitor, std::size_t max_depth)
        : group_(group), alphabet_(alphabet), control_(control), visitor_(visitor) {
        sums_.assign(max_depth + 2, ElementBitset(group.order()));
        prefix_.reserve(max_depth + 1);
    }

    // Visits the empty prefix only.
    void visit_root() {
        sums_[0].clear();
        prefix_.clear();
        sigma_ = 0;
        if (control_.tick()) visitor_.on_node(*this);
    }

    // Explores the subtree whose first term is alphabet[first].
    void explore_branch(std::size_t first) {
        sums_[0].clear();
        prefix_.clear();
        sigma_ = 0;
        descend(0, first);
    }

    const std::vector<Index>& prefix() const { return prefix_; }
    Index sigma() const { return sigma_; }
    const ElementBitset& sums() const { return sums_[prefix_.size()]; }
    const GroupSpec& group() const { return group_; }

private:
    void descend(std::size_t depth, std::size_t pos) {
        const Index x = alphabet_[pos];
        if (sums_[depth].test(group_.neg(x))) return;
        extend_subsums(group_, sums_[depth], x, sums_[depth + 1]);
        if (!visitor_.admit_child(depth + 1, sums_[depth + 1].count())) return;
        prefix_.push_back(x);
        const Index saved = sigma_;
        sigma_ = group_.add(sigma_, x);
        visit(depth + 1, pos);
        sigma_ = saved;
        prefix_.pop_back();
    }

    void visit(std::size_t depth, std::size_t start) {
        if (!control_.tick()) return;
        if (!visitor_.on_node(*this)) return;
        for (std::size_t p = start; p < alphabet_.size() && !control_.stopped(); ++p) descend(depth, p);
    }

    const GroupSpec& group_;
    std::span<const Index> alphabet_;
    SearchControl& control_;
    Visitor& visitor_;
    std::vector<ElementBitset> sums_;
    std::vector<Index> prefix_;
    Index sigma_ = 0;
};

// Runs the root on the calling thread, then hands first-level branches to
// `workers` threads. Each worker owns a visitor built by make_visitor(branch
// output slot); results are merged by the caller in branch order.
template <class Visitor, class MakeVisitor>
void run_branches(const GroupSpec& group, std::span<const Index> alphabet, SearchControl& control,
                  std::size_t max_depth, int workers, MakeVisitor make_visitor) {
    {
        auto root = make_visitor(std::nullopt);
        ZeroSumFreeDfs<Visitor> dfs(group, alphabet, control, root, max_depth);
        dfs.visit_root();
        if (!root.extend_root()) return;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const auto b = next.fetch_add(1);
            if (b >= alphabet.size() || control.stopped()) return;
            auto v = make_visitor(b);
            ZeroSumFreeDfs<Visitor> dfs(group, alphabet, control, v, max_depth);
            dfs.explore_branch(b);
        }
    };
    const auto n = std::max(1, workers);
    if (n == 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
}

std::vector<Index> nonzero(std::span<const Index> support) {
    std::vector<Index> out;
    for (Index c : support)
        if (c != 0) out.push_back(c);
    return out;
}

Sequence with_closing_term(const GroupSpec& group, const std::vector<Index>& prefix, Index closing) {
    std::vector<Index> codes(prefix);
    codes.push_back(closing);
    return Sequence::from_codes(group, codes);
}

// Emits S c for every zero-sum free prefix S whose closing term c = -sigma(S)
// lies in G0 and is >= the last term, so each atom appears exactly once in
// its sorted form. Such S c is automatically minimal: S is zero-sum free.
struct AtomVisitor {
    const std::vector<char>* in_support;
    std::optional<std::int64_t> max_length;
    SearchControl* control;
    std::vector<Sequence>* out;

    bool extend_root() const { return !max_length || *max_length >= 2; }

    template <class Dfs>
    bool on_node(const Dfs& dfs) {
        const auto& prefix = dfs.prefix();
        const auto len = static_cast<std::int64_t>(prefix.size());
        const Index c = dfs.group().neg(dfs.sigma());
        if ((*in_support)[c] && (prefix.empty() || c >= prefix.back()) && (!max_length || len + 1 <= *max_length)) {
            if (!control->claim_atom()) return false;
            out->push_back(with_closing_term(dfs.group(), prefix, c));
        }
        return !max_length || len + 2 <= *max_length;
    }
    bool admit_child(std::size_t, std::int64_t) const { return true; }
};

// Zero-sum free sequences of exactly target-1 terms closed by -sigma.
struct MaxAtomVisitor {
    std::int64_t target;
    std::int64_t order;
    bool negation_dedup;
    SearchControl* control;
    std::vector<Sequence>* out;

    bool extend_root() const { return target >= 2; }

    template <class Dfs>
    bool on_node(const Dfs& dfs) {
        const auto& prefix = dfs.prefix();
        const auto len = static_cast<std::int64_t>(prefix.size());
        if (len + 1 < target) return true;
        const Index c = dfs.group().neg(dfs.sigma());
        if (len + 1 == target && (prefix.empty() || c >= prefix.back())) {
            auto u = with_closing_term(dfs.group(), prefix, c);
            if (!negation_dedup || !(negate(u) < u)) {
                if (!control->claim_atom()) return false;
                out->push_back(std::move(u));
            }
        }
        return false;
    }
    // Each further term adds a new subsequence sum, and zero is never one.
    bool admit_child(std::size_t depth, std::int64_t sums) const {
        return static_cast<std::int64_t>(depth) + (order - 1 - sums) >= target - 1;
    }
};

struct DavenportVisitor {
    std::int64_t order;
    std::atomic<std::int64_t>* best;  // longest zero-sum free length known
    std::vector<Index>* witness;

    bool extend_root() const { return true; }

    template <class Dfs>
    bool on_node(const Dfs& dfs) {
        const auto len = static_cast<std::int64_t>(dfs.prefix().size());
        auto cur = best->load();
        while (len > cur) {
            if (best->compare_exchange_weak(cur, len)) {
                *witness = dfs.prefix();
                break;
            }
        }
        return true;
    }
    bool admit_child(std::size_t depth, std::int64_t sums) const {
        return static_cast<std::int64_t>(depth) + (order - 1 - sums) > best->load();
    }
};

std::size_t depth_bound(const GroupSpec& group) { return static_cast<std::size_t>(group.order()); }

}  // namespace

AtomSet enumerate_atoms(const GroupSpec& group, std::span<const Index> support, const EnumerationBudget& budget) {
    AtomSet result{group, std::vector<Index>(support.begin(), support.end()), {}, budget.max_length, false, {}};
    std::sort(result.support.begin(), result.support.end());
    result.support.erase(std::unique(result.support.begin(), result.support.end()), result.support.end());
    std::vector<char> in_support(static_cast<std::size_t>(group.order()), 0);
    for (Index c : result.support) {
        if (c >= group.order()) throw PreconditionViolated("support element outside " + group.to_string());
        in_support[c] = 1;
    }
    const auto alphabet = nonzero(result.support);
    SearchControl control(budget);
    std::vector<Sequence> root_out;
    std::vector<std::vector<Sequence>> branch_out(alphabet.size());
    run_branches<AtomVisitor>(group, alphabet, control, depth_bound(group), budget.workers,
                              [&](std::optional<std::size_t> b) {
                                  return AtomVisitor{&in_support, budget.max_length, &control,
                                                     b ? &branch_out[*b] : &root_out};
                              });
    for (auto& v : branch_out) root_out.insert(root_out.end(), std::make_move_iterator(v.begin()),
                                               std::make_move_iterator(v.end()));
    std::sort(root_out.begin(), root_out.end());
    result.atoms = std::move(root_out);
    result.budget_used = control.usage();
    result.complete = result.budget_used.cap_hit.empty();
    return result;
}

DavenportResult davenport(const GroupSpec& group, const EnumerationBudget& budget) {
    // Incumbent: the zero-sum free sequence prod e_i^{n_i - 1} of length D*-1.
    std::vector<Index> incumbent;
    for (std::size_t i = 0; i < group.num_factors(); ++i) {
        std::vector<std::int64_t> e(group.num_factors(), 0);
        e[i] = 1;
        incumbent.insert(incumbent.end(), static_cast<std::size_t>(group.factors()[i] - 1), group.encode(e));
    }
    std::atomic<std::int64_t> best{static_cast<std::int64_t>(incumbent.size())};
    std::vector<Index> all;
    for (std::int64_t c = 1; c < group.order(); ++c) all.push_back(static_cast<Index>(c));

    SearchControl control(budget);
    std::mutex mu;
    std::vector<std::vector<Index>> found(all.size() + 1);
    run_branches<DavenportVisitor>(group, all, control, depth_bound(group), budget.workers,
                                   [&](std::optional<std::size_t> b) {
                                       return DavenportVisitor{group.order(), &best, &found[b ? *b : all.size()]};
                                   });
    std::vector<Index> witness = incumbent;
    for (auto& f : found)
        if (f.size() > witness.size()) witness = f;
    if (budget.workers > 1 && witness.size() > incumbent.size() && control.usage().cap_hit.empty()) {
        // Parallel pruning makes the recorded witness schedule-dependent;
        // a serial pass returns the first one in canonical DFS order.
        std::atomic<std::int64_t> target{static_cast<std::int64_t>(witness.size()) - 1};
        std::vector<Index> first;
        EnumerationBudget serial_budget;
        serial_budget.max_nodes = budget.max_nodes;
        SearchControl serial(serial_budget);
        run_branches<DavenportVisitor>(group, all, serial, depth_bound(group), 1, [&](std::optional<std::size_t>) {
            return DavenportVisitor{group.order(), &target, &first};
        });
        if (first.size() == witness.size()) witness = first;
    }

    DavenportResult r;
    r.budget_used = control.usage();
    r.exact = r.budget_used.cap_hit.empty();
    r.value = static_cast<std::int64_t>(witness.size()) + 1;
    r.witness = Sequence::from_codes(group, witness);
    return r;
}

AtomSet enumerate_max_atoms(const GroupSpec& group, const EnumerationBudget& budget, bool negation_dedup,
                            std::optional<std::int64_t> known_davenport) {
    std::vector<Index> all;
    for (std::int64_t c = 0; c < group.order(); ++c) all.push_back(static_cast<Index>(c));
    AtomSet result{group, all, {}, std::nullopt, false, {}};

    std::int64_t target = 0;
    ResourceUsage pre;
    if (known_davenport) {
        target = *known_davenport;
    } else {
        auto d = davenport(group, budget);
        pre = d.budget_used;
        if (!d.exact) {
            result.budget_used = pre;
            return result;
        }
        target = d.value;
    }
    result.max_length = target;

    const auto alphabet = nonzero(all);
    SearchControl control(budget);
    std::vector<Sequence> root_out;
    std::vector<std::vector<Sequence>> branch_out(alphabet.size());
    run_branches<MaxAtomVisitor>(group, alphabet, control, static_cast<std::size_t>(target), budget.workers,
                                 [&](std::optional<std::size_t> b) {
                                     return MaxAtomVisitor{target, group.order(), negation_dedup, &control,
                                                           b ? &branch_out[*b] : &root_out};
                                 });
    for (auto& v : branch_out) root_out.insert(root_out.end(), std::make_move_iterator(v.begin()),
                                               std::make_move_iterator(v.end()));
    std::sort(root_out.begin(), root_out.end());
    result.atoms = std::move(root_out);
    result.budget_used = control.usage();
    result.budget_used.nodes += pre.nodes;
    result.complete = result.budget_used.cap_hit.empty();
    return result;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 15];
    return s;
}

namespace {

std::string cache_key(const GroupSpec& group, std::span<const Index> support, std::optional<std::int64_t> max_length) {
    std::vector<Index> s(support.begin(), support.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    std::string key = group.to_string() + "|";
    for (Index c : s) key += std::to_string(c) + ",";
    key += "|" + (max_length ? std::to_string(*max_length) : std::string("inf"));
    return key;
}

}  // namespace

AtomCache::AtomCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path AtomCache::path_for(const GroupSpec& group, std::span<const Index> support,
                                          std::optional<std::int64_t> max_length) const {
    return dir_ / (group.to_string() + "_atoms_" + hex64(fnv1a64(cache_key(group, support, max_length))) + ".json");
}

std::optional<AtomSet> AtomCache::load(const GroupSpec& group, std::span<const Index> support,
                                       std::optional<std::int64_t> max_length) const {
    std::ifstream in(path_for(group, support, max_length));
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
        in >> j;
        const auto key = cache_key(group, support, max_length);
        if (j.at("key").get<std::string>() != key || j.at("checksum").get<std::string>() != hex64(fnv1a64(key)))
            return std::nullopt;
        AtomSet a{group, {}, {}, max_length, j.at("complete").get<bool>(), {}};
        a.support = j.at("support").get<std::vector<Index>>();
        a.budget_used.nodes = j.at("nodes").get<std::int64_t>();
        a.budget_used.cap_hit = j.at("cap_hit").get<std::string>();
        for (const auto& s : j.at("atoms")) a.atoms.push_back(parse_sequence(group, s.get<std::string>()));
        return a;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void AtomCache::store(const AtomSet& atoms) const {
    std::filesystem::create_directories(dir_);
    const auto key = cache_key(atoms.group, atoms.support, atoms.max_length);
    nlohmann::json j;
    j["key"] = key;
    j["checksum"] = hex64(fnv1a64(key));
    j["group"] = atoms.group.to_string();
    j["support"] = atoms.support;
    j["max_length"] = atoms.max_length ? nlohmann::json(*atoms.max_length) : nlohmann::json(nullptr);
    j["complete"] = atoms.complete;
    j["nodes"] = atoms.budget_used.nodes;
    j["cap_hit"] = atoms.budget_used.cap_hit;
    auto& list = j["atoms"] = nlohmann::json::array();
    for (const auto& a : atoms.atoms) list.push_back(a.to_string());
    const auto path = path_for(atoms.group, atoms.support, atoms.max_length);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        out << j.dump(1) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

AtomSet enumerate_atoms_cached(const GroupSpec& group, std::span<const Index> support,
                               const EnumerationBudget& budget, const AtomCache* cache) {
    if (cache) {
        if (auto hit = cache->load(group, support, budget.max_length); hit && hit->complete) return *hit;
    }
    auto fresh = enumerate_atoms(group, support, budget);
    if (cache) cache->store(fresh);
    return fresh;
}

}  // namespace zs
