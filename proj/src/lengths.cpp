#include "zerosum/lengths.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace zs {

Rational Rational::of(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("zero denominator");
    if (den < 0) num = -num, den = -den;
    const auto g = std::gcd(num, den);
    return {num / g, den / g};
}

std::string Rational::to_string() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::string to_string(SearchStatus s) {
    switch (s) {
    case SearchStatus::Found: return "found";
    case SearchStatus::NoDistance: return "no_distance";
    case SearchStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

using Counts = std::vector<std::uint8_t>;

std::string key_of(const Counts& c) { return std::string(c.begin(), c.end()); }

// Memoized L(.) over sub-multisets of a fixed B, counts indexed by position
// in supp(B).
class LengthEngine {
public:
    LengthEngine(const Sequence& b, const AtomSet& atoms, std::int64_t max_states)
        : max_states_(max_states) {
        if (!sigma(b).is_zero()) throw PreconditionViolated("set_of_lengths needs a zero-sum sequence");
        if (!atoms.covers_all_atoms()) throw PreconditionViolated("set_of_lengths needs a complete atom set");
        check_same_group(b.group(), atoms.group);
        for (const auto& t : b.terms()) {
            if (!std::binary_search(atoms.support.begin(), atoms.support.end(), t.element))
                throw PreconditionViolated("atom set does not cover supp(B)");
            if (t.mult > 255) throw PreconditionViolated("multiplicity above 255 is not supported");
            support_.push_back(t.element);
            root_.push_back(static_cast<std::uint8_t>(t.mult));
        }
        for (std::size_t j = 0; j < atoms.atoms.size(); ++j) {
            Counts c(support_.size(), 0);
            bool inside = true;
            for (const auto& t : atoms.atoms[j].terms()) {
                auto it = std::lower_bound(support_.begin(), support_.end(), t.element);
                if (it == support_.end() || *it != t.element || t.mult > 255) {
                    inside = false;
                    break;
                }
                c[static_cast<std::size_t>(it - support_.begin())] = static_cast<std::uint8_t>(t.mult);
            }
            if (inside) {
                atom_index_.push_back(j);
                atom_counts_.push_back(std::move(c));
            }
        }
    }

    const Counts& root() const { return root_; }
    bool exhausted() const { return exhausted_; }

    // Sorted lengths of the multiset `c`; empty result only when exhausted.
    const std::vector<std::int64_t>& lengths(const Counts& c) {
        auto key = key_of(c);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        std::vector<std::int64_t> out;
        const auto first = std::find_if(c.begin(), c.end(), [](std::uint8_t x) { return x != 0; });
        if (first == c.end()) {
            out.push_back(0);
        } else if (static_cast<std::int64_t>(memo_.size()) >= max_states_) {
            exhausted_ = true;
        } else {
            const auto pos = static_cast<std::size_t>(first - c.begin());
            Counts rest(c.size());
            for (std::size_t a = 0; a < atom_counts_.size() && !exhausted_; ++a) {
                if (!peel(c, a, pos, rest)) continue;
                for (auto l : lengths(rest)) out.push_back(l + 1);
            }
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
        }
        return memo_.emplace(std::move(key), std::move(out)).first->second;
    }

    std::optional<Factorization> factorization(Counts c, std::int64_t length) {
        std::vector<std::size_t> picked;
        Counts rest(c.size());
        while (length > 0) {
            const auto first = std::find_if(c.begin(), c.end(), [](std::uint8_t x) { return x != 0; });
            if (first == c.end()) return std::nullopt;
            const auto pos = static_cast<std::size_t>(first - c.begin());
            bool advanced = false;
            for (std::size_t a = 0; a < atom_counts_.size(); ++a) {
                if (!peel(c, a, pos, rest)) continue;
                const auto& l = lengths(rest);
                if (std::binary_search(l.begin(), l.end(), length - 1)) {
                    picked.push_back(atom_index_[a]);
                    c = rest;
                    --length;
                    advanced = true;
                    break;
                }
            }
            if (!advanced) return std::nullopt;
        }
        if (std::any_of(c.begin(), c.end(), [](std::uint8_t x) { return x != 0; })) return std::nullopt;
        std::sort(picked.begin(), picked.end());
        Factorization f;
        for (auto i : picked) {
            if (!f.empty() && f.back().first == i)
                ++f.back().second;
            else
                f.emplace_back(i, 1);
        }
        return f;
    }

private:
    // rest = c - atom a, if atom a uses position `pos` and divides c.
    bool peel(const Counts& c, std::size_t a, std::size_t pos, Counts& rest) const {
        const auto& ac = atom_counts_[a];
        if (ac[pos] == 0) return false;
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (ac[i] > c[i]) return false;
            rest[i] = static_cast<std::uint8_t>(c[i] - ac[i]);
        }
        return true;
    }

    std::int64_t max_states_;
    bool exhausted_ = false;
    std::vector<Index> support_;
    Counts root_;
    std::vector<std::size_t> atom_index_;
    std::vector<Counts> atom_counts_;
    std::unordered_map<std::string, std::vector<std::int64_t>> memo_;
};

}  // namespace

LengthSet set_of_lengths(const Sequence& b, const AtomSet& atoms, std::int64_t max_states) {
    LengthEngine engine(b, atoms, max_states);
    LengthSet out{b, engine.lengths(engine.root()), false};
    out.complete = !engine.exhausted();
    if (!out.complete) out.lengths.clear();
    return out;
}

std::optional<Factorization> factorization_of_length(const Sequence& b, const AtomSet& atoms, std::int64_t length,
                                                     std::int64_t max_states) {
    LengthEngine engine(b, atoms, max_states);
    auto f = engine.factorization(engine.root(), length);
    if (engine.exhausted()) return std::nullopt;
    return f;
}

std::vector<std::int64_t> delta_of(const LengthSet& l) {
    if (!l.complete) throw PreconditionViolated("delta_of needs a complete length set");
    std::vector<std::int64_t> gaps;
    for (std::size_t i = 1; i < l.lengths.size(); ++i) gaps.push_back(l.lengths[i] - l.lengths[i - 1]);
    std::sort(gaps.begin(), gaps.end());
    gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());
    return gaps;
}

Rational rho_of(const LengthSet& l) {
    if (!l.complete || l.lengths.empty()) throw PreconditionViolated("rho_of needs a complete nonempty length set");
    const auto lo = l.lengths.front(), hi = l.lengths.back();
    if (hi == 0) return Rational{1, 1};
    if (lo == 0) throw std::logic_error("length set contains 0 and a positive length");
    return Rational::of(hi, lo);
}

namespace {

// Every zero-sum multiset over G0 with at most `bound` terms, with its set of
// lengths as a bitmask. Atoms are detected with is_atom on the sequence
// itself; nothing from the atom enumerator or the lattice code is used.
class BoundedTable {
public:
    struct Entry {
        Counts counts;
        std::int64_t length;
        std::uint64_t mask;
    };

    BoundedTable(const GroupSpec& group, std::span<const Index> support, std::int64_t bound, std::int64_t max_nodes)
        : group_(group), support_(support.begin(), support.end()), bound_(bound), max_nodes_(max_nodes) {
        if (bound < 0 || bound > 62) throw PreconditionViolated("length bound must lie in [0, 62]");
        std::sort(support_.begin(), support_.end());
        support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
        Counts c(support_.size(), 0);
        collect(0, 0, 0, c);
        if (!complete_) return;
        std::stable_sort(entries_.begin(), entries_.end(),
                         [](const Entry& a, const Entry& b) { return a.length < b.length; });
        atoms_by_pos_.resize(support_.size());
        for (auto& e : entries_) resolve(e);
    }

    bool complete() const { return complete_; }
    const std::vector<Entry>& entries() const { return entries_; }

    Sequence sequence(const Counts& c) const {
        std::vector<Term> terms;
        for (std::size_t i = 0; i < c.size(); ++i) terms.push_back({support_[i], c[i]});
        return Sequence(group_, std::move(terms));
    }

private:
    void collect(std::size_t pos, std::int64_t len, Index sum, Counts& c) {
        if (++nodes_ > max_nodes_) {
            complete_ = false;
            return;
        }
        if (pos == support_.size()) {
            if (len > 0 && sum == 0) entries_.push_back({c, len, 0});
            return;
        }
        Index s = sum;
        for (std::int64_t k = 0; len + k <= bound_ && complete_; ++k) {
            c[pos] = static_cast<std::uint8_t>(k);
            collect(pos + 1, len + k, s, c);
            s = group_.add(s, support_[pos]);
        }
        c[pos] = 0;
    }

    void resolve(Entry& e) {
        const auto seq = sequence(e.counts);
        if (is_atom(seq)) {
            e.mask = 2;  // {1}
            std::size_t idx = atom_counts_.size();
            atom_counts_.push_back(e.counts);
            for (std::size_t i = 0; i < e.counts.size(); ++i)
                if (e.counts[i]) atoms_by_pos_[i].push_back(idx);
        } else {
            const auto pos = static_cast<std::size_t>(
                std::find_if(e.counts.begin(), e.counts.end(), [](std::uint8_t x) { return x != 0; }) -
                e.counts.begin());
            Counts rest(e.counts.size());
            for (auto a : atoms_by_pos_[pos]) {
                const auto& ac = atom_counts_[a];
                bool divides = true;
                bool empty = true;
                for (std::size_t i = 0; i < ac.size(); ++i) {
                    if (ac[i] > e.counts[i]) {
                        divides = false;
                        break;
                    }
                    rest[i] = static_cast<std::uint8_t>(e.counts[i] - ac[i]);
                    empty = empty && rest[i] == 0;
                }
                if (!divides || empty) continue;
                e.mask |= masks_.at(key_of(rest)) << 1;
            }
        }
        masks_.emplace(key_of(e.counts), e.mask);
    }

    GroupSpec group_;
    std::vector<Index> support_;
    std::int64_t bound_;
    std::int64_t max_nodes_;
    std::int64_t nodes_ = 0;
    bool complete_ = true;
    std::vector<Entry> entries_;
    std::vector<Counts> atom_counts_;
    std::vector<std::vector<std::size_t>> atoms_by_pos_;
    std::unordered_map<std::string, std::uint64_t> masks_;
};

std::vector<std::int64_t> mask_lengths(std::uint64_t mask) {
    std::vector<std::int64_t> out;
    for (std::int64_t l = 0; l < 64; ++l)
        if ((mask >> l) & 1) out.push_back(l);
    return out;
}

}  // namespace

MinDeltaResult min_delta_bruteforce(const GroupSpec& group, std::span<const Index> support, std::int64_t length_bound,
                                    std::int64_t max_nodes) {
    BoundedTable table(group, support, length_bound, max_nodes);
    MinDeltaResult r;
    if (!table.complete()) {
        r.status = SearchStatus::Inconclusive;
        return r;
    }
    for (const auto& e : table.entries()) {
        ++r.zero_sum_elements;
        const auto ls = mask_lengths(e.mask);
        for (std::size_t i = 1; i < ls.size(); ++i) {
            const auto gap = ls[i] - ls[i - 1];
            r.distances.push_back(gap);
            if (!r.witness || gap < r.min_delta) {
                r.min_delta = gap;
                r.witness = table.sequence(e.counts);
                r.witness_lengths = {ls[i - 1], ls[i]};
            }
        }
    }
    std::sort(r.distances.begin(), r.distances.end());
    r.distances.erase(std::unique(r.distances.begin(), r.distances.end()), r.distances.end());
    r.status = r.witness ? SearchStatus::Found : SearchStatus::NoDistance;
    return r;
}

DistanceSample delta_of_group_sample(const GroupSpec& group, std::int64_t bound, std::int64_t max_nodes) {
    std::vector<Index> all(static_cast<std::size_t>(group.order()));
    std::iota(all.begin(), all.end(), Index{0});
    BoundedTable table(group, all, bound, max_nodes);
    DistanceSample s;
    s.bound = bound;
    s.complete = table.complete();
    if (!s.complete) return s;
    for (const auto& e : table.entries()) {
        ++s.zero_sum_elements;
        const auto ls = mask_lengths(e.mask);
        for (std::size_t i = 1; i < ls.size(); ++i) s.distances.push_back(ls[i] - ls[i - 1]);
        const auto rho = Rational::of(ls.back(), ls.front());
        if (!s.rho_witness || s.max_rho < rho) {
            s.max_rho = rho;
            s.rho_witness = table.sequence(e.counts);
        }
    }
    std::sort(s.distances.begin(), s.distances.end());
    s.distances.erase(std::unique(s.distances.begin(), s.distances.end()), s.distances.end());
    return s;
}

}  // namespace zs
