#pragma once

#include "zerosum/group.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace zs {

// Dense subset of a group, indexed by element code.
class ElementBitset {
public:
    ElementBitset() = default;
    explicit ElementBitset(std::int64_t universe)
        : words_(static_cast<std::size_t>((universe + 63) / 64), 0) {}

    bool test(Index i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(Index i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void clear() { std::fill(words_.begin(), words_.end(), 0); }
    std::int64_t count() const;
    std::vector<Index> members() const;

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w)
            for (std::uint64_t bits = words_[w]; bits; bits &= bits - 1)
                f(static_cast<Index>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits))));
    }

    friend bool operator==(const ElementBitset&, const ElementBitset&) = default;

private:
    std::vector<std::uint64_t> words_;
};

// Sigma(S g) = Sigma(S) u {g} u (Sigma(S) + g), written to `out`.
void extend_subsums(const GroupSpec& group, const ElementBitset& sums, Index g, ElementBitset& out);

struct Term {
    Index element;
    std::int64_t mult;
    friend bool operator==(const Term&, const Term&) = default;
};

// A finite multiset over a group, stored as an association list sorted by
// the canonical element order with strictly positive multiplicities.
class Sequence {
public:
    explicit Sequence(GroupSpec group);
    Sequence(GroupSpec group, std::vector<Term> terms);  // merges duplicates, drops zeros
    static Sequence from_elements(const GroupSpec& group, std::span<const GroupElement> elements);
    static Sequence from_codes(const GroupSpec& group, std::span<const Index> codes);
    static Sequence power(const GroupElement& g, std::int64_t k);

    const GroupSpec& group() const { return group_; }
    std::span<const Term> terms() const { return terms_; }
    std::int64_t length() const { return length_; }
    bool empty() const { return terms_.empty(); }
    std::int64_t count(Index element) const;
    std::int64_t count(const GroupElement& g) const;
    std::vector<GroupElement> support() const;
    std::vector<Index> support_codes() const;
    // Terms repeated by multiplicity, non-decreasing.
    std::vector<Index> expanded() const;

    // "[(1,0)^2,(0,1)]"
    std::string to_string() const;

    friend bool operator==(const Sequence& a, const Sequence& b);
    // Shorter first, then lexicographic on the expanded term list.
    friend bool operator<(const Sequence& a, const Sequence& b);

private:
    GroupSpec group_;
    std::vector<Term> terms_;
    std::int64_t length_ = 0;
};

GroupElement sigma(const Sequence& s);
std::vector<GroupElement> subsequence_sums(const Sequence& s);
ElementBitset subsequence_sum_set(const Sequence& s);
bool is_zero_sum_free(const Sequence& s);
bool is_atom(const Sequence& s);
Sequence negate(const Sequence& s);
std::vector<GroupElement> pm_support(const Sequence& s);
std::vector<Index> pm_support_codes(const Sequence& s);
Sequence concat(const Sequence& s, const Sequence& t);
// Throws PreconditionViolated unless t divides s.
Sequence remove(const Sequence& s, const Sequence& t);
bool divides(const Sequence& t, const Sequence& s);

// Product of atoms[i]^mult for every (i, mult) in `factors`.
Sequence multiply(const GroupSpec& group, std::span<const Sequence> atoms,
                  std::span<const std::pair<std::size_t, std::int64_t>> factors);

// Checks both sides consist of atoms and multiply to the same sequence.
bool same_product(const GroupSpec& group, std::span<const Sequence> atoms,
                  std::span<const std::pair<std::size_t, std::int64_t>> left,
                  std::span<const std::pair<std::size_t, std::int64_t>> right);

Sequence parse_sequence(const GroupSpec& group, std::string_view text);
GroupElement parse_element(const GroupSpec& group, std::string_view text);
// "(1,0),(0,1)" or "[(1,0),(0,1)]" as a sorted duplicate-free element list.
std::vector<GroupElement> parse_element_set(const GroupSpec& group, std::string_view text);

}  // namespace zs
