#pragma once

#include "zerosum/atoms.hpp"
#include "zerosum/sequence.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace zs {

struct Rational {
    std::int64_t num = 1;
    std::int64_t den = 1;

    static Rational of(std::int64_t num, std::int64_t den);
    std::string to_string() const;
    friend bool operator==(const Rational&, const Rational&) = default;
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
};

struct LengthSet {
    Sequence element;
    std::vector<std::int64_t> lengths;  // sorted
    bool complete = false;
};

using Factorization = std::vector<std::pair<std::size_t, std::int64_t>>;  // (atom index, multiplicity)

// L(B) by peeling atoms that contain the smallest remaining term, memoized on
// the remaining multiset. Requires sigma(B) = 0 and an atom set covering
// supp(B) with no length cap. L(empty) = {0}.
LengthSet set_of_lengths(const Sequence& b, const AtomSet& atoms, std::int64_t max_states = 10'000'000);

// A factorization of B of exactly `length` atoms (indices into atoms.atoms).
std::optional<Factorization> factorization_of_length(const Sequence& b, const AtomSet& atoms, std::int64_t length,
                                                     std::int64_t max_states = 10'000'000);

std::vector<std::int64_t> delta_of(const LengthSet& l);
Rational rho_of(const LengthSet& l);

enum class SearchStatus { Found, NoDistance, Inconclusive };
std::string to_string(SearchStatus s);

struct MinDeltaResult {
    SearchStatus status = SearchStatus::NoDistance;
    std::int64_t min_delta = 0;
    std::optional<Sequence> witness;        // first B (shortest) realizing min_delta
    std::pair<std::int64_t, std::int64_t> witness_lengths{0, 0};  // consecutive lengths in L(B)
    std::vector<std::int64_t> distances;    // every gap seen, sorted
    std::int64_t zero_sum_elements = 0;     // zero-sum B examined
};

// One-sided oracle: examines every zero-sum B over G0 with |B| <= bound
// (bound <= 62), using its own atom detection and factorization tables.
MinDeltaResult min_delta_bruteforce(const GroupSpec& group, std::span<const Index> support, std::int64_t length_bound,
                                    std::int64_t max_nodes = 50'000'000);

struct DistanceSample {
    std::vector<std::int64_t> distances;  // union of Delta(L(B)) over sampled B
    Rational max_rho;
    std::optional<Sequence> rho_witness;
    std::int64_t bound = 0;
    std::int64_t zero_sum_elements = 0;
    bool complete = false;
};

// Lower approximation of Delta(G) and of rho(G) from all zero-sum B over G
// with |B| <= bound.
DistanceSample delta_of_group_sample(const GroupSpec& group, std::int64_t bound, std::int64_t max_nodes = 50'000'000);

}  // namespace zs
