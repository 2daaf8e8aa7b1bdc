#include "oracles.hpp"
#include "zerosum/lattice.hpp"
#include "zerosum/lengths.hpp"

#include <doctest.h>

using namespace zs;

namespace {

AtomSet atoms_over(const GroupSpec& g, std::vector<Index> s) { return enumerate_atoms(g, s, {}); }

LengthSet complete_set(std::vector<std::int64_t> l) { return LengthSet{Sequence(GroupSpec()), std::move(l), true}; }

// All factorizations by trying every atom multiset, for tiny B.
std::set<std::int64_t> lengths_oracle(const Sequence& b, const std::vector<Sequence>& atoms) {
    std::set<std::int64_t> out;
    std::vector<std::int64_t> mult(atoms.size(), 0);
    auto rec = [&](auto&& self, std::size_t i, const Sequence& rest, std::int64_t count) -> void {
        if (rest.empty()) {
            out.insert(count);
            return;
        }
        if (i == atoms.size()) return;
        self(self, i + 1, rest, count);
        Sequence r = rest;
        std::int64_t c = count;
        while (divides(atoms[i], r)) {
            r = remove(r, atoms[i]);
            ++c;
            self(self, i + 1, r, c);
        }
    };
    rec(rec, 0, b, 0);
    return out;
}

}  // namespace

TEST_CASE("sets of lengths: examples") {
    const auto c4 = parse_group("C4");
    const auto z = atoms_over(c4, {0});
    for (int k = 0; k <= 5; ++k) {
        const auto l = set_of_lengths(Sequence(c4, {{0, k}}), z);
        CHECK(l.complete);
        CHECK(l.lengths == std::vector<std::int64_t>{k});
    }

    // (-U)U for max atoms contains 2 and D
    for (const auto& g : {parse_group("C3xC3"), parse_group("C2xC4"), parse_group("C7"), parse_group("C2xC6")}) {
        const auto d = davenport(g, {}).value;
        for (const auto& u : enumerate_max_atoms(g, {}, true, d).atoms) {
            const auto a = atoms_over(g, pm_support_codes(u));
            const auto l = set_of_lengths(concat(negate(u), u), a);
            REQUIRE(l.complete);
            CHECK(l.lengths.front() == 2);
            CHECK(l.lengths.back() == d);
            CHECK(rho_of(l) == Rational::of(d, 2));
        }
    }

    const auto c5sq = parse_group("C5xC5");
    const auto u = parse_sequence(c5sq, "(1,0)^4,(0,1)^4,(1,1)");
    const auto l = set_of_lengths(concat(negate(u), u), atoms_over(c5sq, pm_support_codes(u)));
    CHECK(l.lengths.front() == 2);
    CHECK_FALSE(std::binary_search(l.lengths.begin(), l.lengths.end(), 3));
    CHECK(l.lengths.back() == 9);
}

TEST_CASE("delta and rho") {
    CHECK(delta_of(complete_set({2, 5})) == std::vector<std::int64_t>{3});
    CHECK(delta_of(complete_set({2, 3, 4})) == std::vector<std::int64_t>{1});
    CHECK(delta_of(complete_set({7})).empty());
    CHECK(rho_of(complete_set({4, 6})) == Rational::of(3, 2));
    CHECK(rho_of(complete_set({0})) == Rational{1, 1});
    CHECK(Rational::of(9, 2).to_string() == "9/2");
    CHECK(Rational::of(4, 2).to_string() == "2");
    CHECK(Rational::of(3, 2) < Rational::of(2, 1));
    CHECK_THROWS_AS(delta_of(LengthSet{Sequence(GroupSpec()), {}, false}), PreconditionViolated);
}

TEST_CASE("preconditions") {
    const auto c5 = parse_group("C5");
    const auto a = atoms_over(c5, {1, 4});
    CHECK_THROWS_AS(set_of_lengths(Sequence(c5, {{1, 2}}), a), PreconditionViolated);
    CHECK_THROWS_AS(set_of_lengths(Sequence(c5, {{2, 5}}), a), PreconditionViolated);
    EnumerationBudget cap;
    cap.max_length = 2;
    CHECK_THROWS_AS(set_of_lengths(Sequence(c5, {{1, 5}}), enumerate_atoms(c5, std::vector<Index>{1, 4}, cap)),
                    PreconditionViolated);
}

TEST_CASE("lengths agree with exhaustive factorization on random B") {
    std::mt19937_64 rng(31);
    for (const auto& g : {parse_group("C2xC4"), parse_group("C3xC3"), parse_group("C6"), parse_group("C2^3")}) {
        const auto a = atoms_over(g, oracle::all_codes(g));
        int tested = 0;
        for (int it = 0; it < 400 && tested < 40; ++it) {
            const auto b = oracle::random_sequence(rng, g, 1 + rng() % 9);
            if (!sigma(b).is_zero()) continue;
            ++tested;
            const auto l = set_of_lengths(b, a);
            REQUIRE(l.complete);
            const auto o = lengths_oracle(b, a.atoms);
            CHECK(std::vector<std::int64_t>(o.begin(), o.end()) == l.lengths);
            for (auto n : l.lengths) {
                const auto f = factorization_of_length(b, a, n);
                REQUIRE(f);
                std::int64_t count = 0;
                for (auto [i, k] : *f) count += k;
                CHECK(count == n);
                CHECK(multiply(g, a.atoms, *f) == b);
            }
            CHECK_FALSE(factorization_of_length(b, a, l.lengths.back() + 1));
        }
        CHECK(tested >= 10);
    }
}

TEST_CASE("sumset containment and gcd divisibility") {
    std::mt19937_64 rng(41);
    const auto g = parse_group("C3xC3");
    const auto a = atoms_over(g, oracle::all_codes(g));
    const auto d = kernel_sum_gcd(integer_kernel(build_atom_matrix(a)));
    CHECK(d == 1);
    std::vector<Sequence> zs;
    while (zs.size() < 20) {
        const auto b = oracle::random_sequence(rng, g, 2 + rng() % 6);
        if (sigma(b).is_zero()) zs.push_back(b);
    }
    for (std::size_t i = 0; i + 1 < zs.size(); i += 2) {
        const auto l1 = set_of_lengths(zs[i], a), l2 = set_of_lengths(zs[i + 1], a);
        const auto l12 = set_of_lengths(concat(zs[i], zs[i + 1]), a);
        for (auto x : l1.lengths)
            for (auto y : l2.lengths) CHECK(std::binary_search(l12.lengths.begin(), l12.lengths.end(), x + y));
    }

    // gaps are multiples of the support's kernel gcd
    const auto c7 = parse_group("C7");
    const auto a7 = atoms_over(c7, {1, 6});
    const auto d7 = kernel_sum_gcd(integer_kernel(build_atom_matrix(a7)));
    CHECK(d7 == 5);
    for (int k = 1; k <= 4; ++k) {
        const auto l = set_of_lengths(Sequence(c7, {{1, 7 * k}, {6, 7 * k}}), a7);
        for (auto gap : delta_of(l)) CHECK(gap % d7 == 0);
    }
}

TEST_CASE("brute-force minimal distance") {
    const auto c5 = parse_group("C5");
    const std::vector<Index> s{1, 4};
    const auto r = min_delta_bruteforce(c5, s, 12);
    REQUIRE(r.status == SearchStatus::Found);
    CHECK(r.min_delta == 3);
    CHECK(*r.witness == Sequence(c5, {{1, 5}, {4, 5}}));
    CHECK(r.witness_lengths == std::pair<std::int64_t, std::int64_t>{2, 5});

    const std::vector<Index> zero{0};
    CHECK(min_delta_bruteforce(c5, zero, 12).status == SearchStatus::NoDistance);

    const auto g = parse_group("C3xC3");
    const auto u = enumerate_max_atoms(g, {}).atoms.front();
    const auto pm = pm_support_codes(u);
    const auto b = min_delta_bruteforce(g, pm, 12);
    REQUIRE(b.status == SearchStatus::Found);
    CHECK(b.min_delta == 1);

    CHECK(min_delta_bruteforce(g, pm, 12, 100).status == SearchStatus::Inconclusive);
    CHECK_THROWS_AS(min_delta_bruteforce(g, pm, 63), PreconditionViolated);
}

TEST_CASE("group-wide distance samples") {
    auto s = delta_of_group_sample(parse_group("C3"), 12);
    REQUIRE(s.complete);
    for (auto d : s.distances) CHECK(d == 1);
    s = delta_of_group_sample(parse_group("C3xC3"), 8);
    CHECK(s.distances == std::vector<std::int64_t>{1});
    CHECK(s.max_rho <= Rational::of(5, 2));
    s = delta_of_group_sample(parse_group("C2xC2"), 12);
    for (auto d : s.distances) CHECK(d == 1);
    CHECK(s.max_rho == Rational::of(3, 2));
}
