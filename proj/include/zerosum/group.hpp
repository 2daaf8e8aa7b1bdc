#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GroupMismatch : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class PreconditionViolated : public Error {
public:
    using Error::Error;
};

// Mixed-radix code of an element; the first coordinate is the most
// significant digit, so numeric order on codes is lexicographic order on
// coordinate vectors. All enumeration downstream uses this order.
using Index = std::uint32_t;

// Finite abelian group C_{n_1} + ... + C_{n_r} with 1 < n_1 | ... | n_r.
// Cheap to copy (shared immutable storage).
class GroupSpec {
public:
    GroupSpec();  // trivial group

    // Validates the divisibility chain; use make_group() for arbitrary input.
    static GroupSpec from_invariant_factors(std::vector<std::int64_t> factors);

    const std::vector<std::int64_t>& factors() const;
    std::size_t num_factors() const { return factors().size(); }
    std::int64_t order() const;
    std::int64_t exponent() const;
    int rank() const;
    int p_rank(std::int64_t p) const;
    std::int64_t d_star() const;
    // Prime p if the group is a nontrivial p-group.
    std::optional<std::int64_t> p_group_prime() const;
    bool is_cyclic() const { return num_factors() <= 1; }
    bool is_elementary_2_group() const;

    // "C2xC4"; the trivial group prints as "C1".
    std::string to_string() const;

    Index encode(std::span<const std::int64_t> coords) const;
    std::vector<std::int64_t> decode(Index code) const;
    Index zero() const { return 0; }
    Index add(Index a, Index b) const;
    Index sub(Index a, Index b) const { return add(a, neg(b)); }
    Index neg(Index a) const;
    Index mul(std::int64_t k, Index a) const;
    std::int64_t ord(Index a) const;

    friend bool operator==(const GroupSpec& a, const GroupSpec& b);

private:
    struct Data;
    explicit GroupSpec(std::shared_ptr<const Data> d);
    std::shared_ptr<const Data> d_;
};

// Canonical invariant-factor form of C_{m_1} + ... + C_{m_k}.
GroupSpec make_group(std::vector<std::int64_t> cyclic_orders);

// Accepts "C2xC4", "C2^3xC6", "C2 x C6", "2,4", "5". Throws ParseError
// naming the offending token.
GroupSpec parse_group(std::string_view text);

class GroupElement {
public:
    GroupElement(GroupSpec group, Index code);
    GroupElement(GroupSpec group, std::span<const std::int64_t> coords);

    const GroupSpec& group() const { return group_; }
    Index code() const { return code_; }
    std::vector<std::int64_t> coords() const { return group_.decode(code_); }
    bool is_zero() const { return code_ == 0; }
    std::string to_string() const;  // "(1,3)"

    friend bool operator==(const GroupElement& a, const GroupElement& b);
    // Canonical total order: lexicographic on coordinates.
    friend std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b);

private:
    GroupSpec group_;
    Index code_;
};

void check_same_group(const GroupSpec& a, const GroupSpec& b);

GroupElement zero(const GroupSpec& group);
GroupElement add(const GroupElement& g, const GroupElement& h);
GroupElement neg(const GroupElement& g);
GroupElement operator+(const GroupElement& g, const GroupElement& h);
GroupElement operator-(const GroupElement& g);
GroupElement operator*(std::int64_t k, const GroupElement& g);
std::int64_t ord(const GroupElement& g);

std::int64_t exponent(const GroupSpec& group);
int rank(const GroupSpec& group);
int p_rank(const GroupSpec& group, std::int64_t p);
std::int64_t d_star(const GroupSpec& group);

// Codes of the subgroup generated by `generators`, sorted.
std::vector<Index> subgroup_closure(const GroupSpec& group, std::span<const Index> generators);
std::vector<GroupElement> subgroup_generated(std::span<const GroupElement> elements);
std::vector<GroupElement> subgroup_generated(const GroupSpec& group,
                                             std::span<const GroupElement> elements);

bool is_independent(const GroupSpec& group, std::span<const Index> tuple);
bool is_independent(std::span<const GroupElement> tuple);
bool is_basis(std::span<const GroupElement> tuple, const GroupSpec& group);

// For G = C_{p^s1}^{r1} + C_{p^s2}^{r2} with s1 < s2 and <G0> = G, picks
// r2 elements of G0 forming a basis of a subgroup isomorphic to
// C_{p^s2}^{r2}. Throws PreconditionViolated otherwise.
std::vector<GroupElement> extract_high_order_basis(std::span<const GroupElement> support,
                                                   const GroupSpec& group);

bool is_prime(std::int64_t n);
std::vector<std::int64_t> prime_divisors(std::int64_t n);

}  // namespace zs
