#pragma once

#include "zerosum/atoms.hpp"
#include "zerosum/sequence.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

namespace zs {

using BigInt = mpz_class;

// Rows are support elements, columns are atoms: entries[g][j] = v_g(atom_j).
// A factorization of B is a nonnegative x with entries * x = v(B), so
// integer kernel vectors are differences of two factorizations of one element.
struct AtomMatrix {
    GroupSpec group;
    std::vector<Index> support;
    std::vector<Sequence> atoms;
    std::vector<std::vector<std::int64_t>> entries;
    // Built from an incomplete atom list: gcd values are then only upper
    // bounds on gcd Delta(G0).
    bool upper_bound_only = false;

    std::size_t rows() const { return support.size(); }
    std::size_t cols() const { return atoms.size(); }
};

// Throws PreconditionViolated for an incomplete atom set unless
// `allow_incomplete`, in which case the matrix is tainted upper_bound_only.
AtomMatrix build_atom_matrix(const AtomSet& atom_set, bool allow_incomplete = false);

struct KernelBasis {
    std::vector<std::vector<BigInt>> basis;
    std::vector<BigInt> sums;  // 1^T z per basis vector
    std::size_t rank = 0;      // rank of the matrix
};

// Lattice basis of {z in Z^n : M z = 0} by column echelon reduction with a
// tracked unimodular transform. Every basis vector is re-multiplied and a
// nonzero product throws std::logic_error.
KernelBasis integer_kernel(const AtomMatrix& m);

// gcd of the basis coordinate sums; 0 iff every factorization of every
// element over G0 has the same length.
std::int64_t kernel_sum_gcd(const KernelBasis& k);

// left = U_1...U_k, right = V_1...V_{k+d}, as (atom column, multiplicity).
struct Witness {
    std::vector<std::pair<std::size_t, std::int64_t>> left;
    std::vector<std::pair<std::size_t, std::int64_t>> right;

    std::int64_t left_length() const;
    std::int64_t right_length() const;
    std::int64_t difference() const { return right_length() - left_length(); }
};

// Integer combination of the basis with coordinate sum gcd(sums) > 0.
std::vector<BigInt> kernel_vector_with_sum_gcd(const KernelBasis& k);

// Splits a kernel vector with positive coordinate sum into its two
// factorizations, padding both sides with one common atom if a side is empty.
Witness split_kernel_vector(const AtomMatrix& m, const std::vector<BigInt>& z);

// Re-multiplies both sides through the sequence module.
bool verify_witness(const AtomMatrix& m, const Witness& w, std::int64_t expected_difference);

std::optional<Witness> distance_one_witness(const AtomMatrix& m, const KernelBasis& k);

// Two factorizations of one element whose lengths differ by exactly d.
// Throws PreconditionViolated unless d > 0 and kernel_sum_gcd divides d.
Witness general_distance_witness(const AtomMatrix& m, const KernelBasis& k, std::int64_t d);

nlohmann::json to_json(const AtomMatrix& m);
nlohmann::json to_json(const KernelBasis& k);

}  // namespace zs
