#include "zerosum/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace zs {

namespace {

std::int64_t to_int64(const BigInt& v) {
    if (!v.fits_slong_p()) throw std::overflow_error("witness multiplicity exceeds 64 bits: " + v.get_str());
    return v.get_si();
}

nlohmann::json big_to_json(const BigInt& v) {
    if (v.fits_slong_p()) return v.get_si();
    return v.get_str();
}

// A column of [M; T] during reduction: dense matrix part, sparse transform part.
struct Column {
    std::vector<BigInt> m;
    std::vector<std::pair<std::size_t, BigInt>> t;  // sorted by index
};

// dst -= q * src on both parts.
void submul(Column& dst, const Column& src, const BigInt& q) {
    for (std::size_t r = 0; r < dst.m.size(); ++r)
        if (sgn(src.m[r]) != 0) dst.m[r] -= q * src.m[r];
    std::vector<std::pair<std::size_t, BigInt>> merged;
    merged.reserve(dst.t.size() + src.t.size());
    std::size_t a = 0, b = 0;
    while (a < dst.t.size() || b < src.t.size()) {
        if (b == src.t.size() || (a < dst.t.size() && dst.t[a].first < src.t[b].first)) {
            merged.push_back(std::move(dst.t[a++]));
        } else if (a == dst.t.size() || src.t[b].first < dst.t[a].first) {
            merged.emplace_back(src.t[b].first, -q * src.t[b].second);
            ++b;
        } else {
            BigInt v = dst.t[a].second - q * src.t[b].second;
            if (sgn(v) != 0) merged.emplace_back(dst.t[a].first, std::move(v));
            ++a;
            ++b;
        }
    }
    dst.t = std::move(merged);
}

BigInt coordinate_sum(const std::vector<BigInt>& z) {
    BigInt s = 0;
    for (const auto& x : z) s += x;
    return s;
}

bool in_kernel(const AtomMatrix& m, const std::vector<BigInt>& z) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        BigInt acc = 0;
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m.entries[r][c] != 0 && sgn(z[c]) != 0) acc += z[c] * m.entries[r][c];
        if (sgn(acc) != 0) return false;
    }
    return true;
}

}  // namespace

AtomMatrix build_atom_matrix(const AtomSet& atom_set, bool allow_incomplete) {
    if (!atom_set.covers_all_atoms() && !allow_incomplete)
        throw PreconditionViolated("atom matrix needs a complete, uncapped atom set");
    AtomMatrix m;
    m.group = atom_set.group;
    m.support = atom_set.support;
    m.atoms = atom_set.atoms;
    m.upper_bound_only = !atom_set.covers_all_atoms();
    m.entries.assign(m.support.size(), std::vector<std::int64_t>(m.atoms.size(), 0));
    for (std::size_t j = 0; j < m.atoms.size(); ++j) {
        for (const auto& t : m.atoms[j].terms()) {
            auto it = std::lower_bound(m.support.begin(), m.support.end(), t.element);
            if (it == m.support.end() || *it != t.element)
                throw PreconditionViolated("atom " + m.atoms[j].to_string() + " leaves the support");
            m.entries[static_cast<std::size_t>(it - m.support.begin())][j] = t.mult;
        }
    }
    return m;
}

KernelBasis integer_kernel(const AtomMatrix& m) {
    const std::size_t rows = m.rows(), n = m.cols();
    std::vector<Column> cols(n);
    for (std::size_t j = 0; j < n; ++j) {
        cols[j].m.resize(rows);
        for (std::size_t r = 0; r < rows; ++r) cols[j].m[r] = m.entries[r][j];
        cols[j].t.emplace_back(j, 1);
    }
    std::vector<std::size_t> active(n);
    for (std::size_t j = 0; j < n; ++j) active[j] = j;

    KernelBasis k;
    std::vector<std::size_t> nz;
    for (std::size_t r = 0; r < rows; ++r) {
        // Euclid across all active columns until one nonzero is left in row r;
        // that column becomes a pivot and leaves the active set.
        for (;;) {
            nz.clear();
            for (auto j : active)
                if (sgn(cols[j].m[r]) != 0) nz.push_back(j);
            if (nz.empty()) break;
            auto p = *std::min_element(nz.begin(), nz.end(), [&](std::size_t a, std::size_t b) {
                return mpz_cmpabs(cols[a].m[r].get_mpz_t(), cols[b].m[r].get_mpz_t()) < 0;
            });
            if (nz.size() == 1) {
                std::erase(active, p);
                ++k.rank;
                break;
            }
            BigInt q;
            for (auto j : nz) {
                if (j == p) continue;
                mpz_fdiv_q(q.get_mpz_t(), cols[j].m[r].get_mpz_t(), cols[p].m[r].get_mpz_t());
                submul(cols[j], cols[p], q);
            }
        }
    }

    for (auto j : active) {
        std::vector<BigInt> z(n, 0);
        for (auto& [i, v] : cols[j].t) z[i] = v;
        if (!in_kernel(m, z)) throw std::logic_error("kernel basis vector fails M z = 0");
        k.sums.push_back(coordinate_sum(z));
        k.basis.push_back(std::move(z));
    }
    return k;
}

std::int64_t kernel_sum_gcd(const KernelBasis& k) {
    BigInt g = 0;
    for (const auto& s : k.sums) g = gcd(g, s);
    return to_int64(g);
}

std::int64_t Witness::left_length() const {
    std::int64_t s = 0;
    for (auto [i, m] : left) s += m;
    return s;
}

std::int64_t Witness::right_length() const {
    std::int64_t s = 0;
    for (auto [i, m] : right) s += m;
    return s;
}

std::vector<BigInt> kernel_vector_with_sum_gcd(const KernelBasis& k) {
    // Shortcut: a basis vector whose sum already is the gcd.
    const BigInt target = kernel_sum_gcd(k);
    if (sgn(target) == 0) throw PreconditionViolated("kernel coordinate sums are all zero");
    for (std::size_t i = 0; i < k.basis.size(); ++i) {
        if (mpz_cmpabs(k.sums[i].get_mpz_t(), target.get_mpz_t()) == 0) {
            auto z = k.basis[i];
            if (sgn(k.sums[i]) < 0)
                for (auto& x : z) x = -x;
            return z;
        }
    }
    std::vector<BigInt> z;
    BigInt g = 0, a, b, g2;
    for (std::size_t i = 0; i < k.basis.size(); ++i) {
        if (sgn(k.sums[i]) == 0) continue;
        if (z.empty()) {
            z = k.basis[i];
            g = k.sums[i];
            continue;
        }
        mpz_gcdext(g2.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t(), g.get_mpz_t(), k.sums[i].get_mpz_t());
        for (std::size_t c = 0; c < z.size(); ++c) z[c] = a * z[c] + b * k.basis[i][c];
        g = g2;
    }
    if (sgn(g) < 0) {
        for (auto& x : z) x = -x;
        g = -g;
    }
    if (g != target || coordinate_sum(z) != target) throw std::logic_error("extended gcd combination is inconsistent");
    return z;
}

Witness split_kernel_vector(const AtomMatrix& m, const std::vector<BigInt>& z) {
    Witness w;
    for (std::size_t c = 0; c < z.size(); ++c) {
        if (sgn(z[c]) > 0) w.right.emplace_back(c, to_int64(z[c]));
        if (sgn(z[c]) < 0) w.left.emplace_back(c, to_int64(-z[c]));
    }
    if ((w.left.empty() || w.right.empty()) && m.cols() > 0) {
        auto pad = [](auto& side) {
            if (!side.empty() && side.front().first == 0)
                side.front().second += 1;
            else
                side.insert(side.begin(), {std::size_t{0}, std::int64_t{1}});
        };
        pad(w.left);
        pad(w.right);
    }
    return w;
}

bool verify_witness(const AtomMatrix& m, const Witness& w, std::int64_t expected_difference) {
    if (w.left.empty() || w.right.empty() || w.difference() != expected_difference) return false;
    return same_product(m.group, m.atoms, w.left, w.right);
}

std::optional<Witness> distance_one_witness(const AtomMatrix& m, const KernelBasis& k) {
    if (kernel_sum_gcd(k) != 1) return std::nullopt;
    auto w = split_kernel_vector(m, kernel_vector_with_sum_gcd(k));
    if (!verify_witness(m, w, 1)) throw std::logic_error("distance-one witness failed re-verification");
    return w;
}

Witness general_distance_witness(const AtomMatrix& m, const KernelBasis& k, std::int64_t d) {
    const auto g = kernel_sum_gcd(k);
    if (d <= 0 || g == 0 || d % g != 0)
        throw PreconditionViolated("distance " + std::to_string(d) + " is not a positive multiple of the kernel gcd " +
                                   std::to_string(g));
    auto z = kernel_vector_with_sum_gcd(k);
    const BigInt scale = d / g;
    for (auto& x : z) x *= scale;
    auto w = split_kernel_vector(m, z);
    if (!verify_witness(m, w, d)) throw std::logic_error("distance witness failed re-verification");
    return w;
}

nlohmann::json to_json(const AtomMatrix& m) {
    nlohmann::json j;
    j["group"] = m.group.to_string();
    auto& sup = j["support"] = nlohmann::json::array();
    for (Index c : m.support) sup.push_back(GroupElement(m.group, c).to_string());
    auto& atoms = j["atoms"] = nlohmann::json::array();
    for (const auto& a : m.atoms) atoms.push_back(a.to_string());
    j["entries"] = m.entries;
    j["upper_bound_only"] = m.upper_bound_only;
    return j;
}

nlohmann::json to_json(const KernelBasis& k) {
    nlohmann::json j;
    j["rank"] = k.rank;
    auto& basis = j["basis"] = nlohmann::json::array();
    for (const auto& z : k.basis) {
        auto row = nlohmann::json::array();
        for (const auto& x : z) row.push_back(big_to_json(x));
        basis.push_back(std::move(row));
    }
    auto& sums = j["sums"] = nlohmann::json::array();
    for (const auto& s : k.sums) sums.push_back(big_to_json(s));
    return j;
}

}  // namespace zs
