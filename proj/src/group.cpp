#include "zerosum/group.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace zs {

namespace {

constexpr std::int64_t kMaxOrder = std::int64_t{1} << 31;
constexpr std::int64_t kAddTableLimit = 512;
constexpr std::int64_t kUnaryTableLimit = std::int64_t{1} << 16;

std::int64_t floor_mod(std::int64_t a, std::int64_t n) {
    std::int64_t r = a % n;
    return r < 0 ? r + n : r;
}

}  // namespace

struct GroupSpec::Data {
    std::vector<std::int64_t> factors;
    std::vector<std::int64_t> strides;  // stride of coordinate i in the code
    std::int64_t order = 1;
    std::vector<Index> add_table;  // order*order, empty for large groups
    std::vector<Index> neg_table;
    std::vector<std::int64_t> ord_table;

    Index add_slow(Index a, Index b) const {
        Index out = 0;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            const std::int64_t n = factors[i];
            const std::int64_t ai = (a / strides[i]) % n;
            const std::int64_t bi = (b / strides[i]) % n;
            out += static_cast<Index>(((ai + bi) % n) * strides[i]);
        }
        return out;
    }
    Index neg_slow(Index a) const {
        Index out = 0;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            const std::int64_t n = factors[i];
            const std::int64_t ai = (a / strides[i]) % n;
            out += static_cast<Index>(((n - ai) % n) * strides[i]);
        }
        return out;
    }
    std::int64_t ord_slow(Index a) const {
        std::int64_t l = 1;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            const std::int64_t n = factors[i];
            const std::int64_t ai = (a / strides[i]) % n;
            l = std::lcm(l, n / std::gcd(ai, n));
        }
        return l;
    }
};

GroupSpec::GroupSpec() : GroupSpec(from_invariant_factors({})) {}

GroupSpec::GroupSpec(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

GroupSpec GroupSpec::from_invariant_factors(std::vector<std::int64_t> factors) {
    auto d = std::make_shared<Data>();
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (factors[i] < 2)
            throw PreconditionViolated("invariant factor must be >= 2, got " +
                                       std::to_string(factors[i]));
        if (i + 1 < factors.size() && factors[i + 1] % factors[i] != 0)
            throw PreconditionViolated("invariant factors must form a divisibility chain");
        if (d->order > kMaxOrder / factors[i])
            throw PreconditionViolated("group order exceeds supported range");
        d->order *= factors[i];
    }
    d->factors = std::move(factors);
    d->strides.assign(d->factors.size(), 1);
    for (std::size_t i = d->factors.size(); i-- > 1;)
        d->strides[i - 1] = d->strides[i] * d->factors[i];

    const auto n = d->order;
    if (n <= kUnaryTableLimit) {
        d->neg_table.resize(n);
        d->ord_table.resize(n);
        for (std::int64_t a = 0; a < n; ++a) {
            d->neg_table[a] = d->neg_slow(static_cast<Index>(a));
            d->ord_table[a] = d->ord_slow(static_cast<Index>(a));
        }
    }
    if (n <= kAddTableLimit) {
        d->add_table.resize(n * n);
        for (std::int64_t a = 0; a < n; ++a)
            for (std::int64_t b = 0; b < n; ++b)
                d->add_table[a * n + b] = d->add_slow(static_cast<Index>(a), static_cast<Index>(b));
    }
    return GroupSpec(std::move(d));
}

const std::vector<std::int64_t>& GroupSpec::factors() const { return d_->factors; }
std::int64_t GroupSpec::order() const { return d_->order; }

std::int64_t GroupSpec::exponent() const {
    return d_->factors.empty() ? 1 : d_->factors.back();
}

int GroupSpec::p_rank(std::int64_t p) const {
    int r = 0;
    for (auto n : d_->factors)
        if (n % p == 0) ++r;
    return r;
}

int GroupSpec::rank() const {
    int r = 0;
    for (auto p : prime_divisors(exponent())) r = std::max(r, p_rank(p));
    return r;
}

std::int64_t GroupSpec::d_star() const {
    std::int64_t s = 1;
    for (auto n : d_->factors) s += n - 1;
    return s;
}

std::optional<std::int64_t> GroupSpec::p_group_prime() const {
    auto ps = prime_divisors(exponent());
    if (ps.size() != 1) return std::nullopt;
    return ps.front();
}

bool GroupSpec::is_elementary_2_group() const {
    return !d_->factors.empty() && exponent() == 2;
}

std::string GroupSpec::to_string() const {
    if (d_->factors.empty()) return "C1";
    std::string s;
    for (std::size_t i = 0; i < d_->factors.size(); ++i) {
        if (i) s += 'x';
        s += 'C' + std::to_string(d_->factors[i]);
    }
    return s;
}

Index GroupSpec::encode(std::span<const std::int64_t> coords) const {
    if (coords.size() != d_->factors.size())
        throw GroupMismatch("element has " + std::to_string(coords.size()) +
                            " coordinates, group " + to_string() + " needs " +
                            std::to_string(d_->factors.size()));
    std::int64_t code = 0;
    for (std::size_t i = 0; i < coords.size(); ++i)
        code += floor_mod(coords[i], d_->factors[i]) * d_->strides[i];
    return static_cast<Index>(code);
}

std::vector<std::int64_t> GroupSpec::decode(Index code) const {
    std::vector<std::int64_t> c(d_->factors.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = (code / d_->strides[i]) % d_->factors[i];
    return c;
}

Index GroupSpec::add(Index a, Index b) const {
    if (!d_->add_table.empty()) return d_->add_table[static_cast<std::size_t>(a) * d_->order + b];
    return d_->add_slow(a, b);
}

Index GroupSpec::neg(Index a) const {
    if (!d_->neg_table.empty()) return d_->neg_table[a];
    return d_->neg_slow(a);
}

Index GroupSpec::mul(std::int64_t k, Index a) const {
    Index out = 0;
    for (std::size_t i = 0; i < d_->factors.size(); ++i) {
        const std::int64_t n = d_->factors[i];
        const std::int64_t ai = (a / d_->strides[i]) % n;
        out += static_cast<Index>(floor_mod((k % n) * ai, n) * d_->strides[i]);
    }
    return out;
}

std::int64_t GroupSpec::ord(Index a) const {
    if (!d_->ord_table.empty()) return d_->ord_table[a];
    return d_->ord_slow(a);
}

bool operator==(const GroupSpec& a, const GroupSpec& b) {
    return a.d_ == b.d_ || a.d_->factors == b.d_->factors;
}

GroupSpec make_group(std::vector<std::int64_t> cyclic_orders) {
    for (auto m : cyclic_orders)
        if (m < 1) throw PreconditionViolated("cyclic order must be >= 1, got " + std::to_string(m));
    auto& f = cyclic_orders;
    std::sort(f.begin(), f.end());
    // After pass i, f[i] is the gcd of f[i..] and divides every later entry.
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = i + 1; j < f.size(); ++j) {
            const auto g = std::gcd(f[i], f[j]);
            const auto l = f[i] / g * f[j];
            f[i] = g;
            f[j] = l;
        }
    std::erase(f, 1);
    return GroupSpec::from_invariant_factors(std::move(f));
}

GroupSpec parse_group(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ParseError("empty group literal");

    auto parse_int = [&](std::string_view tok, std::string_view whole) -> std::int64_t {
        if (tok.empty() || tok.size() > 12 ||
            !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw ParseError("bad token '" + std::string(whole) + "' in group literal '" +
                             std::string(text) + "'");
        return std::stoll(std::string(tok));
    };

    std::vector<std::int64_t> orders;
    const bool comma_form = s.find(',') != std::string::npos ||
                            std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    std::vector<std::string> toks;
    {
        std::string cur;
        const char sep = comma_form ? ',' : 'x';
        for (char c : s) {
            if (c == sep || (!comma_form && c == 'X')) {
                toks.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        toks.push_back(cur);
    }
    for (const auto& tok : toks) {
        std::string_view t = tok;
        auto positive = [&](std::int64_t n) {
            if (n < 1) throw ParseError("bad token '" + tok + "': cyclic order must be >= 1");
            return n;
        };
        if (comma_form) {
            orders.push_back(positive(parse_int(t, tok)));
        } else {
            if (t.empty() || (t[0] != 'C' && t[0] != 'c'))
                throw ParseError("bad token '" + tok + "' in group literal '" + std::string(text) + "'");
            t.remove_prefix(1);
            std::int64_t power = 1;
            if (auto caret = t.find('^'); caret != std::string_view::npos) {
                power = parse_int(t.substr(caret + 1), tok);
                t = t.substr(0, caret);
            }
            const auto n = positive(parse_int(t, tok));
            for (std::int64_t i = 0; i < power; ++i) orders.push_back(n);
        }
    }
    return make_group(std::move(orders));
}

GroupElement::GroupElement(GroupSpec group, Index code) : group_(std::move(group)), code_(code) {
    if (code_ >= group_.order()) throw PreconditionViolated("element code out of range");
}

GroupElement::GroupElement(GroupSpec group, std::span<const std::int64_t> coords)
    : group_(std::move(group)), code_(group_.encode(coords)) {}

std::string GroupElement::to_string() const {
    auto c = coords();
    std::string s = "(";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(c[i]);
    }
    return s + ")";
}

bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.code_ == b.code_ && a.group_ == b.group_;
}

std::strong_ordering operator<=>(const GroupElement& a, const GroupElement& b) {
    check_same_group(a.group_, b.group_);
    return a.code_ <=> b.code_;
}

void check_same_group(const GroupSpec& a, const GroupSpec& b) {
    if (!(a == b)) throw GroupMismatch("elements of " + a.to_string() + " and " + b.to_string());
}

GroupElement zero(const GroupSpec& group) { return GroupElement(group, Index{0}); }

GroupElement add(const GroupElement& g, const GroupElement& h) {
    check_same_group(g.group(), h.group());
    return GroupElement(g.group(), g.group().add(g.code(), h.code()));
}

GroupElement neg(const GroupElement& g) { return GroupElement(g.group(), g.group().neg(g.code())); }
GroupElement operator+(const GroupElement& g, const GroupElement& h) { return add(g, h); }
GroupElement operator-(const GroupElement& g) { return neg(g); }
GroupElement operator*(std::int64_t k, const GroupElement& g) {
    return GroupElement(g.group(), g.group().mul(k, g.code()));
}
std::int64_t ord(const GroupElement& g) { return g.group().ord(g.code()); }

std::int64_t exponent(const GroupSpec& group) { return group.exponent(); }
int rank(const GroupSpec& group) { return group.rank(); }
int p_rank(const GroupSpec& group, std::int64_t p) {
    if (!is_prime(p)) throw PreconditionViolated("p_rank needs a prime, got " + std::to_string(p));
    return group.p_rank(p);
}
std::int64_t d_star(const GroupSpec& group) { return group.d_star(); }

std::vector<Index> subgroup_closure(const GroupSpec& group, std::span<const Index> generators) {
    std::vector<char> in(static_cast<std::size_t>(group.order()), 0);
    std::vector<Index> members{0};
    in[0] = 1;
    for (Index g : generators) {
        // Close under adding g; members stays a subgroup after each generator.
        for (std::size_t i = 0; i < members.size(); ++i) {
            Index x = group.add(members[i], g);
            if (!in[x]) {
                in[x] = 1;
                members.push_back(x);
            }
        }
    }
    std::sort(members.begin(), members.end());
    return members;
}

std::vector<GroupElement> subgroup_generated(const GroupSpec& group,
                                             std::span<const GroupElement> elements) {
    std::vector<Index> codes;
    for (const auto& e : elements) {
        check_same_group(group, e.group());
        codes.push_back(e.code());
    }
    std::vector<GroupElement> out;
    for (Index c : subgroup_closure(group, codes)) out.emplace_back(group, c);
    return out;
}

std::vector<GroupElement> subgroup_generated(std::span<const GroupElement> elements) {
    if (elements.empty()) throw PreconditionViolated("subgroup_generated needs the group for an empty set");
    return subgroup_generated(elements.front().group(), elements);
}

bool is_independent(const GroupSpec& group, std::span<const Index> tuple) {
    std::int64_t prod = 1;
    for (Index e : tuple) {
        if (e == 0) return false;
        prod *= group.ord(e);
        if (prod > group.order()) return false;
    }
    return static_cast<std::int64_t>(subgroup_closure(group, tuple).size()) == prod;
}

bool is_independent(std::span<const GroupElement> tuple) {
    if (tuple.empty()) return true;
    std::vector<Index> codes;
    for (const auto& e : tuple) {
        check_same_group(tuple.front().group(), e.group());
        codes.push_back(e.code());
    }
    return is_independent(tuple.front().group(), codes);
}

bool is_basis(std::span<const GroupElement> tuple, const GroupSpec& group) {
    std::vector<Index> codes;
    std::int64_t prod = 1;
    for (const auto& e : tuple) {
        check_same_group(group, e.group());
        codes.push_back(e.code());
        if (e.is_zero()) return false;
        prod *= ord(e);
        if (prod > group.order()) return false;
    }
    return prod == group.order() && is_independent(group, codes);
}

std::vector<GroupElement> extract_high_order_basis(std::span<const GroupElement> support,
                                                   const GroupSpec& group) {
    const auto& f = group.factors();
    const auto p = group.p_group_prime();
    if (!p || f.front() == f.back())
        throw PreconditionViolated("extract_high_order_basis needs G = C_{p^s1}^r1 + C_{p^s2}^r2 with s1 < s2, got " +
                                   group.to_string());
    const auto low = f.front(), high = f.back();
    const auto r1 = static_cast<std::size_t>(std::count(f.begin(), f.end(), low));
    if (r1 + static_cast<std::size_t>(std::count(f.begin(), f.end(), high)) != f.size())
        throw PreconditionViolated("group has more than two distinct invariant factors: " + group.to_string());
    if (static_cast<std::int64_t>(subgroup_generated(group, support).size()) != group.order())
        throw PreconditionViolated("support does not generate " + group.to_string());
    const std::size_t r2 = f.size() - r1;
    const std::int64_t q = *p;

    // Projections to the C_{p^s2}^{r2} summand form a basis of it iff their
    // reductions mod p are linearly independent over F_p; select greedily.
    std::vector<std::vector<std::int64_t>> echelon;  // rows over F_p, pivot = first nonzero
    std::vector<GroupElement> chosen;
    auto pivot_of = [](const std::vector<std::int64_t>& v) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i]) return i;
        return v.size();
    };
    auto inverse_mod = [q](std::int64_t a) {
        for (std::int64_t x = 1; x < q; ++x)
            if (a * x % q == 1) return x;
        return std::int64_t{0};
    };
    for (const auto& g : support) {
        auto c = g.coords();
        std::vector<std::int64_t> v(c.begin() + static_cast<std::ptrdiff_t>(r1), c.end());
        for (auto& x : v) x = floor_mod(x, q);
        for (const auto& row : echelon) {
            auto piv = pivot_of(row);
            if (v[piv] == 0) continue;
            auto factor = v[piv] * inverse_mod(row[piv]) % q;
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = floor_mod(v[i] - factor * row[i], q);
        }
        if (pivot_of(v) == v.size()) continue;
        echelon.push_back(v);
        chosen.push_back(g);
        if (chosen.size() == r2) break;
    }
    if (chosen.size() != r2 || !is_independent(chosen) ||
        !std::all_of(chosen.begin(), chosen.end(), [&](const GroupElement& e) { return ord(e) == high; }))
        throw PreconditionViolated("no high-order basis found in support");
    return chosen;
}

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::int64_t> prime_divisors(std::int64_t n) {
    std::vector<std::int64_t> ps;
    for (std::int64_t d = 2; d * d <= n; ++d) {
        if (n % d) continue;
        ps.push_back(d);
        while (n % d == 0) n /= d;
    }
    if (n > 1) ps.push_back(n);
    return ps;
}

}  // namespace zs
