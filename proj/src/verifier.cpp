#include "zerosum/verifier.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace zs {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Fails: return "Fails";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

std::string to_string(FastPath f) {
    switch (f) {
    case FastPath::Divisor: return "divisor";
    case FastPath::Lemma31: return "lemma31";
    case FastPath::Kernel: return "kernel";
    }
    return "?";
}

// ---- classification ----

bool CaseClassification::has(std::string_view name) const {
    return std::any_of(cases.begin(), cases.end(), [&](const CaseClaim& c) { return c.name == name; });
}

std::string CaseClassification::summary() const {
    if (excluded) return "excluded: " + *excluded;
    if (cases.empty()) return "none";
    std::string s;
    for (const auto& c : cases) s += (s.empty() ? "" : ",") + c.name;
    return s;
}

namespace {

bool power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

// s with p^s = n, or -1.
int log_p(std::int64_t n, std::int64_t p) {
    int s = 0;
    while (n % p == 0) n /= p, ++s;
    return n == 1 ? s : -1;
}

}  // namespace

CaseClassification classify_group(const GroupSpec& group, std::optional<std::int64_t> davenport) {
    CaseClassification c;
    const auto p_group = group.p_group_prime();
    if (!davenport && p_group) davenport = group.d_star();
    c.davenport = davenport;
    if (group.is_cyclic()) {
        c.excluded = "cyclic";
        return c;
    }
    if (group.is_elementary_2_group()) {
        c.excluded = "elementary 2-group";
        return c;
    }
    const auto exp = group.exponent();

    if (p_group) {
        const auto p = *p_group;
        const auto g = std::gcd(exp - 2, *davenport - 2);
        if (g == 1) c.cases.push_back({"a", {{"p", p}, {"exp", exp}, {"D", *davenport}, {"gcd", g}}});

        // distinct invariant factors with their multiplicities
        std::vector<std::pair<std::int64_t, int>> blocks;
        for (auto n : group.factors()) {
            if (!blocks.empty() && blocks.back().first == n)
                ++blocks.back().second;
            else
                blocks.emplace_back(n, 1);
        }
        if (blocks.size() == 1 && blocks[0].second >= 2) {
            const int s = log_p(blocks[0].first, p);
            c.cases.push_back({"b", {{"p", p}, {"s1", s}, {"s2", s}, {"r", blocks[0].second}}});
        } else if (blocks.size() == 2) {
            const int s1 = log_p(blocks[0].first, p), s2 = log_p(blocks[1].first, p);
            if (s2 % s1 == 0)
                c.cases.push_back(
                    {"b", {{"p", p}, {"s1", s1}, {"s2", s2}, {"r1", blocks[0].second}, {"r2", blocks[1].second}}});
        }
    }

    const auto primes = prime_divisors(exp);
    if (primes.size() == 2 && primes[0] * primes[1] == exp) {
        // q is 2 when 2 divides exp, else the smaller prime
        const auto q = primes[0], p = primes[1];
        const auto pq = exp;
        if (davenport) {
            const auto g = std::gcd(pq - 2, *davenport - 2);
            if (g == 1) c.cases.push_back({"c.i", {{"p", p}, {"q", q}, {"D", *davenport}, {"gcd", g}}});
        } else {
            c.needs_davenport.push_back("c.i");
        }
        if (std::gcd(pq - 2, p + q - 3) == 1) c.cases.push_back({"c.ii", {{"p", p}, {"q", q}, {"gcd", 1}}});
        if (q == 2 && power_of_two(p - 1)) c.cases.push_back({"c.iii", {{"p", p}, {"q", q}}});
        if (q == 2 && group.p_rank(p) == 1) c.cases.push_back({"c.iv", {{"p", p}, {"q", q}, {"r_p", 1}}});
    }
    if (exp >= 3 && exp <= 11 && exp != 8) c.cases.push_back({"d", {{"exp", exp}}});
    return c;
}

// ---- divisor constraints ----

std::int64_t divisor_constraints(const Sequence& u, std::span<const std::int64_t> atom_lengths) {
    const auto& g = u.group();
    std::int64_t acc = std::abs(u.length() - 2);
    for (Index x : pm_support_codes(u)) acc = std::gcd(acc, std::abs(g.ord(x) - 2));
    for (auto l : atom_lengths) acc = std::gcd(acc, std::abs(l - 2));
    return acc;
}

// ---- independent tuples from supp(U) ----

bool lemma31_applicable(const GroupSpec& group) { return group.rank() >= 2 && group.exponent() >= 3; }

namespace {

// Independent subsets of `elems` with at least two members, in DFS order,
// until `visit` returns true.
bool independent_subsets(const GroupSpec& group, const std::vector<Index>& elems, std::size_t from,
                         std::vector<Index>& cur, const std::function<bool(const std::vector<Index>&)>& visit) {
    for (std::size_t i = from; i < elems.size(); ++i) {
        cur.push_back(elems[i]);
        if (is_independent(group, cur)) {
            if (cur.size() >= 2 && visit(cur)) return true;
            if (independent_subsets(group, elems, i + 1, cur, visit)) return true;
        }
        cur.pop_back();
    }
    return false;
}

std::int64_t product_of_orders(const GroupSpec& group, const std::vector<Index>& t) {
    std::int64_t n = 1;
    for (auto e : t) n *= group.ord(e);
    return n;
}

}  // namespace

std::optional<Lemma31Certificate> lemma31_check(const Sequence& u) {
    const auto& group = u.group();
    if (!lemma31_applicable(group)) return std::nullopt;
    std::vector<Index> supp = u.support_codes();
    std::erase(supp, Index{0});

    std::optional<Lemma31Certificate> found;
    std::vector<Index> cur;
    independent_subsets(group, supp, 0, cur, [&](const std::vector<Index>& t) {
        if (product_of_orders(group, t) != group.order()) return false;
        found = Lemma31Certificate{Lemma31Certificate::Kind::Basis, t, 0, 0, {}};
        return true;
    });
    if (found) return found;

    cur.clear();
    independent_subsets(group, supp, 0, cur, [&](const std::vector<Index>& t) {
        // coefficient vectors of <t>, keyed by element
        std::map<Index, std::vector<std::int64_t>> span;
        std::vector<std::int64_t> coef(t.size(), 0);
        for (;;) {
            Index x = 0;
            for (std::size_t i = 0; i < t.size(); ++i) x = group.add(x, group.mul(coef[i], t[i]));
            span.emplace(x, coef);
            std::size_t i = 0;
            while (i < t.size() && ++coef[i] == group.ord(t[i])) coef[i++] = 0;
            if (i == t.size()) break;
        }
        for (Index g : supp) {
            if (std::find(t.begin(), t.end(), g) != t.end()) continue;
            const auto n = group.ord(g);
            for (std::int64_t a = 1; a < n; ++a) {
                if (n % 2 == 0 && a == n / 2) continue;
                auto it = span.find(group.mul(a, g));
                if (it == span.end()) continue;
                const auto& k = it->second;
                if (std::all_of(k.begin(), k.end(), [](std::int64_t x) { return x != 0; })) {
                    found = Lemma31Certificate{Lemma31Certificate::Kind::Relation, t, g, a, k};
                    return true;
                }
            }
        }
        return false;
    });
    return found;
}

bool check_lemma31_certificate(const Sequence& u, const Lemma31Certificate& c) {
    const auto& group = u.group();
    if (!lemma31_applicable(group) || c.tuple.size() < 2) return false;
    auto in_supp = [&](Index x) { return u.count(x) > 0; };
    if (!std::all_of(c.tuple.begin(), c.tuple.end(), in_supp)) return false;
    if (!is_independent(group, c.tuple)) return false;
    if (c.kind == Lemma31Certificate::Kind::Basis) return product_of_orders(group, c.tuple) == group.order();
    if (!in_supp(c.g) || c.k.size() != c.tuple.size()) return false;
    const auto n = group.ord(c.g);
    if (c.a < 1 || c.a >= n || (n % 2 == 0 && c.a == n / 2)) return false;
    Index rhs = 0;
    for (std::size_t i = 0; i < c.tuple.size(); ++i) {
        if (c.k[i] < 1 || c.k[i] >= group.ord(c.tuple[i])) return false;
        rhs = group.add(rhs, group.mul(c.k[i], c.tuple[i]));
    }
    return group.mul(c.a, c.g) == rhs;
}

// ---- witnesses ----

std::int64_t FactorizationPair::difference() const {
    std::int64_t d = 0;
    for (const auto& [a, m] : right) d += m;
    for (const auto& [a, m] : left) d -= m;
    return d;
}

FactorizationPair to_factorization_pair(const AtomMatrix& m, const Witness& w) {
    FactorizationPair f;
    for (auto [i, k] : w.left) f.left.emplace_back(m.atoms[i], k);
    for (auto [i, k] : w.right) f.right.emplace_back(m.atoms[i], k);
    return f;
}

namespace {

std::optional<Sequence> product_of(const std::vector<std::pair<Sequence, std::int64_t>>& side) {
    if (side.empty()) return std::nullopt;
    std::vector<Term> terms;
    for (const auto& [a, k] : side) {
        if (k <= 0) return std::nullopt;
        for (const auto& t : a.terms()) terms.push_back({t.element, t.mult * k});
    }
    return Sequence(side.front().first.group(), std::move(terms));
}

}  // namespace

bool check_factorization_pair(const FactorizationPair& f, std::int64_t expected_difference) {
    for (const auto* side : {&f.left, &f.right})
        for (const auto& [a, k] : *side)
            if (!is_atom(a)) return false;
    const auto l = product_of(f.left), r = product_of(f.right);
    return l && r && *l == *r && f.difference() == expected_difference;
}

namespace {

// Explicit kernel vectors of the form (-V)V = prod (x(-x))^..., and
// x^n (-x)^n = (x(-x))^n, over atoms collected on the fly.
class RelationSystem {
public:
    explicit RelationSystem(GroupSpec group) : group_(std::move(group)) {}

    std::int64_t gcd() const { return gcd_; }

    // Adds the relation only when it lowers the running gcd.
    void add_atom_relation(const Sequence& v) {
        const auto s = v.length() - 2;
        if (!useful(s)) return;
        std::map<std::size_t, std::int64_t> z;
        z[index_of(v)] -= 1;
        z[index_of(negate(v))] -= 1;
        for (Index x : pm_support_codes(v)) {
            const Index nx = group_.neg(x);
            if (nx < x) continue;
            if (nx == x)
                z[index_of(Sequence(group_, {{x, 2}}))] += v.count(x);
            else
                z[index_of(Sequence(group_, {{x, 1}, {nx, 1}}))] += v.count(x) + v.count(nx);
        }
        push(z, s);
    }

    void add_order_relation(Index x) {
        const auto n = group_.ord(x);
        const Index nx = group_.neg(x);
        if (n < 3 || !useful(n - 2)) return;
        std::map<std::size_t, std::int64_t> z;
        z[index_of(Sequence(group_, {{x, n}}))] -= 1;
        z[index_of(Sequence(group_, {{nx, n}}))] -= 1;
        z[index_of(Sequence(group_, {{std::min(x, nx), 1}, {std::max(x, nx), 1}}))] += n;
        push(z, n - 2);
    }

    // Verified distance-one pair; requires gcd() == 1.
    FactorizationPair witness() const {
        AtomMatrix m;
        m.group = group_;
        m.atoms = atoms_;
        KernelBasis k;
        for (const auto& sparse : rows_) {
            std::vector<BigInt> z(atoms_.size(), 0);
            for (auto [i, c] : sparse) z[i] = c;
            k.sums.push_back(coordinate_sum(z));
            k.basis.push_back(std::move(z));
        }
        auto w = split_kernel_vector(m, kernel_vector_with_sum_gcd(k));
        auto f = to_factorization_pair(m, w);
        if (!check_factorization_pair(f, 1)) throw std::logic_error("divisor relation witness failed re-verification");
        return f;
    }

private:
    static BigInt coordinate_sum(const std::vector<BigInt>& z) {
        BigInt s = 0;
        for (const auto& x : z) s += x;
        return s;
    }

    bool useful(std::int64_t s) const {
        if (s == 0) return false;
        return std::gcd(gcd_, std::abs(s)) != gcd_ || gcd_ == 0;
    }

    void push(const std::map<std::size_t, std::int64_t>& z, std::int64_t s) {
        rows_.push_back(z);
        gcd_ = std::gcd(gcd_, std::abs(s));
    }

    std::size_t index_of(const Sequence& a) {
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if (atoms_[i] == a) return i;
        atoms_.push_back(a);
        return atoms_.size() - 1;
    }

    GroupSpec group_;
    std::vector<Sequence> atoms_;
    std::vector<std::map<std::size_t, std::int64_t>> rows_;
    std::int64_t gcd_ = 0;
};

struct SupportAnalysis {
    std::vector<Index> support;
    bool complete = false;
    std::vector<Sequence> atoms;  // possibly partial
    std::int64_t gcd = 0;
    std::optional<FactorizationPair> witness;  // for gcd >= 1
    bool observations_hold = true;
    std::optional<MinDeltaResult> brute;
    std::int64_t nodes = 0;
    std::string error;
};

SupportAnalysis analyze_support(const GroupSpec& group, const std::vector<Index>& support, const VerifyOptions& opt,
                                int inner_workers) {
    SupportAnalysis a;
    a.support = support;
    EnumerationBudget b = opt.budget;
    b.max_length.reset();
    b.workers = inner_workers;
    try {
        auto atoms = enumerate_atoms_cached(group, support, b, opt.cache);
        a.nodes = atoms.budget_used.nodes;
        a.atoms = atoms.atoms;
        a.complete = atoms.covers_all_atoms();
        if (!a.complete) {
            a.error = "atom enumeration stopped (" + atoms.budget_used.cap_hit + ")";
            return a;
        }
        const auto m = build_atom_matrix(atoms);
        const auto k = integer_kernel(m);
        a.gcd = kernel_sum_gcd(k);
        if (a.gcd >= 1) {
            const auto w = a.gcd == 1 ? *distance_one_witness(m, k) : general_distance_witness(m, k, a.gcd);
            a.witness = to_factorization_pair(m, w);
            if (!check_factorization_pair(*a.witness, a.gcd))
                throw std::logic_error("kernel witness failed re-verification");
        }
        if (a.gcd > 1) {
            for (const auto& v : a.atoms)
                if ((v.length() - 2) % a.gcd != 0) a.observations_hold = false;
            for (Index x : support)
                if ((group.ord(x) - 2) % a.gcd != 0) a.observations_hold = false;
        }
        if (opt.bruteforce_fallback && a.gcd != 1)
            a.brute = min_delta_bruteforce(group, support, opt.bruteforce_bound, opt.budget.max_nodes);
    } catch (const std::exception& e) {
        a.complete = false;
        a.error = e.what();
    }
    return a;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min<int>(workers, static_cast<int>(n)); ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace

std::optional<std::int64_t> VerificationReport::worst_d() const {
    std::optional<std::int64_t> worst;
    for (const auto& r : per_atom) {
        if (r.status != Verdict::Fails) continue;
        const auto d = r.half_factorial ? 0 : r.min_delta.value_or(0);
        if (!worst || d > *worst) worst = d;
    }
    return worst;
}

VerificationReport verify_conjecture(const GroupSpec& group, const VerifyOptions& opt) {
    VerificationReport rep;
    rep.group = group;
    rep.d_star = group.d_star();

    const bool known_equal = group.p_group_prime().has_value() || group.rank() <= 2;
    const auto dav = davenport(group, opt.budget);
    rep.nodes += dav.budget_used.nodes;
    rep.davenport_exact = dav.exact;
    rep.davenport = dav.value;
    rep.davenport_source = "search";
    if (known_equal) {
        rep.davenport_source = "d_star";
        if (dav.exact && dav.value != rep.d_star)
            throw std::logic_error("search found D != D* on a group where they agree");
        rep.davenport = rep.d_star;
        rep.davenport_exact = true;
    }
    rep.classification = classify_group(group, rep.davenport_exact ? std::optional(rep.davenport) : std::nullopt);
    if (!rep.davenport_exact) {
        rep.note = "Davenport search stopped (" + dav.budget_used.cap_hit + ")";
        rep.overall = Verdict::Inconclusive;
        return rep;
    }

    const auto max_atoms = enumerate_max_atoms(group, opt.budget, opt.negation_dedup, rep.davenport);
    rep.nodes += max_atoms.budget_used.nodes;
    rep.max_atoms_complete = max_atoms.complete;
    rep.max_atoms_total = static_cast<std::int64_t>(max_atoms.atoms.size());

    // Stage one of the divisor test needs nothing beyond U itself.
    std::vector<std::int64_t> stage1(max_atoms.atoms.size());
    for (std::size_t i = 0; i < stage1.size(); ++i) stage1[i] = divisor_constraints(max_atoms.atoms[i], {});

    // Distinct pm-supports that need atom enumeration.
    std::vector<std::vector<Index>> supports;
    std::vector<std::optional<std::size_t>> support_of(stage1.size());
    for (std::size_t i = 0; i < stage1.size(); ++i) {
        if (stage1[i] == 1 && !opt.audit) continue;
        auto s = pm_support_codes(max_atoms.atoms[i]);
        auto it = std::find(supports.begin(), supports.end(), s);
        support_of[i] = static_cast<std::size_t>(it - supports.begin());
        if (it == supports.end()) supports.push_back(std::move(s));
    }
    std::vector<SupportAnalysis> analyses(supports.size());
    const int outer = std::max(1, opt.budget.workers);
    parallel_for(supports.size(), outer, [&](std::size_t j) {
        analyses[j] = analyze_support(group, supports[j], opt, supports.size() > 1 ? 1 : outer);
    });
    for (const auto& a : analyses) rep.nodes += a.nodes;

    for (std::size_t i = 0; i < max_atoms.atoms.size(); ++i) {
        const auto& u = max_atoms.atoms[i];
        AtomRecord rec;
        rec.atom = u;
        const SupportAnalysis* an = support_of[i] ? &analyses[*support_of[i]] : nullptr;
        if (an) {
            rec.support_atoms = static_cast<std::int64_t>(an->atoms.size());
            if (an->complete) rec.kernel_gcd = an->gcd;
        }

        // (1) divisor constraints
        RelationSystem rel(group);
        rel.add_atom_relation(u);
        for (Index x : pm_support_codes(u)) rel.add_order_relation(x);
        if (rel.gcd() != 1 && an)
            for (const auto& v : an->atoms) rel.add_atom_relation(v);
        std::vector<std::int64_t> lengths;
        if (an)
            for (const auto& v : an->atoms) lengths.push_back(v.length());
        rec.divisor_bound = divisor_constraints(u, lengths);
        if (rec.divisor_bound != rel.gcd()) throw std::logic_error("divisor bound and relation system disagree");

        if (rec.divisor_bound == 1) {
            rec.fast_path = FastPath::Divisor;
            rec.status = Verdict::Holds;
            rec.min_delta = 1;
            rec.witness = rel.witness();
            if (opt.audit) {
                rec.audit_agrees = rec.kernel_gcd ? std::optional<bool>(*rec.kernel_gcd == 1) : std::nullopt;
                if (rec.audit_agrees == false) {
                    rec.status = Verdict::Inconclusive;
                    rec.note = "audit: kernel gcd disagrees with divisor fast path";
                }
            }
            rep.per_atom.push_back(std::move(rec));
            continue;
        }

        // (2) independent tuple certificate; the witness still comes from the kernel
        if (lemma31_applicable(group) && u.length() == rep.davenport) {
            rec.certificate = lemma31_check(u);
            if (rec.certificate && !check_lemma31_certificate(u, *rec.certificate))
                throw std::logic_error("lemma31 certificate failed re-check");
        }

        // (3) kernel path
        if (!an || !an->complete) {
            rec.fast_path = rec.certificate ? FastPath::Lemma31 : FastPath::Kernel;
            rec.status = Verdict::Inconclusive;
            rec.note = an ? an->error : "no support analysis";
            rep.per_atom.push_back(std::move(rec));
            continue;
        }
        if (rec.divisor_bound != 0 && an->gcd != 0 && rec.divisor_bound % an->gcd != 0)
            throw std::logic_error("kernel gcd does not divide the divisor bound");
        if (an->brute && an->brute->status == SearchStatus::Found) rec.bruteforce_min_delta = an->brute->min_delta;

        if (rec.certificate) {
            rec.fast_path = FastPath::Lemma31;
            rec.audit_agrees = an->gcd == 1;
            if (an->gcd != 1) {
                rec.status = Verdict::Inconclusive;
                rec.note = "audit: kernel gcd " + std::to_string(an->gcd) + " contradicts lemma31 certificate";
                rep.per_atom.push_back(std::move(rec));
                continue;
            }
        } else {
            rec.fast_path = FastPath::Kernel;
        }
        if (an->gcd == 1) {
            rec.status = Verdict::Holds;
            rec.min_delta = 1;
            rec.witness = an->witness;
        } else if (an->gcd == 0) {
            rec.status = Verdict::Fails;
            rec.half_factorial = true;
            rec.note = "half-factorial support";
        } else {
            rec.status = Verdict::Fails;
            rec.min_delta = an->gcd;
            rec.witness = an->witness;
            rec.observations_hold = an->observations_hold;
        }
        rep.per_atom.push_back(std::move(rec));
    }

    const auto any = [&](Verdict v) {
        return std::any_of(rep.per_atom.begin(), rep.per_atom.end(), [&](const AtomRecord& r) { return r.status == v; });
    };
    if (!max_atoms.complete) {
        rep.overall = Verdict::Inconclusive;
        rep.note = "max atom enumeration stopped (" + max_atoms.budget_used.cap_hit + ")";
    } else if (rep.per_atom.empty()) {
        rep.overall = Verdict::Inconclusive;
        rep.note = "no atoms of length D";
    } else if (any(Verdict::Inconclusive)) {
        rep.overall = Verdict::Inconclusive;
    } else if (any(Verdict::Fails)) {
        rep.overall = Verdict::Fails;
    } else {
        rep.overall = Verdict::Holds;
    }
    return rep;
}

// ---- (-U)^k U^k over C_p^r ----

Remark24Record remark24_suite(std::int64_t p, std::int64_t r, std::int64_t k, const EnumerationBudget& budget) {
    if (p < 5 || !is_prime(p)) throw PreconditionViolated("p must be a prime >= 5");
    if (r < 2) throw PreconditionViolated("r must be >= 2");
    if (k < 1) throw PreconditionViolated("k must be >= 1");
    Remark24Record rec;
    rec.p = p, rec.r = r, rec.k = k;
    rec.group = make_group(std::vector<std::int64_t>(static_cast<std::size_t>(r), p));
    const auto& G = rec.group;
    rec.d_star = G.d_star();

    auto unit = [&](std::int64_t i) {
        std::vector<std::int64_t> c(static_cast<std::size_t>(r), 0);
        c[static_cast<std::size_t>(i)] = 1;
        return G.encode(c);
    };
    // U = e_1^{p-1} ... e_r^{p-1} e_0 with e_0 = e_1 + ... + e_r
    auto build = [&](const std::vector<Index>& basis) {
        std::vector<Term> terms;
        Index e0 = 0;
        for (Index e : basis) {
            terms.push_back({e, p - 1});
            e0 = G.add(e0, e);
        }
        terms.push_back({e0, 1});
        return Sequence(G, std::move(terms));
    };
    std::vector<Index> std_basis;
    for (std::int64_t i = 0; i < r; ++i) std_basis.push_back(unit(i));
    rec.u = build(std_basis);
    rec.u_is_atom = is_atom(rec.u);
    rec.u_length = rec.u.length();

    const auto dav = davenport(G, budget);
    if (dav.exact) rec.davenport = dav.value;

    // A_k = (-U)^k U^k
    const auto neg_u = negate(rec.u);
    std::vector<Term> a_terms;
    for (const Sequence* s : std::array<const Sequence*, 2>{&rec.u, &neg_u})
        for (const auto& t : s->terms()) a_terms.push_back({t.element, t.mult * k});
    const Sequence a_k(G, std::move(a_terms));
    EnumerationBudget b = budget;
    b.max_length.reset();
    const auto support = pm_support_codes(rec.u);
    const auto atoms = enumerate_atoms(G, support, b);
    if (!atoms.covers_all_atoms()) {
        rec.note = "atom enumeration over pm-support stopped (" + atoms.budget_used.cap_hit + ")";
        return rec;
    }
    const auto l = set_of_lengths(a_k, atoms, budget.max_nodes);
    if (!l.complete) {
        rec.note = "set of lengths search stopped";
        return rec;
    }
    rec.lengths = l.lengths;
    rec.min_l = l.lengths.front();
    rec.max_l = l.lengths.back();
    rec.gap_at_2k_plus_1 = !std::binary_search(l.lengths.begin(), l.lengths.end(), 2 * k + 1);
    rec.rho = rho_of(l);

    // every nonzero g extends to a basis, hence lies in a max atom
    for (Index g = 1; g < static_cast<Index>(G.order()); ++g) {
        ++rec.spot_checked;
        std::vector<Index> basis{g};
        for (Index e : std_basis) {
            if (static_cast<std::int64_t>(basis.size()) == r) break;
            auto span = subgroup_closure(G, basis);
            if (!std::binary_search(span.begin(), span.end(), e)) basis.push_back(e);
        }
        const auto v = build(basis);
        if (is_atom(v) && v.length() == rec.d_star && v.count(g) > 0) ++rec.spot_in_max_atom;
    }

    const bool ok = rec.u_is_atom && rec.u_length == rec.d_star && (!rec.davenport || *rec.davenport == rec.d_star) &&
                    rec.min_l == 2 * k && rec.gap_at_2k_plus_1 && rec.max_l == k * rec.d_star &&
                    rec.rho == Rational::of(rec.d_star, 2) && rec.spot_in_max_atom == rec.spot_checked;
    rec.status = ok ? Verdict::Holds : Verdict::Fails;
    return rec;
}

// ---- sweep ----

nlohmann::json to_json(const SweepEntry& e) {
    nlohmann::json j{{"group", e.group},
                     {"D", e.davenport},
                     {"D_star", e.d_star},
                     {"classification", e.classification},
                     {"overall", to_string(e.overall)}};
    j["worst_d"] = e.worst_d ? nlohmann::json(*e.worst_d) : nlohmann::json(nullptr);
    if (!e.error.empty()) j["error"] = e.error;
    return j;
}

SweepEntry sweep_entry_from_json(const nlohmann::json& j) {
    SweepEntry e;
    e.group = j.at("group").get<std::string>();
    e.davenport = j.at("D").get<std::int64_t>();
    e.d_star = j.at("D_star").get<std::int64_t>();
    e.classification = j.at("classification").get<std::string>();
    const auto o = j.at("overall").get<std::string>();
    e.overall = o == "Holds" ? Verdict::Holds : o == "Fails" ? Verdict::Fails : Verdict::Inconclusive;
    if (!j.at("worst_d").is_null()) e.worst_d = j.at("worst_d").get<std::int64_t>();
    if (j.contains("error")) e.error = j.at("error").get<std::string>();
    return e;
}

SweepEntry summarize(const VerificationReport& r) {
    SweepEntry e;
    e.group = r.group.to_string();
    e.davenport = r.davenport;
    e.d_star = r.d_star;
    e.classification = r.classification.summary();
    e.overall = r.overall;
    e.worst_d = r.worst_d();
    return e;
}

std::vector<SweepEntry> sweep(const std::vector<GroupSpec>& groups, const VerifyOptions& options,
                              const std::optional<std::filesystem::path>& state_file, const std::string& tag,
                              const std::function<void(const VerificationReport&)>& on_report) {
    std::map<std::string, SweepEntry> done;
    if (state_file && std::filesystem::exists(*state_file)) {
        std::ifstream in(*state_file);
        for (std::string line; std::getline(in, line);) {
            if (line.empty()) continue;
            try {
                auto j = nlohmann::json::parse(line);
                if (j.value("tag", "") != tag) continue;
                auto e = sweep_entry_from_json(j.at("entry"));
                done[e.group] = e;
            } catch (const std::exception&) {
                // a torn last line from an interrupted run
            }
        }
    }
    std::vector<SweepEntry> out;
    for (const auto& g : groups) {
        const auto name = g.to_string();
        if (auto it = done.find(name); it != done.end()) {
            out.push_back(it->second);
            out.back().resumed = true;
            continue;
        }
        SweepEntry e;
        try {
            const auto rep = verify_conjecture(g, options);
            if (on_report) on_report(rep);
            e = summarize(rep);
        } catch (const std::exception& ex) {
            e.group = name;
            e.d_star = g.d_star();
            e.overall = Verdict::Inconclusive;
            e.error = ex.what();
        }
        if (state_file && e.error.empty()) {
            std::ofstream os(*state_file, std::ios::app);
            os << nlohmann::json{{"tag", tag}, {"entry", to_json(e)}}.dump() << '\n';
        }
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace zs
