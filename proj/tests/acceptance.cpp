// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "oracles.hpp"
#include "zerosum/report.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

using namespace zs;

namespace {

struct Criterion {
    int id;
    std::string title;
    bool ok = true;
    std::vector<std::string> problems;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (cond) return;
        ok = false;
        if (problems.size() < 8) problems.push_back(what);
    }
};

int failures = 0;

void report(const Criterion& c, double seconds) {
    std::printf("%s %d %s: %s (%.2fs)\n", c.ok ? "PASS" : "FAIL", c.id, c.title.c_str(), c.detail.c_str(), seconds);
    for (const auto& p : c.problems) std::printf("    %s\n", p.c_str());
    if (!c.ok) ++failures;
}

template <class F>
void run(int id, const std::string& title, F body) {
    Criterion c;
    c.id = id;
    c.title = title;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    report(c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

std::vector<Index> symmetric(const GroupSpec& g, std::vector<Index> s) {
    const auto n = s.size();
    for (std::size_t i = 0; i < n; ++i) s.push_back(g.neg(s[i]));
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

// d | |V|-2 for all atoms V over s and d | ord(g)-2 for g in s
bool observations(const GroupSpec& g, const AtomSet& a, std::int64_t d, std::string& why) {
    if (d == 0) return true;
    for (const auto& v : a.atoms)
        if ((v.length() - 2) % d != 0) {
            why = v.to_string() + " has length " + std::to_string(v.length());
            return false;
        }
    for (auto x : a.support)
        if ((g.ord(x) - 2) % d != 0) {
            why = GroupElement(g, x).to_string() + " has order " + std::to_string(g.ord(x));
            return false;
        }
    return true;
}

const std::vector<std::string> kPositive{"C3xC3", "C2xC4", "C2^2xC4", "C4xC4", "C2xC6", "C2xC2xC6"};
const std::vector<std::pair<std::string, std::int64_t>> kNegative{{"C5", 3}, {"C7", 5}, {"C2^3", 2}, {"C2^4", 3}};

}  // namespace

int main() {
    std::cout << std::unitbuf;

    run(1, "Davenport constants", [](Criterion& c) {
        std::vector<std::pair<GroupSpec, std::int64_t>> cases;
        for (int n = 2; n <= 12; ++n) cases.emplace_back(make_group({n}), n);
        for (int r = 2; r <= 5; ++r) cases.emplace_back(make_group(std::vector<std::int64_t>(r, 2)), r + 1);
        for (const auto* s : {"C3xC3", "C2xC4", "C2^2xC4", "C4xC4", "C3xC9", "C2xC6"}) {
            const auto g = parse_group(s);
            cases.emplace_back(g, g.d_star());
        }
        for (const auto& [g, expect] : cases) {
            const auto d = davenport(g, {});
            c.expect(d.exact, g.to_string() + ": search did not finish");
            c.expect(d.value == expect,
                     g.to_string() + ": D = " + std::to_string(d.value) + ", expected " + std::to_string(expect));
            c.expect(is_zero_sum_free(d.witness) && d.witness.length() == d.value - 1,
                     g.to_string() + ": witness is not a zero-sum free sequence of length D-1");
        }
        c.detail = std::to_string(cases.size()) + " groups exact";
    });

    run(2, "positive instances hold", [](Criterion& c) {
        std::int64_t atoms = 0;
        for (const auto& s : kPositive) {
            const auto g = parse_group(s);
            const auto rep = verify_conjecture(g, {});
            c.expect(rep.overall == Verdict::Holds, s + ": " + to_string(rep.overall));
            c.expect(rep.max_atoms_complete && !rep.per_atom.empty(), s + ": max atoms incomplete");
            for (const auto& r : rep.per_atom) {
                ++atoms;
                c.expect(r.status == Verdict::Holds && r.min_delta == 1, s + ": " + r.atom.to_string() + " not Holds");
                c.expect(r.witness && check_factorization_pair(*r.witness, 1),
                         s + ": " + r.atom.to_string() + " witness missing or wrong");
            }
        }
        c.detail = std::to_string(kPositive.size()) + " groups, " + std::to_string(atoms) + " max atoms with witnesses";
    });

    run(3, "negative controls fail with the predicted d", [](Criterion& c) {
        std::ostringstream os;
        for (const auto& [s, d] : kNegative) {
            const auto rep = verify_conjecture(parse_group(s), {});
            c.expect(rep.overall == Verdict::Fails, s + ": " + to_string(rep.overall));
            c.expect(rep.worst_d() == d, s + ": worst d = " + (rep.worst_d() ? std::to_string(*rep.worst_d()) : "none"));
            for (const auto& r : rep.per_atom) {
                c.expect(r.status == Verdict::Fails && r.min_delta == d, s + ": " + r.atom.to_string());
                c.expect(r.witness && check_factorization_pair(*r.witness, d), s + ": witness for " + r.atom.to_string());
            }
            os << s << " d=" << d << " ";
        }
        c.detail = os.str();
    });

    run(4, "the (-U)U construction over C5^2", [](Criterion& c) {
        const auto r = remark24_suite(5, 2, 1, {});
        const auto g = r.group;
        c.expect(r.u == parse_sequence(g, "(1,0)^4,(0,1)^4,(1,1)"), "U = " + r.u.to_string());
        c.expect(r.u_is_atom && zs::is_atom(r.u), "U is not an atom");
        const auto d = davenport(g, {}).value;
        c.expect(r.u_length == 9 && d == 9, "|U| = " + std::to_string(r.u_length) + ", D = " + std::to_string(d));
        const bool has3 = std::binary_search(r.lengths.begin(), r.lengths.end(), 3);
        c.expect(r.min_l == 2 && !has3 && r.max_l == 9, "L = " + std::to_string(r.lengths.size()) + " lengths");
        c.expect(r.rho == Rational::of(9, 2), "rho = " + r.rho.to_string());
        // independent recomputation of L from atoms over the pm-support
        const auto a = enumerate_atoms(g, pm_support_codes(r.u), {});
        const auto l = set_of_lengths(concat(negate(r.u), r.u), a);
        c.expect(l.complete && l.lengths == r.lengths, "set of lengths does not recompute");
        std::ostringstream os;
        os << "|U|=9, L = {";
        for (std::size_t i = 0; i < l.lengths.size(); ++i) os << (i ? "," : "") << l.lengths[i];
        os << "}, rho = " << r.rho.to_string();
        c.detail = os.str();
    });

    run(5, "kernel gcd agrees with brute-force lengths", [](Criterion& c) {
        std::mt19937_64 rng(2024);
        std::vector<std::pair<GroupSpec, std::vector<Index>>> cases;
        const auto groups = groups_up_to_order(9, false);
        for (const auto& g : groups) cases.emplace_back(g, oracle::all_codes(g));
        std::size_t random = 0;
        while (random < 240) {
            const auto& g = groups[rng() % groups.size()];
            auto s = oracle::random_subset(rng, g);
            if (s.empty()) continue;
            cases.emplace_back(g, std::move(s));
            ++random;
        }
        std::int64_t found = 0, none = 0, skipped = 0;
        for (const auto& [g, s] : cases) {
            const auto a = enumerate_atoms(g, s, {});
            const auto gcd = kernel_sum_gcd(integer_kernel(build_atom_matrix(a)));
            const auto bf = min_delta_bruteforce(g, s, 12);
            const auto label = g.to_string() + " " + Sequence::from_codes(g, s).to_string();
            if (bf.status == SearchStatus::Inconclusive) {
                ++skipped;
                c.expect(gcd != 0, label + ": brute force inconclusive");
                continue;
            }
            if (gcd == 0) c.expect(bf.status == SearchStatus::NoDistance, label + ": gcd 0 but a distance exists");
            if (bf.status == SearchStatus::Found) {
                ++found;
                c.expect(bf.min_delta == gcd, label + ": brute force " + std::to_string(bf.min_delta) + " vs gcd " +
                                                  std::to_string(gcd));
            } else {
                ++none;
            }
        }
        c.expect(random >= 200, "too few random supports");
        c.detail = std::to_string(cases.size()) + " supports (" + std::to_string(random) + " random), " +
                   std::to_string(found) + " with a distance, " + std::to_string(none) + " without, " +
                   std::to_string(skipped) + " over budget";
    });

    run(6, "d divides |V|-2 and ord(g)-2", [](Criterion& c) {
        std::int64_t supports = 0, atoms = 0;
        std::vector<std::string> names = kPositive;
        for (const auto& [s, d] : kNegative) names.push_back(s);
        for (const auto& s : names) {
            const auto g = parse_group(s);
            const auto rep = verify_conjecture(g, {});
            for (const auto& r : rep.per_atom) {
                const auto a = enumerate_atoms(g, pm_support_codes(r.atom), {});
                const auto d = kernel_sum_gcd(integer_kernel(build_atom_matrix(a)));
                c.expect(r.half_factorial ? d == 0 : r.min_delta == d, s + ": verifier d differs from kernel");
                std::string why;
                const bool holds = observations(g, a, d, why);
                c.expect(holds, s + " d=" + std::to_string(d) + ": " + why);
                ++supports;
                atoms += static_cast<std::int64_t>(a.atoms.size());
            }
        }
        // random negation-closed supports without 0 in small groups
        std::mt19937_64 rng(7);
        const auto groups = groups_up_to_order(12, false);
        for (int it = 0; it < 150; ++it) {
            const auto& g = groups[rng() % groups.size()];
            auto s = symmetric(g, oracle::random_subset(rng, g));
            std::erase(s, Index{0});
            if (s.empty()) continue;
            const auto a = enumerate_atoms(g, s, {});
            const auto d = kernel_sum_gcd(integer_kernel(build_atom_matrix(a)));
            std::string why;
            const bool holds = observations(g, a, d, why);
            c.expect(holds, g.to_string() + " d=" + std::to_string(d) + ": " + why);
            ++supports;
            atoms += static_cast<std::int64_t>(a.atoms.size());
        }
        c.detail = std::to_string(supports) + " supports, " + std::to_string(atoms) + " atoms";
    });

    run(7, "fast paths agree with the kernel", [](Criterion& c) {
        std::int64_t lemma = 0, divisor = 0, independent = 0;
        VerifyOptions audit;
        audit.audit = true;
        for (const auto& s : kPositive) {
            const auto g = parse_group(s);
            const auto rep = verify_conjecture(g, audit);
            for (const auto& r : rep.per_atom) {
                c.expect(r.kernel_gcd.has_value(), s + ": audit did not run the kernel");
                if (r.certificate) {
                    ++lemma;
                    c.expect(check_lemma31_certificate(r.atom, *r.certificate), s + ": bad certificate");
                    c.expect(r.kernel_gcd == 1, s + ": certificate but kernel gcd != 1");
                }
                if (r.divisor_bound == 1) {
                    ++divisor;
                    c.expect(r.kernel_gcd == 1, s + ": g* = 1 but kernel gcd != 1");
                }
                if (r.audit_agrees) c.expect(*r.audit_agrees, s + ": audit disagreement");
            }
            // every max atom, both signs, checked on its own
            for (const auto& u : enumerate_max_atoms(g, {}, false).atoms) {
                const auto cert = lemma31_check(u);
                if (!cert) continue;
                ++independent;
                c.expect(check_lemma31_certificate(u, *cert), s + ": bad certificate for " + u.to_string());
                const auto a = enumerate_atoms(g, pm_support_codes(u), {});
                c.expect(kernel_sum_gcd(integer_kernel(build_atom_matrix(a))) == 1,
                         s + ": certificate but kernel gcd != 1 for " + u.to_string());
            }
        }
        c.detail = std::to_string(lemma) + " certificates, " + std::to_string(divisor) + " divisor paths, " +
                   std::to_string(independent) + " independent certificates";
    });

    run(8, "distance and elasticity bounds", [](Criterion& c) {
        std::vector<std::pair<std::string, std::int64_t>> samples{
            {"C3", 14},    {"C4", 14},    {"C5", 14},      {"C6", 14},    {"C2xC2", 14}, {"C7", 14},
            {"C2^3", 12},  {"C3xC3", 10}, {"C2xC4", 10},   {"C2xC6", 9},  {"C2^2xC4", 8}, {"C4xC4", 8},
            {"C2xC2xC6", 7}};
        std::int64_t distances = 0, lengths_checked = 0;
        for (const auto& [s, bound] : samples) {
            const auto g = parse_group(s);
            const auto d = davenport(g, {}).value;
            const auto sample = delta_of_group_sample(g, bound);
            c.expect(sample.complete, s + ": sample incomplete");
            for (auto x : sample.distances) {
                ++distances;
                c.expect(1 <= x && x <= d - 2, s + ": distance " + std::to_string(x));
            }
            c.expect(sample.max_rho <= Rational::of(d, 2), s + ": rho " + sample.max_rho.to_string());
            for (const auto& u : enumerate_max_atoms(g, {}, true, d).atoms) {
                const auto a = enumerate_atoms(g, pm_support_codes(u), {});
                const auto l = set_of_lengths(concat(negate(u), u), a);
                ++lengths_checked;
                c.expect(l.complete && rho_of(l) == Rational::of(d, 2),
                         s + ": rho of (-U)U is " + rho_of(l).to_string());
            }
        }
        c.detail = std::to_string(samples.size()) + " groups, " + std::to_string(distances) + " sampled distances, " +
                   std::to_string(lengths_checked) + " (-U)U sets at rho = D/2";
    });

    std::printf("DECLARED 9 not reproduced at this scale: D(C2^4xC6) and larger, the set of distances of the "
                "elasticity, explicit corollary constants\n");

    std::printf("%s\n", failures == 0 ? "ALL PASS" : (std::to_string(failures) + " FAILED").c_str());
    return failures == 0 ? 0 : 1;
}
