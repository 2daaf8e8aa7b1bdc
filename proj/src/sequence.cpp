#include "zerosum/sequence.hpp"

#include <cctype>
#include <map>

namespace zs {

std::int64_t ElementBitset::count() const {
    std::int64_t c = 0;
    for (auto w : words_) c += __builtin_popcountll(w);
    return c;
}

std::vector<Index> ElementBitset::members() const {
    std::vector<Index> out;
    for_each([&](Index i) { out.push_back(i); });
    return out;
}

void extend_subsums(const GroupSpec& group, const ElementBitset& sums, Index g, ElementBitset& out) {
    out = sums;
    out.set(g);
    sums.for_each([&](Index x) { out.set(group.add(x, g)); });
}

Sequence::Sequence(GroupSpec group) : group_(std::move(group)) {}

Sequence::Sequence(GroupSpec group, std::vector<Term> terms) : group_(std::move(group)) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.element < b.element; });
    for (const auto& t : terms) {
        if (t.element >= group_.order()) throw PreconditionViolated("term outside group " + group_.to_string());
        if (t.mult < 0) throw PreconditionViolated("negative multiplicity");
        if (t.mult == 0) continue;
        if (!terms_.empty() && terms_.back().element == t.element)
            terms_.back().mult += t.mult;
        else
            terms_.push_back(t);
        length_ += t.mult;
    }
}

Sequence Sequence::from_elements(const GroupSpec& group, std::span<const GroupElement> elements) {
    std::vector<Term> terms;
    for (const auto& e : elements) {
        check_same_group(group, e.group());
        terms.push_back({e.code(), 1});
    }
    return Sequence(group, std::move(terms));
}

Sequence Sequence::from_codes(const GroupSpec& group, std::span<const Index> codes) {
    std::vector<Term> terms;
    for (Index c : codes) terms.push_back({c, 1});
    return Sequence(group, std::move(terms));
}

Sequence Sequence::power(const GroupElement& g, std::int64_t k) {
    return Sequence(g.group(), {{g.code(), k}});
}

std::int64_t Sequence::count(Index element) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), element,
                               [](const Term& t, Index e) { return t.element < e; });
    return it != terms_.end() && it->element == element ? it->mult : 0;
}

std::int64_t Sequence::count(const GroupElement& g) const {
    check_same_group(group_, g.group());
    return count(g.code());
}

std::vector<GroupElement> Sequence::support() const {
    std::vector<GroupElement> out;
    for (const auto& t : terms_) out.emplace_back(group_, t.element);
    return out;
}

std::vector<Index> Sequence::support_codes() const {
    std::vector<Index> out;
    for (const auto& t : terms_) out.push_back(t.element);
    return out;
}

std::vector<Index> Sequence::expanded() const {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(length_));
    for (const auto& t : terms_) out.insert(out.end(), static_cast<std::size_t>(t.mult), t.element);
    return out;
}

std::string Sequence::to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) s += ',';
        s += GroupElement(group_, terms_[i].element).to_string();
        if (terms_[i].mult != 1) s += '^' + std::to_string(terms_[i].mult);
    }
    return s + "]";
}

bool operator==(const Sequence& a, const Sequence& b) {
    return a.terms_ == b.terms_ && a.group_ == b.group_;
}

bool operator<(const Sequence& a, const Sequence& b) {
    check_same_group(a.group_, b.group_);
    if (a.length_ != b.length_) return a.length_ < b.length_;
    // Lexicographic on expanded lists without materializing them.
    std::size_t i = 0, j = 0;
    std::int64_t ri = a.terms_.empty() ? 0 : a.terms_[0].mult;
    std::int64_t rj = b.terms_.empty() ? 0 : b.terms_[0].mult;
    while (i < a.terms_.size() && j < b.terms_.size()) {
        if (a.terms_[i].element != b.terms_[j].element) return a.terms_[i].element < b.terms_[j].element;
        const auto step = std::min(ri, rj);
        ri -= step;
        rj -= step;
        if (ri == 0 && ++i < a.terms_.size()) ri = a.terms_[i].mult;
        if (rj == 0 && ++j < b.terms_.size()) rj = b.terms_[j].mult;
    }
    return false;
}

GroupElement sigma(const Sequence& s) {
    const auto& G = s.group();
    Index acc = 0;
    for (const auto& t : s.terms()) acc = G.add(acc, G.mul(t.mult, t.element));
    return GroupElement(G, acc);
}

ElementBitset subsequence_sum_set(const Sequence& s) {
    const auto& G = s.group();
    ElementBitset sums(G.order()), next(G.order());
    for (const auto& t : s.terms()) {
        for (std::int64_t k = 0; k < t.mult; ++k) {
            extend_subsums(G, sums, t.element, next);
            if (next == sums) break;  // further copies of this term add nothing
            std::swap(sums, next);
        }
    }
    return sums;
}

std::vector<GroupElement> subsequence_sums(const Sequence& s) {
    std::vector<GroupElement> out;
    for (Index c : subsequence_sum_set(s).members()) out.emplace_back(s.group(), c);
    return out;
}

bool is_zero_sum_free(const Sequence& s) {
    const auto& G = s.group();
    if (s.count(Index{0}) > 0) return false;
    ElementBitset sums(G.order()), next(G.order());
    for (const auto& t : s.terms()) {
        for (std::int64_t k = 0; k < t.mult; ++k) {
            if (sums.test(G.neg(t.element))) return false;
            extend_subsums(G, sums, t.element, next);
            std::swap(sums, next);
        }
    }
    return true;
}

bool is_atom(const Sequence& s) {
    if (s.empty() || !sigma(s).is_zero()) return false;
    // A proper zero-sum subsequence either avoids the removed term or its
    // complement does, so S g^-1 zero-sum free is equivalent to minimality.
    auto terms = std::vector<Term>(s.terms().begin(), s.terms().end());
    terms.front().mult -= 1;
    return is_zero_sum_free(Sequence(s.group(), std::move(terms)));
}

Sequence negate(const Sequence& s) {
    std::vector<Term> terms;
    for (const auto& t : s.terms()) terms.push_back({s.group().neg(t.element), t.mult});
    return Sequence(s.group(), std::move(terms));
}

std::vector<Index> pm_support_codes(const Sequence& s) {
    std::vector<Index> out;
    for (const auto& t : s.terms()) {
        out.push_back(t.element);
        out.push_back(s.group().neg(t.element));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<GroupElement> pm_support(const Sequence& s) {
    std::vector<GroupElement> out;
    for (Index c : pm_support_codes(s)) out.emplace_back(s.group(), c);
    return out;
}

Sequence concat(const Sequence& s, const Sequence& t) {
    check_same_group(s.group(), t.group());
    std::vector<Term> terms(s.terms().begin(), s.terms().end());
    terms.insert(terms.end(), t.terms().begin(), t.terms().end());
    return Sequence(s.group(), std::move(terms));
}

bool divides(const Sequence& t, const Sequence& s) {
    check_same_group(s.group(), t.group());
    for (const auto& term : t.terms())
        if (s.count(term.element) < term.mult) return false;
    return true;
}

Sequence remove(const Sequence& s, const Sequence& t) {
    if (!divides(t, s)) throw PreconditionViolated(t.to_string() + " does not divide " + s.to_string());
    std::vector<Term> terms(s.terms().begin(), s.terms().end());
    for (const auto& term : t.terms()) {
        auto it = std::find_if(terms.begin(), terms.end(), [&](const Term& x) { return x.element == term.element; });
        it->mult -= term.mult;
    }
    return Sequence(s.group(), std::move(terms));
}

Sequence multiply(const GroupSpec& group, std::span<const Sequence> atoms,
                  std::span<const std::pair<std::size_t, std::int64_t>> factors) {
    std::map<Index, std::int64_t> acc;
    for (auto [i, m] : factors) {
        if (i >= atoms.size()) throw PreconditionViolated("factor index out of range");
        if (m < 0) throw PreconditionViolated("negative factor multiplicity");
        check_same_group(group, atoms[i].group());
        for (const auto& t : atoms[i].terms()) acc[t.element] += t.mult * m;
    }
    std::vector<Term> terms;
    for (auto [e, m] : acc) terms.push_back({e, m});
    return Sequence(group, std::move(terms));
}

bool same_product(const GroupSpec& group, std::span<const Sequence> atoms,
                  std::span<const std::pair<std::size_t, std::int64_t>> left,
                  std::span<const std::pair<std::size_t, std::int64_t>> right) {
    for (const auto* side : {&left, &right})
        for (auto [i, m] : *side)
            if (i >= atoms.size() || m < 0 || !is_atom(atoms[i])) return false;
    return multiply(group, atoms, left) == multiply(group, atoms, right);
}

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " at offset " + std::to_string(pos) + " in '" + std::string(text) + "'");
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }
    std::int64_t integer() {
        skip_ws();
        const auto start = pos;
        if (pos < text.size() && text[pos] == '-') ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start || (pos == start + 1 && text[start] == '-')) fail("expected integer");
        return std::stoll(std::string(text.substr(start, pos - start)));
    }
    bool done() {
        skip_ws();
        return pos == text.size();
    }
};

GroupElement read_element(const GroupSpec& group, Cursor& cur) {
    cur.expect('(');
    std::vector<std::int64_t> coords;
    if (!cur.eat(')')) {
        do coords.push_back(cur.integer());
        while (cur.eat(','));
        cur.expect(')');
    }
    if (coords.size() != group.num_factors())
        cur.fail("element needs " + std::to_string(group.num_factors()) + " coordinates");
    return GroupElement(group, coords);
}

}  // namespace

GroupElement parse_element(const GroupSpec& group, std::string_view text) {
    Cursor cur{text};
    auto e = read_element(group, cur);
    if (!cur.done()) cur.fail("trailing characters");
    return e;
}

Sequence parse_sequence(const GroupSpec& group, std::string_view text) {
    Cursor cur{text};
    const bool bracketed = cur.eat('[');
    std::vector<Term> terms;
    cur.skip_ws();
    if (!(bracketed && cur.eat(']'))) {
        do {
            auto e = read_element(group, cur);
            std::int64_t m = 1;
            if (cur.eat('^')) m = cur.integer();
            if (m < 1) cur.fail("multiplicity must be positive");
            terms.push_back({e.code(), m});
        } while (cur.eat(','));
        if (bracketed) cur.expect(']');
    }
    if (!cur.done()) cur.fail("trailing characters");
    return Sequence(group, std::move(terms));
}

std::vector<GroupElement> parse_element_set(const GroupSpec& group, std::string_view text) {
    return parse_sequence(group, text).support();
}

}  // namespace zs
