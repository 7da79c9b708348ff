// Shared test utilities: structural tree rendering for engine/oracle
// comparison, and random grammar/input generators for property tests.

#ifndef PEGLR_TESTS_HELPERS_HPP
#define PEGLR_TESTS_HELPERS_HPP

#include <random>
#include <string>

#include "peglr/engine.hpp"
#include "peglr/grammar.hpp"
#include "peglr/oracle.hpp"

namespace peglr::testing {

// Same rendering as oracle_shape, over engine Match trees, so the two can be
// compared as strings. Kept in test code: the comparison must not route
// through either implementation under test.
inline std::string engine_shape(const Match* m) {
    if (m == nullptr || m->is_mismatch()) return "<mismatch>";
    std::string s = "(";
    switch (m->clause->kind) {
        case ClauseKind::Seq: s += "seq"; break;
        case ClauseKind::First: s += "first"; break;
        case ClauseKind::OneOrMore: s += "rep"; break;
        case ClauseKind::NotFollowedBy: s += "not"; break;
        case ClauseKind::Terminal: s += "term:" + terminal_pattern(m->clause->term); break;
        case ClauseKind::Epsilon: s += "eps"; break;
        case ClauseKind::RuleRef: s += "ref:" + m->clause->ref_name; break;
        case ClauseKind::SyntaxError: s += "error"; break;
        case ClauseKind::EofDelete: s += "eof-delete"; break;
        case ClauseKind::Wrapper: s += "partial"; break;
        default: s += "?"; break;
    }
    s += " " + std::to_string(m->pos) + " " + std::to_string(m->len);
    for (const Match* k : m->children) s += " " + engine_shape(k);
    s += ")";
    return s;
}

// Random clause over terminals {a, b}. When `max_ref` > own index, RuleRefs
// point only at later rules (acyclic); when refs may target any rule,
// left-recursive cycles arise freely.
inline const Clause* random_clause(ClauseArena& a, std::mt19937& rng, int depth,
                                   int n_rules, int min_ref,
                                   const std::vector<std::string>& names) {
    auto pick_ref = [&]() -> const Clause* {
        if (min_ref >= n_rules) return a.ch('a');
        std::uniform_int_distribution<int> d(min_ref, n_rules - 1);
        return a.ref(names[static_cast<size_t>(d(rng))]);
    };
    std::uniform_int_distribution<int> d100(0, 99);
    int r = d100(rng);
    if (depth <= 0) {
        if (r < 45) return a.ch(r % 2 ? 'a' : 'b');
        if (r < 55) return a.range('a', 'b');
        if (r < 65) return a.literal(r % 2 ? "ab" : "ba");
        if (r < 75) return a.epsilon();
        return pick_ref();
    }
    auto sub = [&](int dd) { return random_clause(a, rng, dd, n_rules, min_ref, names); };
    if (r < 25) return a.ch(r % 2 ? 'a' : 'b');
    if (r < 32) return a.range('a', 'b');
    if (r < 37) return a.literal(r % 2 ? "ab" : "aa");
    if (r < 42) return a.epsilon();
    if (r < 57) return a.seq({sub(depth - 1), sub(depth - 1)});
    if (r < 72) return a.first({sub(depth - 1), sub(depth - 1)});
    if (r < 80) return a.one_or_more(sub(depth - 1));
    if (r < 86) return a.not_followed_by(sub(depth - 1));
    return pick_ref();
}

inline Grammar random_grammar(std::mt19937& rng, bool allow_cycles, int max_rules = 6) {
    std::uniform_int_distribution<int> nr(1, max_rules);
    int n = nr(rng);
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) names.push_back("R" + std::to_string(i));
    GrammarBuilder b;
    for (int i = 0; i < n; ++i) {
        int min_ref = allow_cycles ? 0 : i + 1;
        b.rule(names[static_cast<size_t>(i)],
               random_clause(b.arena(), rng, 3, n, min_ref, names));
    }
    return b.build();
}

inline std::string random_input(std::mt19937& rng, int max_len) {
    std::uniform_int_distribution<int> ln(0, max_len);
    int n = ln(rng);
    std::string s;
    s.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) s.push_back(rng() % 2 ? 'a' : 'b');
    return s;
}

}  // namespace peglr::testing

#endif
