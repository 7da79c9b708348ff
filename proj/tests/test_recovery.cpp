#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "peglr/bench.hpp"
#include "peglr/engine.hpp"
#include "peglr/grammar_text.hpp"
#include "peglr/tree_io.hpp"

using namespace peglr;

namespace {

Grammar digits_arith() { return load_grammar({"E <- E '+' T / T ; T <- [0-9] ;"}); }

int error_span_total(const Match* root) {
    int total = 0;
    for (const ErrorSpan& e : collect_errors(root)) {
        if (e.kind != ErrorKind::EofDelete) total += e.len;
    }
    return total;
}

}  // namespace

TEST_CASE("two-phase parse: clean input completes in phase 1") {
    Grammar g = digits_arith();
    ParseSession s(g, "1+2+3");
    const Match* root = s.parse();
    CHECK(root->len == 5);
    CHECK(root->is_complete);
    CHECK(collect_errors(root).empty());
    CHECK_FALSE(s.stats().phase2_entered);
}

TEST_CASE("two-phase parse: skip repair inside a left-recursive expansion") {
    // The linear scan probes the failed clause at pos+1, pos+2, ...; the
    // first success is at "3", so the error span covers "?+".
    Grammar g = digits_arith();
    ParseSession s(g, "1+?+3");
    const Match* root = s.parse();
    REQUIRE(root->len == 5);
    CHECK_FALSE(root->is_complete);
    auto errors = collect_errors(root);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].pos == 2);
    CHECK(errors[0].len == 2);
    CHECK(errors[0].kind == ErrorKind::Skip);
    CHECK(s.stats().phase2_entered);
    // parse resumed with the digit at position 4
    REQUIRE(root->clause->kind == ClauseKind::First);
    const Match* seq = root->children[0];
    CHECK(seq->children.back()->pos == 4);
    CHECK(seq->children.back()->len == 1);
}

TEST_CASE("two-phase parse: total failure covers all input") {
    Grammar g = load_grammar({"A <- 'x' ;"});
    ParseSession s(g, "yyy");
    const Match* root = s.parse();
    CHECK(root->len == 3);
    CHECK(is_syntax_error(*root));
    auto errors = collect_errors(root);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].pos == 0);
    CHECK(errors[0].len == 3);
    CHECK(errors[0].kind == ErrorKind::Total);
}

TEST_CASE("cache validity: completeness and phase") {
    MemoEntry e;
    static const Match complete{nullptr, 0, 1, {}, true, false};
    static const Match incomplete{nullptr, 0, 1, {}, false, false};

    e.result = &complete;
    e.cached_in_recovery_phase = false;
    CHECK(cache_valid(e, true));   // complete phase-1 entry read in phase 2
    CHECK(cache_valid(e, false));

    e.result = &incomplete;
    e.cached_in_recovery_phase = false;
    CHECK_FALSE(cache_valid(e, true));  // incomplete phase-1 entry in phase 2
    CHECK(cache_valid(e, false));

    e.cached_in_recovery_phase = true;
    CHECK(cache_valid(e, true));  // incomplete phase-2 entry later in phase 2
    CHECK_FALSE(cache_valid(e, false));

    e.result = nullptr;
    CHECK_FALSE(cache_valid(e, true));
    CHECK_FALSE(cache_valid(e, false));
}

TEST_CASE("completeness algebra: sequence rows") {
    using enum CompletenessOp;
    CHECK(completeness_of(Seq, {true, true}, false, false));
    CHECK_FALSE(completeness_of(Seq, {true, true}, true, false));   // recovery poisons
    CHECK_FALSE(completeness_of(Seq, {true, false}, false, false));
    CHECK_FALSE(completeness_of(Seq, {false, true}, false, false));
    CHECK_FALSE(completeness_of(Seq, {false, false}, false, false));
    CHECK_FALSE(completeness_of(Seq, {true, false}, true, false));
    CHECK_FALSE(completeness_of(Seq, {false, false}, true, false));
    CHECK(completeness_of(Seq, {true}, false, false));
    CHECK(completeness_of(Seq, {}, false, false));  // vacuous conjunction
    CHECK_FALSE(completeness_of(Seq, {}, true, false));
}

TEST_CASE("completeness algebra: first rows") {
    using enum CompletenessOp;
    CHECK(completeness_of(First, {true}, false, false));
    CHECK_FALSE(completeness_of(First, {false}, false, false));
}

TEST_CASE("completeness algebra: repetition rows") {
    using enum CompletenessOp;
    CHECK(completeness_of(Repetition, {true}, false, false));
    CHECK_FALSE(completeness_of(Repetition, {true}, false, true));   // truncation poisons
    CHECK_FALSE(completeness_of(Repetition, {false}, false, false));
    CHECK(completeness_of(Repetition, {true, true}, false, false));
    CHECK_FALSE(completeness_of(Repetition, {true, false}, false, true));
    CHECK_FALSE(completeness_of(Repetition, {false, true}, false, false));
}

TEST_CASE("completeness algebra: leaf successes are complete") {
    using enum CompletenessOp;
    CHECK(completeness_of(Terminal, {}, false, false));
    CHECK(completeness_of(Epsilon, {}, false, false));
    CHECK(completeness_of(NotFollowedBy, {}, false, false));
}

TEST_CASE("completeness conjunction is associative, commutative, idempotent") {
    std::mt19937 rng(31);
    for (int i = 0; i < 200; ++i) {
        std::vector<bool> flags;
        int n = 1 + static_cast<int>(rng() % 5);
        for (int j = 0; j < n; ++j) flags.push_back(rng() % 2 == 0);
        bool direct = completeness_of(CompletenessOp::Seq, flags, false, false);
        // permutation (commutativity)
        std::vector<bool> shuffled = flags;
        for (int j = n - 1; j > 0; --j) {
            std::swap(shuffled[static_cast<size_t>(j)], shuffled[rng() % (j + 1)]);
        }
        CHECK(completeness_of(CompletenessOp::Seq, shuffled, false, false) == direct);
        // grouping (associativity): fold prefix then combine
        std::vector<bool> prefix(flags.begin(), flags.begin() + n / 2);
        std::vector<bool> suffix(flags.begin() + n / 2, flags.end());
        bool folded = completeness_of(
            CompletenessOp::Seq,
            {completeness_of(CompletenessOp::Seq, prefix, false, false),
             completeness_of(CompletenessOp::Seq, suffix, false, false)},
            false, false);
        CHECK(folded == direct);
        // idempotence: duplicating a flag changes nothing
        std::vector<bool> doubled = flags;
        doubled.push_back(flags[0]);
        CHECK(completeness_of(CompletenessOp::Seq, doubled, false, false) ==
              (direct && flags[0]));
    }
}

TEST_CASE("bound_for: next sibling or inherited") {
    ClauseArena a;
    const Clause* A = a.ch('a');
    const Clause* B = a.ch('b');
    const Clause* C = a.ch('c');
    const Clause* X = a.ch('x');
    std::vector<const Clause*> abc{A, B, C};
    CHECK(bound_for(abc, 0, X) == B);
    CHECK(bound_for(abc, 1, X) == C);
    CHECK(bound_for(abc, 2, X) == X);
    std::vector<const Clause*> ab{A, B};
    CHECK(bound_for(ab, 1, nullptr) == nullptr);
}

TEST_CASE("probe: clean lookahead, no recovery inside") {
    Grammar g = load_grammar({"S <- 'a' 'b' ;"});
    SUBCASE("probe matches where the clause matches") {
        ParseSession s(g, "xb");
        const Match* m = s.probe(g.rules[0].top->children[1], 1);
        REQUIRE_FALSE(m->is_mismatch());
        CHECK(m->len == 1);
    }
    SUBCASE("probe of a broken sequence mismatches; a recovering parse repairs it") {
        ParseSession probe_session(g, "a?b");
        CHECK(probe_session.probe(g.rules[0].top, 0)->is_mismatch());
        ParseSession parse_session(g, "a?b");
        const Match* root = parse_session.parse();
        CHECK(root->len == 3);
        CHECK(collect_errors(root).size() == 1);
    }
    SUBCASE("probe of a complete cached rule result is a cache hit") {
        ParseSession s(g, "ab");
        s.match_rule(0, 0);
        uint64_t hits = s.stats().memo_hits;
        uint64_t evals = s.stats().rule_body_evals;
        const Match* m = s.probe_rule(0, 0);
        CHECK_FALSE(m->is_mismatch());
        CHECK(s.stats().memo_hits == hits + 1);
        CHECK(s.stats().rule_body_evals == evals);
    }
}

TEST_CASE("skip search: smallest repair wins") {
    // '+' fails at 1; probing finds '+' again at 2: skip one char.
    Grammar g = digits_arith();
    ParseSession s(g, "1?+2");
    const Match* root = s.parse();
    REQUIRE(root->len == 4);
    auto errors = collect_errors(root);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].pos == 1);
    CHECK(errors[0].len == 1);
    CHECK(errors[0].kind == ErrorKind::Skip);
}

TEST_CASE("skip search: bound match blocks the repair") {
    // 'b' fails at 1; at k=1 the bound 'c' matches first, so recovery must
    // not skip past input belonging to the next element.
    Grammar g = load_grammar({"S <- 'a' 'b' 'c' ;"});
    ParseSession s(g, "acc");
    const Match* root = s.parse();
    CHECK(root->len == 3);
    CHECK(s.stats().skip_searches >= 1);
    auto errors = collect_errors(root);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].kind == ErrorKind::Total);  // nothing repaired
}

TEST_CASE("skip search is capped by max_skip") {
    Grammar g = load_grammar({"S <- 'a' 'b' ;"});
    RecoveryConfig c;
    c.max_skip = 2;
    ParseSession s(g, "a???b", c);
    const Match* root = s.parse();
    CHECK(root->len == 5);
    auto errors = collect_errors(root);
    // repair needs a skip of 3 > max_skip, and no partial parse exists, so
    // the whole input is one error
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].kind == ErrorKind::Total);

    RecoveryConfig wide;
    wide.max_skip = 8;
    ParseSession s2(g, "a???b", wide);
    const Match* root2 = s2.parse();
    auto errors2 = collect_errors(root2);
    REQUIRE(errors2.size() == 1);
    CHECK(errors2[0].kind == ErrorKind::Skip);
    CHECK(errors2[0].len == 3);
}

TEST_CASE("eof deletion: grammar elements deleted at end of input") {
    Grammar g = load_grammar({"S <- 'a' 'b' ;"});
    SUBCASE("phase 2 deletes the unmatched tail") {
        ParseSession s(g, "a");
        const Match* root = s.parse();
        REQUIRE(root->len == 1);
        CHECK_FALSE(root->is_complete);
        CHECK(s.stats().eof_deletions >= 1);
        auto errors = collect_errors(root);
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].kind == ErrorKind::EofDelete);
        CHECK(errors[0].pos == 1);
        CHECK(errors[0].len == 0);
        CHECK(error_span_total(root) == 0);  // no input was skipped
    }
    SUBCASE("complete input never invokes deletion") {
        ParseSession s(g, "ab");
        const Match* root = s.parse();
        CHECK(root->is_complete);
        CHECK(s.stats().eof_deletions == 0);
    }
    SUBCASE("discovery phase mismatches instead of deleting") {
        ParseSession s(g, "a");
        CHECK(s.match_rule(0, 0)->is_mismatch());
        CHECK(s.stats().eof_deletions == 0);
    }
}

TEST_CASE("span wrap") {
    Grammar g = load_grammar({"S <- 'a' ;"});
    ParseSession s(g, "abcde");
    SUBCASE("mismatch becomes a total error") {
        const Match* w = s.span_wrap(&kMismatch);
        CHECK(is_syntax_error(*w));
        CHECK(w->pos == 0);
        CHECK(w->len == 5);
    }
    SUBCASE("short result gains a trailing error") {
        const Match* m = s.match_rule(0, 0);
        REQUIRE(m->len == 1);
        const Match* w = s.span_wrap(m);
        REQUIRE(w->len == 5);
        REQUIRE(w->children.size() == 2);
        CHECK(w->children[0] == m);
        CHECK(is_syntax_error(*w->children[1]));
        CHECK(w->children[1]->pos == 1);
        CHECK(w->children[1]->len == 4);
    }
}

TEST_CASE("span wrap: spanning result is returned unchanged") {
    Grammar g = load_grammar({"S <- 'a' ;"});
    ParseSession s(g, "a");
    const Match* m = s.match_rule(0, 0);
    CHECK(s.span_wrap(m) == m);
}

TEST_CASE("recovery disabled: phase 1 result is wrapped, never repaired") {
    Grammar g = digits_arith();
    RecoveryConfig off;
    off.enabled = false;
    ParseSession s(g, "1+?+3", off);
    const Match* root = s.parse();
    REQUIRE(root->len == 5);
    auto errors = collect_errors(root);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].kind == ErrorKind::Trailing);
    CHECK(errors[0].pos == 1);
    CHECK(errors[0].len == 4);
    CHECK_FALSE(s.stats().phase2_entered);
}

TEST_CASE("empty input") {
    SUBCASE("grammar that cannot match epsilon yields a zero-length error") {
        Grammar g = load_grammar({"S <- 'a' ;"});
        ParseSession s(g, "");
        const Match* root = s.parse();
        CHECK(root->len == 0);
        CHECK(is_syntax_error(*root));
        CHECK(root->pos == 0);
    }
    SUBCASE("grammar matching epsilon parses cleanly") {
        Grammar g = load_grammar({"S <- 'a'? ;"});
        ParseSession s(g, "");
        const Match* root = s.parse();
        CHECK(root->len == 0);
        CHECK(root->is_complete);
        CHECK(collect_errors(root).empty());
    }
}

TEST_CASE("stitching: parse resumes after unrepairable junk") {
    Grammar g = digits_arith();
    ParseSession s(g, "1+1?1+1");
    const Match* root = s.parse();
    REQUIRE(root->len == 7);
    CHECK_FALSE(root->is_complete);
    auto errors = collect_errors(root);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].pos == 3);
    CHECK(errors[0].len == 1);
    // pieces: E("1+1"), error, E("1+1")
    REQUIRE(root->clause->kind == ClauseKind::Wrapper);
    REQUIRE(root->children.size() == 3);
    CHECK(root->children[0]->len == 3);
    CHECK(is_syntax_error(*root->children[1]));
    CHECK(root->children[2]->len == 3);
}

TEST_CASE("leading junk is skipped to the first viable start") {
    Grammar g = digits_arith();
    ParseSession s(g, "??1+2");
    const Match* root = s.parse();
    REQUIRE(root->len == 5);
    auto errors = collect_errors(root);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].pos == 0);
    CHECK(errors[0].len == 2);
    CHECK(errors[0].kind == ErrorKind::Skip);
}

TEST_CASE("error at end of input becomes a trailing error") {
    Grammar g = digits_arith();
    ParseSession s(g, "1+2?");
    const Match* root = s.parse();
    REQUIRE(root->len == 4);
    auto errors = collect_errors(root);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].kind == ErrorKind::Trailing);
    CHECK(errors[0].pos == 3);
    CHECK(errors[0].len == 1);
}

TEST_CASE("phase short-circuit: complete spanning phase-1 results end the parse") {
    std::mt19937 rng(37);
    for (int size : {1, 11, 41, 101}) {
        std::string input = make_arithmetic_input(size);
        Grammar g = digits_arith();
        ParseSession s(g, input);
        const Match* root = s.parse();
        CHECK(root->is_complete);
        CHECK(root->len == static_cast<int>(input.size()));
        CHECK(collect_errors(root).empty());
        CHECK_FALSE(s.stats().phase2_entered);
        CHECK(s.stats().error_chars == 0);
    }
    (void)rng;
}

TEST_CASE("phase isolation: incomplete phase-1 entries are never returned in phase 2") {
    std::mt19937 rng(41);
    for (int i = 0; i < 400; ++i) {
        Grammar g = peglr::testing::random_grammar(rng, true);
        std::string input = peglr::testing::random_input(rng, 24);
        if (i % 3 == 0 && !input.empty()) input[rng() % input.size()] = '?';
        ParseSession s(g, input);
        s.parse();
        CHECK(s.stats().phase2_incomplete_phase1_returns == 0);
    }
}

TEST_CASE("complete results are reused across phases") {
    Grammar g = digits_arith();
    ParseSession s(g, "1+?+3");
    s.parse();
    CHECK(s.stats().cross_phase_complete_reuse > 0);
}

TEST_CASE("spanning invariant over random grammars and inputs") {
    std::mt19937 rng(43);
    for (int i = 0; i < 1500; ++i) {
        Grammar g = peglr::testing::random_grammar(rng, true);
        std::string input = peglr::testing::random_input(rng, 32);
        if (i % 4 == 1 && !input.empty()) input[rng() % input.size()] = '?';
        if (i % 7 == 2) input.clear();
        ParseSession s(g, input);
        const Match* root = s.parse();
        REQUIRE(root != nullptr);
        CHECK(root->len == static_cast<int>(input.size()));
        // bounded recovery: error spans never exceed the input
        CHECK(error_span_total(root) <= static_cast<int>(input.size()));
        CHECK(s.stats().error_chars <= 2 * input.size() + 2);
    }
}

TEST_CASE("left-recursion seeds never trigger skip searches") {
    std::mt19937 rng(47);
    uint64_t suppressions = 0;
    for (int i = 0; i < 500; ++i) {
        Grammar g = peglr::testing::random_grammar(rng, true);
        std::string input = peglr::testing::random_input(rng, 24);
        if (!input.empty() && i % 2 == 0) input[rng() % input.size()] = '?';
        ParseSession s(g, input);
        s.parse();
        CHECK(s.stats().skip_searches_on_lr_mismatch == 0);
        suppressions += s.stats().lr_recovery_suppressions;
    }
    // the guard does fire on this corpus; it is not vacuous
    CHECK(suppressions > 0);
}

TEST_CASE("error locality: one injected character, one contained error span") {
    Grammar g = digits_arith();
    std::string base = "1+2+3+4";
    for (size_t at = 0; at <= base.size(); ++at) {
        std::string input = base;
        input.insert(at, 1, '?');
        ParseSession s(g, input);
        const Match* root = s.parse();
        REQUIRE(root->len == static_cast<int>(input.size()));
        auto errors = collect_errors(root);
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].pos <= static_cast<int>(at));
        CHECK(static_cast<int>(at) < errors[0].pos + std::max(errors[0].len, 1));
    }
}

TEST_CASE("repetition recovery: skip inside, truncation at the bound") {
    Grammar g = load_grammar({"S <- [ab]+ 'x' ;"});
    SUBCASE("junk inside the repetition is skipped and iteration resumes") {
        ParseSession s(g, "ab?bx");
        const Match* root = s.parse();
        REQUIRE(root->len == 5);
        auto errors = collect_errors(root);
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].pos == 2);
        CHECK(errors[0].len == 1);
        CHECK(errors[0].kind == ErrorKind::Skip);
    }
    SUBCASE("junk before the bound truncates the repetition") {
        ParseSession s(g, "ab??x");
        const Match* root = s.parse();
        REQUIRE(root->len == 5);
        auto errors = collect_errors(root);
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].pos == 2);
        CHECK(errors[0].len == 2);
        // the repetition node is incomplete (truncated); the sequence still
        // matched its 'x'
        CHECK_FALSE(root->is_complete);
    }
    SUBCASE("bound matching at the stop position is a normal greedy stop") {
        ParseSession s(g, "abx");
        const Match* root = s.parse();
        CHECK(root->is_complete);
        CHECK(collect_errors(root).empty());
    }
}
