// Brute-force reference interpreter.
//
// A naive, unmemoized PEG interpreter used as an independent check on the
// engine. Left-recursive grammars are handled by bounded unrolling: a rule
// re-entered at the same (rule, position) is replaced by the best result
// from the previous unrolling round, and rounds repeat until nothing
// changes (at most |input| + 2 rounds). Intentionally shares no code with
// the engine's matching path.
//
// Derived operators (Optional, ZeroOrMore, FollowedBy) are interpreted
// directly, so a grammar can be checked against its desugared form.

#ifndef PEGLR_ORACLE_HPP
#define PEGLR_ORACLE_HPP

#include <cstdint>
#include <deque>
#include <string_view>
#include <vector>

#include "peglr/grammar.hpp"

namespace peglr {

struct OracleNode {
    const Clause* clause = nullptr;
    int pos = 0;
    int len = 0;
    std::vector<const OracleNode*> children;
};

enum class OracleStatus { Matched, Mismatched, BudgetExceeded };

struct OracleResult {
    OracleStatus status = OracleStatus::Mismatched;
    const OracleNode* root = nullptr;  // set when Matched; owned by `nodes`
    int rounds = 0;                    // unrolling rounds used
    std::deque<OracleNode> nodes;
};

// Interprets `grammar` over `input` starting from the start rule.
// `depth_budget` caps recursion depth; `step_budget` caps total clause
// evaluations (unmemoized interpretation can blow up exponentially).
OracleResult oracle_match(const Grammar& grammar, std::string_view input, int depth_budget,
                          uint64_t step_budget = 8'000'000);

// Canonical structural rendering of an oracle tree, for comparisons.
std::string oracle_shape(const OracleNode* node);

}  // namespace peglr

#endif
