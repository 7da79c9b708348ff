// Parse result nodes.
//
// Every result is a Match: terminals have no children, First/RuleRef
// wrappers have one, Seq/OneOrMore have one per element. MISMATCH is a
// distinguished sentinel (len < 0) that never appears inside a successful
// tree. Syntax errors, EOF deletions and the input-spanning wrapper are
// ordinary Match nodes whose clause points at a static marker, so error
// reports fall out of a plain tree walk.

#ifndef PEGLR_MATCH_HPP
#define PEGLR_MATCH_HPP

#include <deque>
#include <vector>

#include "peglr/grammar.hpp"

namespace peglr {

struct Match {
    const Clause* clause = nullptr;  // nullptr only on the mismatch sentinels
    int pos = -1;
    int len = -1;
    std::vector<const Match*> children;
    bool is_complete = false;        // parse consumed all the grammar permits here
    bool is_from_lr_context = false; // mismatch arose from a left-recursion seed

    bool is_mismatch() const { return len < 0; }
};

// Plain mismatch and the left-recursion seed mismatch. The seed variant is a
// control signal for fixed-point expansion, not a parse failure; recovery
// must never act on it.
inline const Match kMismatch{nullptr, -1, -1, {}, false, false};
inline const Match kLrSeedMismatch{nullptr, -1, -1, {}, false, true};

// Marker clauses used as Match labels. Never part of a grammar.
namespace marker {
inline const Clause make_marker(ClauseKind k) {
    Clause c;
    c.kind = k;
    return c;
}
// Skipped input inside a recovered parse.
inline const Clause skip_error = make_marker(ClauseKind::SyntaxError);
// Unconsumed input at the end of a partial parse.
inline const Clause trailing_error = make_marker(ClauseKind::SyntaxError);
// The whole input when nothing matched.
inline const Clause total_error = make_marker(ClauseKind::SyntaxError);
// Grammar elements deleted at end of input (always zero length).
inline const Clause eof_delete = make_marker(ClauseKind::EofDelete);
// Container used when several pieces are stitched together to span the input.
inline const Clause partial = make_marker(ClauseKind::Wrapper);
}  // namespace marker

inline bool is_syntax_error(const Match& m) {
    return m.clause && m.clause->kind == ClauseKind::SyntaxError;
}
inline bool is_eof_delete(const Match& m) {
    return m.clause && m.clause->kind == ClauseKind::EofDelete;
}

// Owns Match nodes for one parse; pointers stay valid for the arena's life.
class MatchArena {
  public:
    const Match* make(const Clause* clause, int pos, int len,
                      std::vector<const Match*> children, bool complete,
                      bool from_lr = false) {
        nodes_.push_back(Match{clause, pos, len, std::move(children), complete, from_lr});
        return &nodes_.back();
    }
    size_t size() const { return nodes_.size(); }

  private:
    std::deque<Match> nodes_;
};

}  // namespace peglr

#endif
