// Error recovery configuration and the pure pieces of the recovery algebra.
//
// Parsing runs in at most two phases. Phase 1 (discovery) is a plain PEG
// parse; if its result is complete and spans the input it is final. Phase 2
// re-parses with recovery enabled: sequence elements and repetition
// iterations that fail may skip a bounded run of input (emitting a
// SyntaxError node) or, at end of input, delete the remaining grammar
// elements. Memo entries carry the phase they were computed in; complete
// results are phase-independent, everything else is re-derived when phases
// differ. The stateful parts live on ParseSession (engine.hpp).

#ifndef PEGLR_RECOVERY_HPP
#define PEGLR_RECOVERY_HPP

#include <span>
#include <vector>

#include "peglr/grammar.hpp"

namespace peglr {

struct RecoveryConfig {
    bool enabled = true;
    int max_skip = 64;  // longest input run one recovery may consume; >= 1
};

// Operator argument for completeness_of.
enum class CompletenessOp { Seq, First, Repetition, Terminal, Epsilon, NotFollowedBy };

// The completeness algebra: how isComplete propagates through an operator.
//   Seq:        AND(children) and no recovery used
//   First:      the chosen child's flag
//   Repetition: not truncated and AND(children)
//   leaf successes: complete
inline bool completeness_of(CompletenessOp op, const std::vector<bool>& child_flags,
                            bool used_recovery, bool truncated) {
    auto all = [&] {
        for (bool f : child_flags)
            if (!f) return false;
        return true;
    };
    switch (op) {
        case CompletenessOp::Seq: return all() && !used_recovery;
        case CompletenessOp::First: return child_flags.empty() ? false : child_flags[0];
        case CompletenessOp::Repetition: return !truncated && all();
        default: return true;
    }
}

// The clause a recovering sequence element must not skip past: its next
// sibling when one exists, otherwise the bound inherited from the context.
inline const Clause* bound_for(std::span<const Clause* const> seq_children, size_t i,
                               const Clause* inherited_bound) {
    return i + 1 < seq_children.size() ? seq_children[i + 1] : inherited_bound;
}

}  // namespace peglr

#endif
