// The memoized match core.
//
// One ParseSession parses one input against one resolved grammar. Matching
// is recursive descent over clause trees; only rule-level results are
// memoized, keyed by (rule, position). Left recursion is handled in the
// memo entry itself: a re-entered (rule, pos) seeds MISMATCH and flags the
// cycle, the owner then re-matches the rule body in a loop, feeding each
// iteration's result to the next as the seed, until the match length stops
// growing. A per-position version counter invalidates same-position entries
// between iterations so inner clauses always see the current seed.
//
// Recovery (see recovery.hpp) is woven into Seq and OneOrMore matching and
// is active only during phase 2 and never inside a probe.

#ifndef PEGLR_ENGINE_HPP
#define PEGLR_ENGINE_HPP

#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "peglr/grammar.hpp"
#include "peglr/match.hpp"
#include "peglr/recovery.hpp"

namespace peglr {

struct MemoEntry {
    const Match* result = nullptr;        // absent until first computed
    bool in_rec_path = false;             // (rule,pos) is on the active call path
    bool found_left_rec = false;          // a cycle re-entered this entry
    int cycle_depth = 0;                  // version stamp; stale when < session's
    bool cached_in_recovery_phase = false;
};

// result present (and version-fresh, the caller's precondition): reusable
// iff complete or computed in the same phase.
inline bool cache_valid(const MemoEntry& entry, bool in_recovery_phase) {
    return entry.result != nullptr &&
           (entry.result->is_complete ||
            entry.cached_in_recovery_phase == in_recovery_phase);
}

class MemoTable {
  public:
    MemoEntry& get_or_create(RuleId rule, int pos) { return map_[key(rule, pos)]; }

    MemoEntry* find(RuleId rule, int pos) {
        auto it = map_.find(key(rule, pos));
        return it == map_.end() ? nullptr : &it->second;
    }

    template <typename F>
    void for_each(F&& fn) const {
        for (const auto& [k, e] : map_) {
            fn(static_cast<RuleId>(k >> 32), static_cast<int>(k & 0xffffffffu), e);
        }
    }

    size_t size() const { return map_.size(); }

  private:
    static uint64_t key(RuleId rule, int pos) {
        return (static_cast<uint64_t>(static_cast<uint32_t>(rule)) << 32) |
               static_cast<uint32_t>(pos);
    }
    std::unordered_map<uint64_t, MemoEntry> map_;
};

struct ParseStats {
    uint64_t rule_body_evals = 0;       // rule body evaluations (all loop iterations)
    uint64_t expansion_iterations = 0;  // left-recursion version bumps
    uint64_t memo_hits = 0;
    uint64_t cross_phase_complete_reuse = 0;  // complete phase-1 results served in phase 2
    uint64_t phase2_incomplete_phase1_returns = 0;  // phase-isolation violations; must be 0
    uint64_t skip_searches = 0;
    uint64_t skip_searches_on_lr_mismatch = 0;  // must be 0
    uint64_t lr_recovery_suppressions = 0;      // recovery declined on an LR seed mismatch
    uint64_t terminal_checks = 0;               // character inspections
    uint64_t probes = 0;
    uint64_t eof_deletions = 0;
    uint64_t error_chars = 0;  // total SyntaxError node length emitted
    bool phase2_entered = false;
};

// One fixed-point iteration step, recorded when expansion tracing is on.
struct ExpansionStep {
    RuleId rule;
    int pos;
    int len;                 // stored match length (-1 for the mismatch seed)
    uint64_t activation;     // groups steps of one expansion loop
};

// One rule body evaluation, recorded when expansion tracing is on.
struct BodyEval {
    RuleId rule;
    int pos;
    int version;   // cycleDepthForPos[pos] at evaluation time
    bool recovery; // recovery was active
};

class ParseSession {
  public:
    ParseSession(const Grammar& grammar, std::string_view input, RecoveryConfig config = {});

    ParseSession(const ParseSession&) = delete;
    ParseSession& operator=(const ParseSession&) = delete;

    // Two-phase parse of the whole input. The result always spans the input:
    // clean parses return the plain match tree, recovered parses contain
    // SyntaxError nodes, total failures are a single SyntaxError node.
    const Match* parse();

    // Memoized match of a rule at a position (phase-agnostic entry point).
    // Mismatch is a value, never an error.
    const Match* match_rule(RuleId rule, int pos);

    // Unmemoized clause dispatch. `bound` is the clause a recovering element
    // must not skip past.
    const Match* match_clause(const Clause* clause, int pos, const Clause* bound = nullptr);

    // Recovery-suppressed match: discovery semantics regardless of phase.
    const Match* probe(const Clause* clause, int pos);
    const Match* probe_rule(RuleId rule, int pos);

    // Wraps a top-level result so it spans the input: MISMATCH becomes one
    // SyntaxError covering everything, short results gain a trailing one.
    const Match* span_wrap(const Match* result);

    const Grammar& grammar() const { return *grammar_; }
    std::string_view input() const { return input_; }
    int input_len() const { return input_len_; }
    bool in_recovery_phase() const { return in_recovery_phase_; }
    const RecoveryConfig& config() const { return config_; }
    const ParseStats& stats() const { return stats_; }
    MemoTable& memo() { return memo_; }
    const MemoTable& memo() const { return memo_; }
    int cycle_depth_at(int pos) const { return cycle_depth_for_pos_[pos]; }

    // Test hook: record every length stored by an expansion loop and every
    // rule body evaluation.
    void set_trace_expansion(bool on) { trace_expansion_ = on; }
    const std::vector<ExpansionStep>& expansion_log() const { return expansion_log_; }
    const std::vector<BodyEval>& body_eval_log() const { return body_eval_log_; }

  private:
    struct SkipOutcome {
        enum Kind { Exhausted, Repaired, BoundBlocked } kind = Exhausted;
        int skip_len = 0;
        const Match* resumed = nullptr;
    };

    bool recovery_active() const {
        return in_recovery_phase_ && probe_depth_ == 0 && config_.enabled;
    }

    const Match* match_seq(const Clause* c, int pos, const Clause* bound);
    const Match* match_first(const Clause* c, int pos, const Clause* bound);
    const Match* match_one_or_more(const Clause* c, int pos, const Clause* bound);
    const Match* match_not_followed_by(const Clause* c, int pos);
    const Match* match_terminal(const Clause* c, int pos);
    const Match* match_ref(const Clause* c, int pos);

    // Linear scan for the smallest skip that lets `failed` resume, stopping
    // early if the bound matches first (the junk belongs to a sibling).
    SkipOutcome skip_search(const Clause* failed, int pos, const Clause* bound,
                            const Match* trigger);

    const Match* make_error(const Clause* kind, int pos, int len);

    const Grammar* grammar_;
    std::string_view input_;
    int input_len_;
    RecoveryConfig config_;
    MemoTable memo_;
    std::vector<int> cycle_depth_for_pos_;
    bool in_recovery_phase_ = false;
    int probe_depth_ = 0;
    MatchArena arena_;
    ParseStats stats_;
    uint64_t activation_counter_ = 0;
    bool trace_expansion_ = false;
    std::vector<ExpansionStep> expansion_log_;
    std::vector<BodyEval> body_eval_log_;
};

}  // namespace peglr

#endif
