#include "peglr/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace peglr {

ParseSession::ParseSession(const Grammar& grammar, std::string_view input,
                           RecoveryConfig config)
    : grammar_(&grammar),
      input_(input),
      input_len_(static_cast<int>(input.size())),
      config_(config) {
    if (!grammar.resolved) {
        throw std::invalid_argument("grammar must be resolved before parsing");
    }
    if (config_.max_skip < 1) {
        throw std::invalid_argument("max_skip must be >= 1");
    }
    cycle_depth_for_pos_.assign(static_cast<size_t>(input_len_) + 1, 0);
}

const Match* ParseSession::make_error(const Clause* kind, int pos, int len) {
    if (kind->kind == ClauseKind::SyntaxError) stats_.error_chars += len;
    return arena_.make(kind, pos, len, {}, false);
}

const Match* ParseSession::match_rule(RuleId rule, int pos) {
    MemoEntry& entry = memo_.get_or_create(rule, pos);
    const bool eff_phase = recovery_active();

    if (entry.in_rec_path) {
        // (rule, pos) is on the active call path: a left-recursive cycle.
        // Seed and phase mechanics: the cycle always sees the entry's current
        // value, no matter its version or phase.
        if (entry.result == nullptr) {
            entry.found_left_rec = true;
            entry.result = &kLrSeedMismatch;
            entry.cycle_depth = cycle_depth_for_pos_[pos];
            return &kLrSeedMismatch;
        }
        // Seed growth: the previous iteration's result feeds this one. Every
        // reference to the cycle at this position shares the one entry.
        ++stats_.memo_hits;
        return entry.result->is_mismatch() ? &kLrSeedMismatch : entry.result;
    }

    if (entry.result != nullptr) {
        bool fresh = entry.cycle_depth == cycle_depth_for_pos_[pos];
        bool phase_ok = cache_valid(entry, eff_phase);
        if (fresh && phase_ok) {
            ++stats_.memo_hits;
            if (entry.result->is_complete && entry.cached_in_recovery_phase != eff_phase) {
                ++stats_.cross_phase_complete_reuse;
            }
            if (eff_phase && !entry.result->is_complete && !entry.cached_in_recovery_phase) {
                ++stats_.phase2_incomplete_phase1_returns;
            }
            return entry.result;
        }
        if (!phase_ok) {
            // Results from the other phase are never returnable and must not
            // gate the re-parse's store-if-longer comparison.
            entry.result = nullptr;
            entry.found_left_rec = false;
        }
    }

    entry.in_rec_path = true;
    const uint64_t activation = ++activation_counter_;
    while (true) {
        ++stats_.rule_body_evals;
        if (trace_expansion_) {
            body_eval_log_.push_back(
                BodyEval{rule, pos, cycle_depth_for_pos_[pos], eff_phase});
        }
        const Match* fresh_m = match_clause(grammar_->rules[rule].top, pos, nullptr);
        if (entry.result != nullptr && fresh_m->len <= entry.result->len) break;
        entry.result = fresh_m;
        entry.cached_in_recovery_phase = eff_phase;
        if (trace_expansion_) {
            expansion_log_.push_back(ExpansionStep{rule, pos, fresh_m->len, activation});
        }
        if (!entry.found_left_rec) break;
        entry.cycle_depth = ++cycle_depth_for_pos_[pos];
        ++stats_.expansion_iterations;
    }
    entry.in_rec_path = false;
    entry.cycle_depth = cycle_depth_for_pos_[pos];
    if (entry.result->is_mismatch()) {
        // A finished expansion's mismatch is a genuine answer, not a seed.
        entry.result = &kMismatch;
    }
    return entry.result;
}

const Match* ParseSession::match_clause(const Clause* clause, int pos, const Clause* bound) {
    switch (clause->kind) {
        case ClauseKind::Seq: return match_seq(clause, pos, bound);
        case ClauseKind::First: return match_first(clause, pos, bound);
        case ClauseKind::OneOrMore: return match_one_or_more(clause, pos, bound);
        case ClauseKind::NotFollowedBy: return match_not_followed_by(clause, pos);
        case ClauseKind::Terminal: return match_terminal(clause, pos);
        case ClauseKind::Epsilon: return arena_.make(clause, pos, 0, {}, true);
        case ClauseKind::RuleRef: return match_ref(clause, pos);
        default:
            throw std::logic_error("cannot match a derived or marker clause");
    }
}

const Match* ParseSession::match_terminal(const Clause* c, int pos) {
    ++stats_.terminal_checks;
    const Terminal& t = c->term;
    switch (t.kind) {
        case TerminalKind::Char:
            if (pos < input_len_ && input_[pos] == t.lo) {
                return arena_.make(c, pos, 1, {}, true);
            }
            break;
        case TerminalKind::Range:
            if (pos < input_len_ && input_[pos] >= t.lo && input_[pos] <= t.hi) {
                return arena_.make(c, pos, 1, {}, true);
            }
            break;
        case TerminalKind::Literal: {
            int k = t.length();
            if (pos + k <= input_len_ && input_.compare(pos, k, t.text) == 0) {
                return arena_.make(c, pos, k, {}, true);
            }
            break;
        }
    }
    return &kMismatch;
}

const Match* ParseSession::match_ref(const Clause* c, int pos) {
    const Match* m = match_rule(c->ref_rule, pos);
    if (m->is_mismatch()) return m;
    return arena_.make(c, pos, m->len, {m}, m->is_complete);
}

const Match* ParseSession::match_first(const Clause* c, int pos, const Clause* bound) {
    bool lr_tag = false;
    for (const Clause* alt : c->children) {
        const Match* m = match_clause(alt, pos, bound);
        if (!m->is_mismatch()) {
            std::vector<bool> flags{m->is_complete};
            bool complete = completeness_of(CompletenessOp::First, flags, false, false);
            return arena_.make(c, pos, m->len, {m}, complete);
        }
        lr_tag = lr_tag || m->is_from_lr_context;
    }
    return lr_tag ? &kLrSeedMismatch : &kMismatch;
}

const Match* ParseSession::match_seq(const Clause* c, int pos, const Clause* bound) {
    std::vector<const Match*> kids;
    kids.reserve(c->children.size());
    int p = pos;
    bool used_recovery = false;
    for (size_t i = 0; i < c->children.size(); ++i) {
        const Clause* child = c->children[i];
        const Clause* eff_bound = bound_for(c->children, i, bound);
        const Match* m = match_clause(child, p, eff_bound);
        if (m->is_mismatch()) {
            if (!recovery_active()) return m;
            if (m->is_from_lr_context) {
                // Seed mismatches are control flow, not errors.
                ++stats_.lr_recovery_suppressions;
                return m;
            }
            if (p == input_len_) {
                // End of input: delete the remaining grammar elements.
                kids.push_back(make_error(&marker::eof_delete, p, 0));
                ++stats_.eof_deletions;
                used_recovery = true;
                break;
            }
            SkipOutcome r = skip_search(child, p, eff_bound, m);
            if (r.kind == SkipOutcome::Repaired) {
                kids.push_back(make_error(&marker::skip_error, p, r.skip_len));
                kids.push_back(r.resumed);
                p += r.skip_len + r.resumed->len;
                used_recovery = true;
                continue;
            }
            return &kMismatch;
        }
        kids.push_back(m);
        p += m->len;
    }
    std::vector<bool> flags;
    flags.reserve(kids.size());
    for (const Match* k : kids) flags.push_back(k->is_complete);
    bool complete = completeness_of(CompletenessOp::Seq, flags, used_recovery, false);
    return arena_.make(c, pos, p - pos, std::move(kids), complete);
}

const Match* ParseSession::match_one_or_more(const Clause* c, int pos, const Clause* bound) {
    const Clause* child = c->children[0];
    std::vector<const Match*> kids;
    int p = pos;
    bool truncated = false;
    const Match* first_failure = nullptr;
    while (true) {
        const Match* m = match_clause(child, p, bound);
        if (!m->is_mismatch()) {
            kids.push_back(m);
            p += m->len;
            if (m->len == 0) break;  // zero-progress: record the one match, stop
            continue;
        }
        if (kids.empty()) {
            first_failure = m;
            break;
        }
        if (!recovery_active()) break;
        if (m->is_from_lr_context) {
            ++stats_.lr_recovery_suppressions;
            break;
        }
        if (bound != nullptr && !probe(bound, p)->is_mismatch()) break;  // bound takes over
        if (p == input_len_) break;
        SkipOutcome r = skip_search(child, p, bound, m);
        if (r.kind == SkipOutcome::Repaired) {
            kids.push_back(make_error(&marker::skip_error, p, r.skip_len));
            kids.push_back(r.resumed);
            p += r.skip_len + r.resumed->len;
            if (r.resumed->len == 0) break;
            continue;
        }
        if (r.kind == SkipOutcome::BoundBlocked) {
            // Junk separates the last element from the bound; consume it as
            // an error and end the repetition early.
            kids.push_back(make_error(&marker::skip_error, p, r.skip_len));
            p += r.skip_len;
            truncated = true;
        }
        break;
    }
    if (kids.empty()) {
        return (first_failure != nullptr && first_failure->is_from_lr_context)
                   ? &kLrSeedMismatch
                   : &kMismatch;
    }
    std::vector<bool> flags;
    flags.reserve(kids.size());
    for (const Match* k : kids) flags.push_back(k->is_complete);
    bool complete = completeness_of(CompletenessOp::Repetition, flags, false, truncated);
    return arena_.make(c, pos, p - pos, std::move(kids), complete);
}

const Match* ParseSession::match_not_followed_by(const Clause* c, int pos) {
    // Lookahead is always evaluated with discovery semantics; recovery never
    // applies inside it.
    const Match* m = probe(c->children[0], pos);
    if (m->is_mismatch()) return arena_.make(c, pos, 0, {}, true);
    return &kMismatch;
}

const Match* ParseSession::probe(const Clause* clause, int pos) {
    ++stats_.probes;
    ++probe_depth_;
    const Match* m = match_clause(clause, pos, nullptr);
    --probe_depth_;
    return m;
}

const Match* ParseSession::probe_rule(RuleId rule, int pos) {
    ++stats_.probes;
    ++probe_depth_;
    const Match* m = match_rule(rule, pos);
    --probe_depth_;
    return m;
}

ParseSession::SkipOutcome ParseSession::skip_search(const Clause* failed, int pos,
                                                    const Clause* bound,
                                                    const Match* trigger) {
    ++stats_.skip_searches;
    if (trigger != nullptr && trigger->is_from_lr_context) {
        // Callers filter these out; the counter proves it in tests.
        ++stats_.skip_searches_on_lr_mismatch;
        return {};
    }
    const int limit = std::min(config_.max_skip, input_len_ - pos);
    for (int k = 1; k <= limit; ++k) {
        const Match* m = probe(failed, pos + k);
        if (!m->is_mismatch()) return {SkipOutcome::Repaired, k, m};
        if (bound != nullptr) {
            const Match* b = probe(bound, pos + k);
            if (!b->is_mismatch()) return {SkipOutcome::BoundBlocked, k, nullptr};
        }
    }
    return {};
}

const Match* ParseSession::span_wrap(const Match* result) {
    if (result == nullptr || result->is_mismatch()) {
        return make_error(&marker::total_error, 0, input_len_);
    }
    if (result->len == input_len_) return result;
    const Match* trail =
        make_error(&marker::trailing_error, result->len, input_len_ - result->len);
    return arena_.make(&marker::partial, 0, input_len_, {result, trail}, false);
}

const Match* ParseSession::parse() {
    // Phase 1: discovery.
    in_recovery_phase_ = false;
    const RuleId start = grammar_->start_rule;
    const Match* r = match_rule(start, 0);
    if (!r->is_mismatch() && r->is_complete && r->len == input_len_) return r;
    if (!config_.enabled) return span_wrap(r);

    // Phase 2: recovery. The start rule is re-derived at the frontier until
    // the pieces span the input; each stall skips forward to the next place
    // the start rule can resume.
    in_recovery_phase_ = true;
    stats_.phase2_entered = true;
    std::vector<const Match*> parts;
    int pos = 0;
    while (pos < input_len_) {
        if (MemoEntry* e = memo_.find(start, pos);
            e != nullptr && e->result != nullptr && !e->result->is_mismatch() &&
            e->result->is_complete && pos + e->result->len < input_len_) {
            // A cached complete-but-short segment would short-circuit
            // recovery inside it; force a re-derivation.
            e->result = nullptr;
            e->found_left_rec = false;
        }
        const Match* m = match_rule(start, pos);
        if (!m->is_mismatch() && (m->len > 0 || parts.empty())) {
            parts.push_back(m);
            pos += m->len;
            if (m->len > 0) continue;
        }
        // The start rule makes no progress here: scan ahead for a resume point.
        const int limit = std::min(config_.max_skip, input_len_ - pos);
        int found_k = 0;
        const Match* resumed = nullptr;
        for (int k = 1; k <= limit; ++k) {
            const Match* pm = probe_rule(start, pos + k);
            if (!pm->is_mismatch() && pm->len > 0) {
                found_k = k;
                resumed = pm;
                break;
            }
        }
        if (resumed != nullptr) {
            parts.push_back(make_error(&marker::skip_error, pos, found_k));
            parts.push_back(resumed);
            pos += found_k + resumed->len;
        } else {
            const Clause* kind = (parts.empty() && pos == 0) ? &marker::total_error
                                                             : &marker::trailing_error;
            parts.push_back(make_error(kind, pos, input_len_ - pos));
            pos = input_len_;
        }
    }
    if (parts.empty()) {
        // Empty input the grammar cannot match.
        parts.push_back(make_error(&marker::total_error, 0, 0));
    }
    if (parts.size() == 1) return parts[0];
    return arena_.make(&marker::partial, 0, input_len_, std::move(parts), false);
}

}  // namespace peglr
