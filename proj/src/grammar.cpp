#include "peglr/grammar.hpp"

#include <algorithm>
#include <unordered_set>

namespace peglr {

Clause* ClauseArena::make(ClauseKind kind) {
    nodes_.push_back(Clause{});
    nodes_.back().kind = kind;
    return &nodes_.back();
}

namespace {

// Flattens same-kind children so Seq/First are n-ary lists, never nested
// binary trees. Associativity of both operators makes this semantics-free.
std::vector<const Clause*> flatten(ClauseKind kind, std::vector<const Clause*> kids) {
    std::vector<const Clause*> out;
    out.reserve(kids.size());
    for (const Clause* k : kids) {
        if (k->kind == kind) {
            out.insert(out.end(), k->children.begin(), k->children.end());
        } else {
            out.push_back(k);
        }
    }
    return out;
}

}  // namespace

const Clause* ClauseArena::seq(std::vector<const Clause*> kids) {
    kids = flatten(ClauseKind::Seq, std::move(kids));
    if (kids.size() < 2) {
        throw GrammarError(GrammarError::Kind::InvalidClause, "Seq requires at least 2 subclauses");
    }
    Clause* c = make(ClauseKind::Seq);
    c->children = std::move(kids);
    return c;
}

const Clause* ClauseArena::first(std::vector<const Clause*> kids) {
    kids = flatten(ClauseKind::First, std::move(kids));
    if (kids.size() < 2) {
        throw GrammarError(GrammarError::Kind::InvalidClause, "First requires at least 2 subclauses");
    }
    Clause* c = make(ClauseKind::First);
    c->children = std::move(kids);
    return c;
}

const Clause* ClauseArena::one_or_more(const Clause* child) {
    Clause* c = make(ClauseKind::OneOrMore);
    c->children = {child};
    return c;
}

const Clause* ClauseArena::not_followed_by(const Clause* child) {
    Clause* c = make(ClauseKind::NotFollowedBy);
    c->children = {child};
    return c;
}

const Clause* ClauseArena::optional(const Clause* child) {
    Clause* c = make(ClauseKind::Optional);
    c->children = {child};
    return c;
}

const Clause* ClauseArena::zero_or_more(const Clause* child) {
    Clause* c = make(ClauseKind::ZeroOrMore);
    c->children = {child};
    return c;
}

const Clause* ClauseArena::followed_by(const Clause* child) {
    Clause* c = make(ClauseKind::FollowedBy);
    c->children = {child};
    return c;
}

const Clause* ClauseArena::ch(char c0) {
    Clause* c = make(ClauseKind::Terminal);
    c->term = Terminal{TerminalKind::Char, c0, c0, {}};
    return c;
}

const Clause* ClauseArena::range(char lo, char hi) {
    if (hi < lo) {
        throw GrammarError(GrammarError::Kind::InvalidClause, "empty character range");
    }
    Clause* c = make(ClauseKind::Terminal);
    c->term = Terminal{TerminalKind::Range, lo, hi, {}};
    return c;
}

const Clause* ClauseArena::literal(std::string_view text) {
    // An empty literal would shadow Epsilon; rejected at construction.
    if (text.empty()) {
        throw GrammarError(GrammarError::Kind::InvalidClause, "empty literal");
    }
    Clause* c = make(ClauseKind::Terminal);
    c->term = Terminal{TerminalKind::Literal, 0, 0, std::string(text)};
    return c;
}

const Clause* ClauseArena::epsilon() {
    return make(ClauseKind::Epsilon);
}

const Clause* ClauseArena::ref(std::string_view rule_name) {
    Clause* c = make(ClauseKind::RuleRef);
    c->ref_name = std::string(rule_name);
    return c;
}

const Clause* desugar(const Clause* clause, ClauseArena& arena) {
    switch (clause->kind) {
        case ClauseKind::Terminal:
        case ClauseKind::Epsilon:
        case ClauseKind::RuleRef:
            return clause;
        case ClauseKind::Seq: {
            std::vector<const Clause*> kids;
            kids.reserve(clause->children.size());
            for (const Clause* k : clause->children) kids.push_back(desugar(k, arena));
            if (kids == clause->children) return clause;
            return arena.seq(std::move(kids));
        }
        case ClauseKind::First: {
            std::vector<const Clause*> kids;
            kids.reserve(clause->children.size());
            for (const Clause* k : clause->children) kids.push_back(desugar(k, arena));
            if (kids == clause->children) return clause;
            return arena.first(std::move(kids));
        }
        case ClauseKind::OneOrMore: {
            const Clause* k = desugar(clause->children[0], arena);
            return k == clause->children[0] ? clause : arena.one_or_more(k);
        }
        case ClauseKind::NotFollowedBy: {
            const Clause* k = desugar(clause->children[0], arena);
            return k == clause->children[0] ? clause : arena.not_followed_by(k);
        }
        case ClauseKind::Optional:
            // e? == e / eps
            return arena.first({desugar(clause->children[0], arena), arena.epsilon()});
        case ClauseKind::ZeroOrMore:
            // e* == e+ / eps
            return arena.first(
                {arena.one_or_more(desugar(clause->children[0], arena)), arena.epsilon()});
        case ClauseKind::FollowedBy:
            // &e == !!e
            return arena.not_followed_by(
                arena.not_followed_by(desugar(clause->children[0], arena)));
        default:
            throw GrammarError(GrammarError::Kind::InvalidClause,
                               "marker clause inside a grammar");
    }
}

std::optional<RuleId> Grammar::find_rule(std::string_view name) const {
    for (size_t i = 0; i < rules.size(); ++i) {
        if (rules[i].name == name) return static_cast<RuleId>(i);
    }
    return std::nullopt;
}

int Grammar::size() const {
    int n = static_cast<int>(rules.size());
    std::unordered_set<const Clause*> seen;
    for (const Rule& r : rules) {
        // count reachable nodes once across the whole grammar
        std::vector<const Clause*> stack{r.top};
        while (!stack.empty()) {
            const Clause* c = stack.back();
            stack.pop_back();
            if (!c || !seen.insert(c).second) continue;
            for (const Clause* k : c->children) stack.push_back(k);
        }
    }
    return n + static_cast<int>(seen.size());
}

namespace {

void resolve_clause(Clause* c, const Grammar& g, const std::string& owner) {
    if (c->kind == ClauseKind::RuleRef) {
        auto id = g.find_rule(c->ref_name);
        if (!id) {
            throw GrammarError(GrammarError::Kind::UnknownRule,
                               "unknown rule '" + c->ref_name + "' referenced from rule '" +
                                   owner + "'");
        }
        c->ref_rule = *id;
        return;
    }
    for (const Clause* k : c->children) {
        resolve_clause(const_cast<Clause*>(k), g, owner);
    }
}

}  // namespace

void resolve_refs(Grammar& grammar) {
    if (grammar.rules.empty() || grammar.start_rule < 0 ||
        grammar.start_rule >= static_cast<RuleId>(grammar.rules.size())) {
        throw GrammarError(GrammarError::Kind::MissingStartRule, "grammar has no start rule");
    }
    for (const Rule& r : grammar.rules) {
        resolve_clause(const_cast<Clause*>(r.top), grammar, r.name);
    }
    grammar.resolved = true;
}

bool clause_equal(const Clause* a, const Clause* b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ClauseKind::Terminal:
            return a->term.kind == b->term.kind && a->term.lo == b->term.lo &&
                   a->term.hi == b->term.hi && a->term.text == b->term.text;
        case ClauseKind::RuleRef:
            return a->ref_name == b->ref_name;
        case ClauseKind::Epsilon:
            return true;
        default:
            if (a->children.size() != b->children.size()) return false;
            for (size_t i = 0; i < a->children.size(); ++i) {
                if (!clause_equal(a->children[i], b->children[i])) return false;
            }
            return true;
    }
}

std::string terminal_pattern(const Terminal& t) {
    switch (t.kind) {
        case TerminalKind::Char: return std::string("'") + t.lo + "'";
        case TerminalKind::Range: {
            std::string s = "[";
            s.push_back(t.lo);
            s.push_back('-');
            s.push_back(t.hi);
            s += "]";
            return s;
        }
        case TerminalKind::Literal: return "'" + t.text + "'";
    }
    return "?";
}

int clause_count(const Clause* c) {
    std::unordered_set<const Clause*> seen;
    std::vector<const Clause*> stack{c};
    while (!stack.empty()) {
        const Clause* x = stack.back();
        stack.pop_back();
        if (!x || !seen.insert(x).second) continue;
        for (const Clause* k : x->children) stack.push_back(k);
    }
    return static_cast<int>(seen.size());
}

void GrammarBuilder::rule(std::string_view name, const Clause* top) {
    std::string key(name);
    if (index_.count(key)) {
        throw GrammarError(GrammarError::Kind::DuplicateRule,
                           "duplicate rule '" + key + "'");
    }
    index_[key] = static_cast<RuleId>(grammar_.rules.size());
    grammar_.rules.push_back(Rule{std::move(key), top});
}

Grammar GrammarBuilder::build(std::string_view start_name) {
    if (grammar_.rules.empty()) {
        throw GrammarError(GrammarError::Kind::MissingStartRule, "grammar has no rules");
    }
    if (start_name.empty()) {
        grammar_.start_rule = 0;
    } else {
        auto it = index_.find(std::string(start_name));
        if (it == index_.end()) {
            throw GrammarError(GrammarError::Kind::MissingStartRule,
                               "start rule '" + std::string(start_name) + "' not defined");
        }
        grammar_.start_rule = it->second;
    }
    for (Rule& r : grammar_.rules) {
        r.top = desugar(r.top, grammar_.arena);
    }
    Grammar g = std::move(grammar_);
    grammar_ = Grammar{};
    index_.clear();
    resolve_refs(g);
    return g;
}

}  // namespace peglr
