// Clause algebra and rule table for PEG grammars.
//
// A grammar is an immutable set of named rules, each bound to a clause tree
// built from the four principal PEG operators (Seq, First, OneOrMore,
// NotFollowedBy) plus Terminal, Epsilon and RuleRef. The derived operators
// (Optional, ZeroOrMore, FollowedBy) exist only transiently: desugar()
// rewrites them into the principal set before a grammar is resolved.

#ifndef PEGLR_GRAMMAR_HPP
#define PEGLR_GRAMMAR_HPP

#include <deque>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace peglr {

enum class ClauseKind {
    Seq,
    First,
    OneOrMore,
    NotFollowedBy,
    Terminal,
    Epsilon,
    RuleRef,
    // Derived operators, rewritten away by desugar().
    Optional,
    ZeroOrMore,
    FollowedBy,
    // Match-tree markers; these never occur inside a grammar.
    SyntaxError,
    EofDelete,
    Wrapper,
};

enum class TerminalKind { Char, Range, Literal };

struct Terminal {
    TerminalKind kind = TerminalKind::Char;
    char lo = 0;        // Char: the character; Range: low bound
    char hi = 0;        // Range: high bound (inclusive)
    std::string text;   // Literal: the string, length >= 1

    int length() const {
        return kind == TerminalKind::Literal ? static_cast<int>(text.size()) : 1;
    }
};

using RuleId = int;

struct Clause {
    ClauseKind kind = ClauseKind::Epsilon;
    std::vector<const Clause*> children;  // Seq/First: >= 2; unary ops: 1
    Terminal term;                        // kind == Terminal only
    std::string ref_name;                 // kind == RuleRef only
    RuleId ref_rule = -1;                 // bound by resolve_refs()

    bool is_ref() const { return kind == ClauseKind::RuleRef; }
};

class GrammarError : public std::runtime_error {
  public:
    enum class Kind { Syntax, DuplicateRule, UnknownRule, MissingStartRule, InvalidClause };

    GrammarError(Kind k, std::string message, int line = 0, int col = 0)
        : std::runtime_error(std::move(message)), kind(k), line(line), col(col) {}

    Kind kind;
    int line;  // 1-based; 0 when not applicable
    int col;
};

// Owns clause nodes; pointers remain stable for the arena's lifetime.
class ClauseArena {
  public:
    const Clause* seq(std::vector<const Clause*> kids);
    const Clause* first(std::vector<const Clause*> kids);
    const Clause* one_or_more(const Clause* child);
    const Clause* not_followed_by(const Clause* child);
    const Clause* optional(const Clause* child);
    const Clause* zero_or_more(const Clause* child);
    const Clause* followed_by(const Clause* child);
    const Clause* ch(char c);
    const Clause* range(char lo, char hi);
    const Clause* literal(std::string_view text);
    const Clause* epsilon();
    const Clause* ref(std::string_view rule_name);

    size_t size() const { return nodes_.size(); }

  private:
    friend const Clause* desugar(const Clause*, ClauseArena&);
    Clause* make(ClauseKind kind);
    std::deque<Clause> nodes_;
};

struct Rule {
    std::string name;
    const Clause* top = nullptr;
};

// Immutable after resolve_refs(); safe to share across concurrent sessions.
struct Grammar {
    std::vector<Rule> rules;
    RuleId start_rule = -1;
    ClauseArena arena;
    bool resolved = false;

    std::optional<RuleId> find_rule(std::string_view name) const;
    const Rule& start() const { return rules[start_rule]; }
    // Rule count plus total clause count; the |G| of complexity bounds.
    int size() const;
};

// Rewrites derived operators per their defining equivalences:
//   e?  ->  e / eps        e*  ->  e+ / eps        &e  ->  !!e
// Total and idempotent; principal-only trees are rebuilt unchanged.
const Clause* desugar(const Clause* clause, ClauseArena& arena);

// Binds every RuleRef to its rule index. Throws GrammarError (UnknownRule,
// MissingStartRule). Self- and mutual references are legal; left recursion
// is resolved at parse time, not here. Idempotent.
void resolve_refs(Grammar& grammar);

// Structural equality of clause trees (ref names compared, bindings ignored).
bool clause_equal(const Clause* a, const Clause* b);

// Grammar-file notation for a terminal: 'a', [a-z], 'abc'.
std::string terminal_pattern(const Terminal& t);

// Number of clause nodes reachable from `c` (shared nodes counted once).
int clause_count(const Clause* c);

// Convenience for assembling grammars in code. desugars and resolves.
class GrammarBuilder {
  public:
    ClauseArena& arena() { return grammar_.arena; }
    void rule(std::string_view name, const Clause* top);
    // Start rule is the first added unless overridden by name here.
    Grammar build(std::string_view start_name = "");

  private:
    Grammar grammar_;
    std::unordered_map<std::string, RuleId> index_;
};

}  // namespace peglr

#endif
