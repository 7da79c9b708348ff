// Textual PEG grammar front end.
//
// Grammar files are a sequence of rules `Name <- expr ;` with `#` line
// comments. Operator precedence, tightest to loosest: prefix (! &), suffix
// (? * +), sequence (juxtaposition), ordered choice (/). Literals are
// single-quoted with \' \\ \n \r \t escapes; character classes use
// [a-z0-9] with `-` ranges; `()` is the empty match. The full meta-grammar
// is documented in docs/grammar-format.md.

#ifndef PEGLR_GRAMMAR_TEXT_HPP
#define PEGLR_GRAMMAR_TEXT_HPP

#include <string>
#include <string_view>

#include "peglr/grammar.hpp"

namespace peglr {

struct GrammarSource {
    std::string text;
    std::string origin = "<grammar>";  // display name for diagnostics
};

// Parses grammar text into an unresolved Grammar: derived operators are
// desugared, the first declared rule is the start rule, RuleRefs are not yet
// bound. Throws GrammarError (Syntax with line/col, DuplicateRule).
Grammar parse_grammar_text(const GrammarSource& src);

// parse + resolve in one step.
Grammar load_grammar(const GrammarSource& src);

// Pretty-prints a grammar in the file syntax. Re-parsing the output yields a
// structurally identical clause tree. `e / eps` forms print as `e?`/`e*`.
std::string print_grammar(const Grammar& grammar);

}  // namespace peglr

#endif
