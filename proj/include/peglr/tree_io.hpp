// Parse tree and error report serialization.
//
// Two formats:
//   SExpr  — readable rule-labelled trees: `(Rule pos len child...)` with
//            terminals as quoted matched text and errors as
//            `(ERROR pos len "skipped")`. Rule reference wrappers are
//            flattened so nodes read as rule names; raw mode keeps every
//            node with an operator label instead.
//   Json   — one object per Match node, mirroring its fields exactly:
//            rule, pos, len, complete, error, text (terminals), children.

#ifndef PEGLR_TREE_IO_HPP
#define PEGLR_TREE_IO_HPP

#include <string>
#include <string_view>
#include <vector>

#include "peglr/engine.hpp"

namespace peglr {

enum class TreeFormat { SExpr, Json };

struct SerializeOptions {
    TreeFormat format = TreeFormat::SExpr;
    bool raw = false;     // disable rule-wrapper flattening (SExpr only)
    bool pretty = true;   // indentation (Json only)
};

// Renders a spanning parse tree. The root must cover the whole input
// (throws std::logic_error otherwise; run the result through the session's
// span_wrap first).
std::string serialize_tree(const Match* root, std::string_view input, const Grammar& grammar,
                           const SerializeOptions& options = {});

enum class ErrorKind { Skip, Trailing, Total, EofDelete };

struct ErrorSpan {
    int pos = 0;
    int len = 0;
    ErrorKind kind = ErrorKind::Skip;
};

const char* error_kind_name(ErrorKind kind);

// All SyntaxError nodes plus EOF deletions (length 0), sorted by position.
std::vector<ErrorSpan> collect_errors(const Match* root);

}  // namespace peglr

#endif
