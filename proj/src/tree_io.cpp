#include "peglr/tree_io.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace peglr {

namespace {

void quote_into(std::string& out, std::string_view text) {
    out.push_back('"');
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c); break;
        }
    }
    out.push_back('"');
}

struct Renderer {
    std::string_view input;
    const Grammar* grammar;
    bool raw = false;
    std::string out;
    std::unordered_map<const Clause*, const std::string*> top_names;

    Renderer(std::string_view in, const Grammar& g, bool raw_mode)
        : input(in), grammar(&g), raw(raw_mode) {
        for (const Rule& r : g.rules) top_names.emplace(r.top, &r.name);
    }

    std::string_view matched_text(const Match* m) const {
        return input.substr(static_cast<size_t>(m->pos), static_cast<size_t>(m->len));
    }

    void head(const std::string& label, const Match* m) {
        out.push_back('(');
        out += label;
        out += ' ' + std::to_string(m->pos) + ' ' + std::to_string(m->len);
    }

    // One standalone item: the root, stitched pieces, or a nested rule node.
    void render_node(const Match* m) {
        if (is_syntax_error(*m)) {
            head("ERROR", m);
            out.push_back(' ');
            quote_into(out, matched_text(m));
            out.push_back(')');
            return;
        }
        if (is_eof_delete(*m)) {
            head("EOF-DELETE", m);
            out.push_back(')');
            return;
        }
        if (m->clause->kind == ClauseKind::Wrapper) {
            head("PARTIAL", m);
            for (const Match* k : m->children) {
                if (!raw && skippable(k)) continue;
                out.push_back(' ');
                render_node(k);
            }
            out.push_back(')');
            return;
        }
        if (raw) {
            render_raw(m);
            return;
        }
        if (m->clause->kind == ClauseKind::RuleRef) {
            head(m->clause->ref_name, m);
            inline_items(m->children[0]);
            out.push_back(')');
            return;
        }
        if (auto it = top_names.find(m->clause); it != top_names.end()) {
            head(*it->second, m);
            inline_items_of_body(m);
            out.push_back(')');
            return;
        }
        // A bare operator node outside any rule context; render its content.
        head(op_label(m), m);
        inline_items_of_body(m);
        out.push_back(')');
    }

    static bool skippable(const Match* m) {
        // Zero-width bookkeeping nodes add no information in pretty mode.
        return is_eof_delete(*m) ||
               (m->clause != nullptr && (m->clause->kind == ClauseKind::Epsilon ||
                                         m->clause->kind == ClauseKind::NotFollowedBy));
    }

    // Emits the *content* of a rule body match: operator structure is
    // inlined, nested rules stay named nodes, terminals become quoted text.
    void inline_items(const Match* m) {
        switch (m->clause->kind) {
            case ClauseKind::Terminal:
                out.push_back(' ');
                quote_into(out, matched_text(m));
                return;
            case ClauseKind::Epsilon:
            case ClauseKind::NotFollowedBy:
            case ClauseKind::EofDelete:
                return;
            case ClauseKind::SyntaxError:
            case ClauseKind::RuleRef:
            case ClauseKind::Wrapper:
                out.push_back(' ');
                render_node(m);
                return;
            case ClauseKind::First:
                inline_items(m->children[0]);
                return;
            case ClauseKind::Seq:
            case ClauseKind::OneOrMore:
                for (const Match* k : m->children) inline_items(k);
                return;
            default:
                return;
        }
    }

    void inline_items_of_body(const Match* m) {
        switch (m->clause->kind) {
            case ClauseKind::Seq:
            case ClauseKind::OneOrMore:
                for (const Match* k : m->children) inline_items(k);
                return;
            case ClauseKind::First:
                inline_items(m->children[0]);
                return;
            default:
                inline_items(m);
                return;
        }
    }

    std::string op_label(const Match* m) const {
        switch (m->clause->kind) {
            case ClauseKind::Seq: return "seq";
            case ClauseKind::First: return "first";
            case ClauseKind::OneOrMore: return "rep";
            case ClauseKind::NotFollowedBy: return "not";
            case ClauseKind::Epsilon: return "eps";
            case ClauseKind::Terminal: return "term";
            case ClauseKind::RuleRef: return "ref:" + m->clause->ref_name;
            default: return "?";
        }
    }

    void render_raw(const Match* m) {
        head(op_label(m), m);
        if (m->clause->kind == ClauseKind::Terminal) {
            out.push_back(' ');
            quote_into(out, matched_text(m));
        }
        for (const Match* k : m->children) {
            out.push_back(' ');
            if (is_syntax_error(*k) || is_eof_delete(*k) ||
                k->clause->kind == ClauseKind::Wrapper) {
                render_node(k);
            } else {
                render_raw(k);
            }
        }
        out.push_back(')');
    }
};

nlohmann::json to_json(const Match* m, std::string_view input, const Renderer& names) {
    nlohmann::json j;
    if (is_syntax_error(*m)) {
        j["rule"] = "syntax-error";
    } else if (is_eof_delete(*m)) {
        j["rule"] = "eof-delete";
    } else if (m->clause->kind == ClauseKind::Wrapper) {
        j["rule"] = "partial";
    } else if (m->clause->kind == ClauseKind::RuleRef) {
        j["rule"] = m->clause->ref_name;
    } else if (m->clause->kind == ClauseKind::Terminal) {
        j["rule"] = terminal_pattern(m->clause->term);
    } else {
        j["rule"] = names.op_label(m);
    }
    j["pos"] = m->pos;
    j["len"] = m->len;
    j["complete"] = m->is_complete;
    j["error"] = is_syntax_error(*m);
    if (m->clause != nullptr && m->clause->kind == ClauseKind::Terminal) {
        j["text"] = std::string(input.substr(static_cast<size_t>(m->pos),
                                             static_cast<size_t>(m->len)));
    }
    nlohmann::json kids = nlohmann::json::array();
    for (const Match* k : m->children) kids.push_back(to_json(k, input, names));
    j["children"] = std::move(kids);
    return j;
}

}  // namespace

std::string serialize_tree(const Match* root, std::string_view input, const Grammar& grammar,
                           const SerializeOptions& options) {
    if (root == nullptr || root->is_mismatch()) {
        throw std::logic_error("cannot serialize a mismatch; span_wrap the result first");
    }
    if (root->len != static_cast<int>(input.size())) {
        throw std::logic_error("serialized tree must span the input");
    }
    Renderer r(input, grammar, options.raw);
    if (options.format == TreeFormat::Json) {
        nlohmann::json j = to_json(root, input, r);
        return options.pretty ? j.dump(2) : j.dump();
    }
    r.render_node(root);
    return r.out;
}

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Skip: return "skip";
        case ErrorKind::Trailing: return "trailing";
        case ErrorKind::Total: return "total";
        case ErrorKind::EofDelete: return "eof-delete";
    }
    return "?";
}

namespace {

void collect(const Match* m, std::vector<ErrorSpan>& out) {
    if (is_syntax_error(*m)) {
        ErrorKind k = ErrorKind::Skip;
        if (m->clause == &marker::trailing_error) k = ErrorKind::Trailing;
        if (m->clause == &marker::total_error) k = ErrorKind::Total;
        out.push_back(ErrorSpan{m->pos, m->len, k});
        return;
    }
    if (is_eof_delete(*m)) {
        out.push_back(ErrorSpan{m->pos, 0, ErrorKind::EofDelete});
        return;
    }
    for (const Match* c : m->children) collect(c, out);
}

}  // namespace

std::vector<ErrorSpan> collect_errors(const Match* root) {
    std::vector<ErrorSpan> out;
    if (root != nullptr && !root->is_mismatch()) collect(root, out);
    std::stable_sort(out.begin(), out.end(),
                     [](const ErrorSpan& a, const ErrorSpan& b) { return a.pos < b.pos; });
    return out;
}

}  // namespace peglr
