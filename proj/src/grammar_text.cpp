#include "peglr/grammar_text.hpp"

#include <cctype>
#include <sstream>

namespace peglr {

namespace {

struct Cursor {
    std::string_view text;
    std::string origin;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return eof() ? '\0' : text[pos]; }

    char advance() {
        char c = text[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    [[noreturn]] void fail(const std::string& expected) const {
        std::ostringstream os;
        os << origin << ":" << line << ":" << col << ": expected " << expected;
        if (!eof()) {
            os << ", found '" << peek() << "'";
        } else {
            os << ", found end of input";
        }
        throw GrammarError(GrammarError::Kind::Syntax, os.str(), line, col);
    }

    void skip_space() {
        while (!eof()) {
            char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool match(char c) {
        if (peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    // True when the next tokens are `<-` (without consuming).
    bool at_arrow() const {
        return pos + 1 < text.size() && text[pos] == '<' && text[pos + 1] == '-';
    }
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class TextParser {
  public:
    TextParser(const GrammarSource& src, Grammar& g)
        : cur_{src.text, src.origin}, g_(g) {}

    void run() {
        cur_.skip_space();
        if (cur_.eof()) cur_.fail("at least one rule");
        while (!cur_.eof()) {
            parse_rule();
            cur_.skip_space();
        }
        g_.start_rule = 0;
    }

  private:
    Cursor cur_;
    Grammar& g_;

    ClauseArena& arena() { return g_.arena; }

    void parse_rule() {
        std::string name = parse_ident();
        cur_.skip_space();
        if (!cur_.at_arrow()) cur_.fail("'<-'");
        cur_.advance();
        cur_.advance();
        cur_.skip_space();
        const Clause* body = parse_expr();
        cur_.skip_space();
        if (!cur_.match(';')) cur_.fail("';'");
        for (const Rule& r : g_.rules) {
            if (r.name == name) {
                throw GrammarError(GrammarError::Kind::DuplicateRule,
                                   cur_.origin + ": duplicate rule '" + name + "'", cur_.line,
                                   cur_.col);
            }
        }
        g_.rules.push_back(Rule{std::move(name), desugar(body, arena())});
    }

    std::string parse_ident() {
        if (!ident_start(cur_.peek())) cur_.fail("rule name");
        std::string s;
        while (ident_char(cur_.peek())) s.push_back(cur_.advance());
        return s;
    }

    const Clause* parse_expr() {
        std::vector<const Clause*> alts;
        alts.push_back(parse_seq());
        cur_.skip_space();
        while (cur_.match('/')) {
            cur_.skip_space();
            alts.push_back(parse_seq());
            cur_.skip_space();
        }
        return alts.size() == 1 ? alts[0] : arena().first(std::move(alts));
    }

    const Clause* parse_seq() {
        std::vector<const Clause*> items;
        items.push_back(parse_suffixed());
        while (true) {
            cur_.skip_space();
            char c = cur_.peek();
            if (c == '\0' || c == '/' || c == ';' || c == ')') break;
            if (ident_start(c)) {
                // A name followed by `<-` starts the next rule.
                Cursor probe = cur_;
                while (ident_char(probe.peek())) probe.advance();
                probe.skip_space();
                if (probe.at_arrow()) break;
            }
            items.push_back(parse_suffixed());
        }
        return items.size() == 1 ? items[0] : arena().seq(std::move(items));
    }

    const Clause* parse_suffixed() {
        const Clause* c = parse_prefixed();
        while (true) {
            cur_.skip_space();
            char s = cur_.peek();
            if (s == '?') {
                cur_.advance();
                c = arena().optional(c);
            } else if (s == '*') {
                cur_.advance();
                c = arena().zero_or_more(c);
            } else if (s == '+') {
                cur_.advance();
                c = arena().one_or_more(c);
            } else {
                break;
            }
        }
        return c;
    }

    const Clause* parse_prefixed() {
        if (cur_.match('!')) {
            cur_.skip_space();
            return arena().not_followed_by(parse_prefixed());
        }
        if (cur_.match('&')) {
            cur_.skip_space();
            return arena().followed_by(parse_prefixed());
        }
        return parse_primary();
    }

    const Clause* parse_primary() {
        char c = cur_.peek();
        if (c == '\'') return parse_literal();
        if (c == '[') return parse_class();
        if (c == '(') {
            cur_.advance();
            cur_.skip_space();
            if (cur_.match(')')) return arena().epsilon();
            const Clause* inner = parse_expr();
            cur_.skip_space();
            if (!cur_.match(')')) cur_.fail("')'");
            return inner;
        }
        if (ident_start(c)) return arena().ref(parse_ident());
        cur_.fail("a literal, class, '(' or rule name");
    }

    char parse_escape(const char* where) {
        char e = cur_.peek();
        switch (e) {
            case 'n': cur_.advance(); return '\n';
            case 'r': cur_.advance(); return '\r';
            case 't': cur_.advance(); return '\t';
            case '\\': cur_.advance(); return '\\';
            case '\'': cur_.advance(); return '\'';
            case ']': cur_.advance(); return ']';
            case '-': cur_.advance(); return '-';
            default: cur_.fail(std::string("escape in ") + where);
        }
    }

    const Clause* parse_literal() {
        cur_.advance();  // opening quote
        std::string text;
        while (true) {
            if (cur_.eof() || cur_.peek() == '\n') cur_.fail("closing quote");
            char c = cur_.advance();
            if (c == '\'') break;
            if (c == '\\') c = parse_escape("literal");
            text.push_back(c);
        }
        if (text.empty()) cur_.fail("non-empty literal (use () for the empty match)");
        if (text.size() == 1) return arena().ch(text[0]);
        return arena().literal(text);
    }

    const Clause* parse_class() {
        cur_.advance();  // '['
        std::vector<std::pair<char, char>> ranges;
        while (true) {
            if (cur_.eof() || cur_.peek() == '\n') cur_.fail("']'");
            if (cur_.match(']')) break;
            char lo = cur_.advance();
            if (lo == '\\') lo = parse_escape("class");
            char hi = lo;
            if (cur_.peek() == '-' && cur_.pos + 1 < cur_.text.size() &&
                cur_.text[cur_.pos + 1] != ']') {
                cur_.advance();  // '-'
                hi = cur_.advance();
                if (hi == '\\') hi = parse_escape("class");
                if (hi < lo) cur_.fail("non-empty range");
            }
            ranges.emplace_back(lo, hi);
        }
        if (ranges.empty()) cur_.fail("non-empty character class");
        auto to_clause = [&](std::pair<char, char> r) {
            return r.first == r.second ? arena().ch(r.first) : arena().range(r.first, r.second);
        };
        if (ranges.size() == 1) return to_clause(ranges[0]);
        std::vector<const Clause*> alts;
        alts.reserve(ranges.size());
        for (auto r : ranges) alts.push_back(to_clause(r));
        return arena().first(std::move(alts));
    }
};

// ---- printing ----

// Precedence level of a printed clause: 0 choice, 1 seq, 2 suffix, 3 prefix,
// 4 primary. Resugared `e?`/`e*` forms are suffix level.
int print_level(const Clause* c);

bool is_optional_sugar(const Clause* c) {
    return c->kind == ClauseKind::First && c->children.size() == 2 &&
           c->children[1]->kind == ClauseKind::Epsilon;
}

int print_level(const Clause* c) {
    switch (c->kind) {
        case ClauseKind::First: return is_optional_sugar(c) ? 2 : 0;
        case ClauseKind::Seq: return 1;
        case ClauseKind::OneOrMore:
        case ClauseKind::Optional:
        case ClauseKind::ZeroOrMore: return 2;
        case ClauseKind::NotFollowedBy:
        case ClauseKind::FollowedBy: return 3;
        default: return 4;
    }
}

void escape_into(std::string& out, char c, bool in_class) {
    switch (c) {
        case '\n': out += "\\n"; return;
        case '\r': out += "\\r"; return;
        case '\t': out += "\\t"; return;
        case '\\': out += "\\\\"; return;
        default: break;
    }
    if (in_class && (c == ']' || c == '-')) {
        out.push_back('\\');
    } else if (!in_class && c == '\'') {
        out.push_back('\\');
    }
    out.push_back(c);
}

void print_clause(std::string& out, const Clause* c, int min_level) {
    int level = print_level(c);
    bool parens = level < min_level;
    if (parens) out.push_back('(');
    switch (c->kind) {
        case ClauseKind::Terminal:
            switch (c->term.kind) {
                case TerminalKind::Char:
                    out.push_back('\'');
                    escape_into(out, c->term.lo, false);
                    out.push_back('\'');
                    break;
                case TerminalKind::Range:
                    out.push_back('[');
                    escape_into(out, c->term.lo, true);
                    out.push_back('-');
                    escape_into(out, c->term.hi, true);
                    out.push_back(']');
                    break;
                case TerminalKind::Literal:
                    out.push_back('\'');
                    for (char ch : c->term.text) escape_into(out, ch, false);
                    out.push_back('\'');
                    break;
            }
            break;
        case ClauseKind::Epsilon:
            out += "()";
            break;
        case ClauseKind::RuleRef:
            out += c->ref_name;
            break;
        case ClauseKind::Seq:
            for (size_t i = 0; i < c->children.size(); ++i) {
                if (i) out.push_back(' ');
                print_clause(out, c->children[i], 2);
            }
            break;
        case ClauseKind::First:
            if (is_optional_sugar(c)) {
                const Clause* body = c->children[0];
                if (body->kind == ClauseKind::OneOrMore) {
                    print_clause(out, body->children[0], 3);
                    out.push_back('*');
                } else {
                    print_clause(out, body, 3);
                    out.push_back('?');
                }
            } else {
                for (size_t i = 0; i < c->children.size(); ++i) {
                    if (i) out += " / ";
                    print_clause(out, c->children[i], 1);
                }
            }
            break;
        case ClauseKind::OneOrMore:
            print_clause(out, c->children[0], 3);
            out.push_back('+');
            break;
        case ClauseKind::Optional:
            print_clause(out, c->children[0], 3);
            out.push_back('?');
            break;
        case ClauseKind::ZeroOrMore:
            print_clause(out, c->children[0], 3);
            out.push_back('*');
            break;
        case ClauseKind::NotFollowedBy:
            out.push_back('!');
            print_clause(out, c->children[0], 3);
            break;
        case ClauseKind::FollowedBy:
            out.push_back('&');
            print_clause(out, c->children[0], 3);
            break;
        default:
            break;  // marker kinds never occur in grammars
    }
    if (parens) out.push_back(')');
}

}  // namespace

Grammar parse_grammar_text(const GrammarSource& src) {
    Grammar g;
    TextParser(src, g).run();
    return g;
}

Grammar load_grammar(const GrammarSource& src) {
    Grammar g = parse_grammar_text(src);
    resolve_refs(g);
    return g;
}

std::string print_grammar(const Grammar& grammar) {
    std::string out;
    for (const Rule& r : grammar.rules) {
        out += r.name;
        out += " <- ";
        print_clause(out, r.top, 0);
        out += " ;\n";
    }
    return out;
}

}  // namespace peglr
