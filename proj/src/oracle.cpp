#include "peglr/oracle.hpp"

#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace peglr {

namespace {

struct BudgetExceeded {};

uint64_t key_of(RuleId rule, int pos) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(rule)) << 32) |
           static_cast<uint32_t>(pos);
}

int len_of(const OracleNode* n) { return n == nullptr ? -1 : n->len; }

class Interpreter {
  public:
    Interpreter(const Grammar& g, std::string_view input, int depth_budget,
                uint64_t step_budget, std::deque<OracleNode>& nodes)
        : g_(g),
          input_(input),
          n_(static_cast<int>(input.size())),
          depth_budget_(depth_budget),
          step_budget_(step_budget),
          nodes_(nodes) {}

    // One unrolling round over the whole input with the given seeds.
    const OracleNode* run_round(const std::unordered_map<uint64_t, const OracleNode*>& seeds,
                                std::unordered_map<uint64_t, const OracleNode*>& results) {
        seeds_ = &seeds;
        results_ = &results;
        active_.clear();
        return rule_body(g_.start_rule, 0, 0);
    }

  private:
    const Grammar& g_;
    std::string_view input_;
    int n_;
    int depth_budget_;
    uint64_t step_budget_;
    uint64_t steps_ = 0;
    std::deque<OracleNode>& nodes_;
    const std::unordered_map<uint64_t, const OracleNode*>* seeds_ = nullptr;
    std::unordered_map<uint64_t, const OracleNode*>* results_ = nullptr;
    std::unordered_set<uint64_t> active_;

    const OracleNode* make(const Clause* c, int pos, int len,
                           std::vector<const OracleNode*> kids) {
        nodes_.push_back(OracleNode{c, pos, len, std::move(kids)});
        return &nodes_.back();
    }

    void spend(int depth) {
        if (++steps_ > step_budget_ || depth > depth_budget_) throw BudgetExceeded{};
    }

    const OracleNode* rule_body(RuleId rule, int pos, int depth) {
        uint64_t k = key_of(rule, pos);
        if (active_.count(k)) {
            // Repeated (rule, pos) on the path: substitute last round's result.
            auto it = seeds_->find(k);
            return it == seeds_->end() ? nullptr : it->second;
        }
        active_.insert(k);
        const OracleNode* body = eval(g_.rules[rule].top, pos, depth);
        active_.erase(k);
        // A re-derivation that fails to grow keeps the previous round's tree
        // (mirrors the expansion loop's stop-on-no-progress rule).
        auto it = seeds_->find(k);
        if (it != seeds_->end() && len_of(body) <= it->second->len) body = it->second;
        (*results_)[k] = body;
        return body;
    }

    const OracleNode* eval(const Clause* c, int pos, int depth) {
        spend(depth);
        switch (c->kind) {
            case ClauseKind::Terminal: {
                const Terminal& t = c->term;
                switch (t.kind) {
                    case TerminalKind::Char:
                        if (pos < n_ && input_[pos] == t.lo) return make(c, pos, 1, {});
                        return nullptr;
                    case TerminalKind::Range:
                        if (pos < n_ && input_[pos] >= t.lo && input_[pos] <= t.hi) {
                            return make(c, pos, 1, {});
                        }
                        return nullptr;
                    case TerminalKind::Literal: {
                        int k = t.length();
                        if (pos + k <= n_ && input_.compare(pos, k, t.text) == 0) {
                            return make(c, pos, k, {});
                        }
                        return nullptr;
                    }
                }
                return nullptr;
            }
            case ClauseKind::Epsilon:
                return make(c, pos, 0, {});
            case ClauseKind::Seq: {
                std::vector<const OracleNode*> kids;
                kids.reserve(c->children.size());
                int p = pos;
                for (const Clause* k : c->children) {
                    const OracleNode* m = eval(k, p, depth + 1);
                    if (m == nullptr) return nullptr;
                    kids.push_back(m);
                    p += m->len;
                }
                return make(c, pos, p - pos, std::move(kids));
            }
            case ClauseKind::First: {
                for (const Clause* k : c->children) {
                    const OracleNode* m = eval(k, pos, depth + 1);
                    if (m != nullptr) return make(c, pos, m->len, {m});
                }
                return nullptr;
            }
            case ClauseKind::OneOrMore: {
                std::vector<const OracleNode*> kids;
                int p = pos;
                while (true) {
                    const OracleNode* m = eval(c->children[0], p, depth + 1);
                    if (m == nullptr) break;
                    kids.push_back(m);
                    p += m->len;
                    if (m->len == 0) break;  // zero progress: record once, stop
                }
                if (kids.empty()) return nullptr;
                return make(c, pos, p - pos, std::move(kids));
            }
            case ClauseKind::NotFollowedBy: {
                const OracleNode* m = eval(c->children[0], pos, depth + 1);
                return m == nullptr ? make(c, pos, 0, {}) : nullptr;
            }
            case ClauseKind::RuleRef: {
                const OracleNode* body = rule_body(c->ref_rule, pos, depth + 1);
                if (body == nullptr) return nullptr;
                return make(c, pos, body->len, {body});
            }
            // Derived operators interpreted directly (Table-style semantics),
            // so pre-desugar grammars can be checked too.
            case ClauseKind::Optional: {
                const OracleNode* m = eval(c->children[0], pos, depth + 1);
                if (m != nullptr) return make(c, pos, m->len, {m});
                return make(c, pos, 0, {});
            }
            case ClauseKind::ZeroOrMore: {
                std::vector<const OracleNode*> kids;
                int p = pos;
                while (true) {
                    const OracleNode* m = eval(c->children[0], p, depth + 1);
                    if (m == nullptr) break;
                    kids.push_back(m);
                    p += m->len;
                    if (m->len == 0) break;
                }
                return make(c, pos, p - pos, std::move(kids));
            }
            case ClauseKind::FollowedBy: {
                const OracleNode* m = eval(c->children[0], pos, depth + 1);
                return m != nullptr ? make(c, pos, 0, {}) : nullptr;
            }
            default:
                return nullptr;  // markers never occur in grammars
        }
    }
};

uint64_t digest(const OracleNode* node) {
    if (node == nullptr) return 0;
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(reinterpret_cast<uint64_t>(node->clause));
    mix(static_cast<uint64_t>(node->pos));
    mix(static_cast<uint64_t>(node->len) + 0x9e3779b9u);
    for (const OracleNode* k : node->children) mix(digest(k));
    return h;
}

}  // namespace

OracleResult oracle_match(const Grammar& grammar, std::string_view input, int depth_budget,
                          uint64_t step_budget) {
    OracleResult out;
    std::unordered_map<uint64_t, const OracleNode*> seeds;
    std::unordered_map<uint64_t, uint64_t> prev_digests;
    const OracleNode* root = nullptr;
    uint64_t prev_root_digest = ~0ull;
    const int max_rounds = static_cast<int>(input.size()) + 2;

    try {
        for (int round = 0; round < max_rounds; ++round) {
            out.rounds = round + 1;
            std::unordered_map<uint64_t, const OracleNode*> results;
            Interpreter interp(grammar, input, depth_budget, step_budget, out.nodes);
            root = interp.run_round(seeds, results);

            std::unordered_map<uint64_t, uint64_t> digests;
            digests.reserve(results.size());
            for (const auto& [k, node] : results) digests[k] = digest(node);
            uint64_t root_digest = digest(root);
            if (digests == prev_digests && root_digest == prev_root_digest) break;
            prev_digests = std::move(digests);
            prev_root_digest = root_digest;

            // Next round's seeds: the better of old seed and this round.
            for (const auto& [k, node] : results) {
                auto it = seeds.find(k);
                if (it == seeds.end()) {
                    if (node != nullptr) seeds[k] = node;
                } else if (len_of(node) > len_of(it->second)) {
                    it->second = node;
                }
            }
        }
    } catch (const BudgetExceeded&) {
        out.status = OracleStatus::BudgetExceeded;
        out.root = nullptr;
        return out;
    }

    out.status = root != nullptr ? OracleStatus::Matched : OracleStatus::Mismatched;
    out.root = root;
    return out;
}

std::string oracle_shape(const OracleNode* node) {
    if (node == nullptr) return "<mismatch>";
    std::string s = "(";
    switch (node->clause->kind) {
        case ClauseKind::Seq: s += "seq"; break;
        case ClauseKind::First: s += "first"; break;
        case ClauseKind::OneOrMore: s += "rep"; break;
        case ClauseKind::NotFollowedBy: s += "not"; break;
        case ClauseKind::Terminal: s += "term:" + terminal_pattern(node->clause->term); break;
        case ClauseKind::Epsilon: s += "eps"; break;
        case ClauseKind::RuleRef: s += "ref:" + node->clause->ref_name; break;
        case ClauseKind::Optional: s += "opt"; break;
        case ClauseKind::ZeroOrMore: s += "star"; break;
        case ClauseKind::FollowedBy: s += "and"; break;
        default: s += "?"; break;
    }
    s += " " + std::to_string(node->pos) + " " + std::to_string(node->len);
    for (const OracleNode* k : node->children) {
        s += " " + oracle_shape(k);
    }
    s += ")";
    return s;
}

}  // namespace peglr
