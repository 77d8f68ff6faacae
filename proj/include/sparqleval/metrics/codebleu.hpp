#pragma once
// CodeBLEU adapted to SPARQL: cumulative BLEU-4 over tokens, a keyword-
// weighted n-gram variant, a depth-bounded AST subtree match with anonymized
// variables, and an F1 over variable def-use edges (variable positions
// co-occurring in one triple pattern). An unparseable prediction zeroes the
// two syntax-aware components and keeps the token components.

#include "sparqleval/metrics/lexical.hpp"
#include "sparqleval/sparql/normalize.hpp"

#include <set>
#include <sstream>

namespace sparqleval::lexical {

struct CodeBleuBreakdown {
    double ngram = 0;
    double weighted_ngram = 0;
    double ast_match = 0;
    double dataflow = 0;
    double combined = 0;
    double weights[4] = {0.25, 0.25, 0.25, 0.25};
    bool pred_parse_error = false;
    bool gold_parse_error = false;
};

struct CodeBleuParams {
    double weights[4] = {0.25, 0.25, 0.25, 0.25}; // ngram, weighted, ast, dataflow
    double keyword_weight = 5.0;
    int ast_depth = 3;
    int max_ngram = 4;
    sparql::PrefixMap prefixes = sparql::builtin_prefix_map();
};

namespace cbdetail {

inline double weighted_precision(const TokenSequence& pred, const TokenSequence& gold, int n,
                                 double keyword_weight) {
    struct GramInfo {
        long long pred_count = 0;
        long long gold_count = 0;
        double weight = 1.0;
    };
    std::unordered_map<std::string, GramInfo> grams;
    auto collect = [&](const TokenSequence& seq, bool is_pred) {
        if (static_cast<int>(seq.size()) < n)
            return;
        for (std::size_t i = 0; i + n <= seq.size(); ++i) {
            std::string key;
            bool has_keyword = false;
            for (int j = 0; j < n; ++j) {
                if (j)
                    key += '\x1f';
                key += seq[i + j].lexeme;
                has_keyword |= seq[i + j].kind == TokenKind::keyword;
            }
            auto& info = grams[key];
            info.weight = has_keyword ? keyword_weight : 1.0;
            if (is_pred)
                ++info.pred_count;
            else
                ++info.gold_count;
        }
    };
    collect(pred, true);
    collect(gold, false);
    double num = 0, den = 0;
    bool gold_has = false;
    for (const auto& [key, info] : grams) {
        gold_has |= info.gold_count > 0;
        den += info.weight * static_cast<double>(info.pred_count);
        num += info.weight * static_cast<double>(std::min(info.pred_count, info.gold_count));
    }
    if (den == 0)
        return gold_has ? 0.0 : 1.0;
    return num / den;
}

inline double weighted_bleu(const TokenSequence& pred, const TokenSequence& gold, int k,
                            double keyword_weight) {
    if (pred.empty())
        return gold.empty() ? 1.0 : 0.0;
    if (gold.empty())
        return 0.0;
    double log_sum = 0;
    for (int n = 1; n <= k; ++n) {
        double p = weighted_precision(pred, gold, n, keyword_weight);
        if (p == 0)
            return 0.0;
        log_sum += std::log(p);
    }
    return brevity_penalty(pred.size(), gold.size()) * std::exp(log_sum / k);
}

// ------------------------------------------------ labeled subtree view ----

struct LTree {
    std::string label;
    std::vector<LTree> children;
};

inline std::string term_iri_label(const sparql::TermIri& t) {
    if (const auto* iri = std::get_if<sparql::Iri>(&t))
        return "iri:" + iri->value;
    const auto& pn = std::get<sparql::PrefixedName>(t);
    return "pn:" + pn.prefix + ":" + pn.local;
}

inline LTree term_tree(const sparql::Term& t) {
    using namespace sparql;
    if (std::holds_alternative<Variable>(t))
        return {"?", {}};
    if (std::holds_alternative<BlankNode>(t))
        return {"_:", {}};
    if (const auto* iri = std::get_if<Iri>(&t))
        return {"iri:" + iri->value, {}};
    if (const auto* pn = std::get_if<PrefixedName>(&t))
        return {"pn:" + pn->prefix + ":" + pn->local, {}};
    if (const auto* lit = std::get_if<Literal>(&t)) {
        std::string label = "lit:" + lit->lexical;
        if (!lit->lang.empty())
            label += "@" + lit->lang;
        if (lit->datatype)
            label += "^^" + term_iri_label(*lit->datatype);
        return {label, {}};
    }
    if (const auto* num = std::get_if<NumericLiteral>(&t))
        return {"num:" + num->lexeme, {}};
    return {std::get<BooleanLiteral>(t).value ? "true" : "false", {}};
}

inline LTree path_tree(const sparql::Path& p) {
    using sparql::Path;
    switch (p.kind) {
    case Path::Kind::link:
        return {p.is_a ? "a" : term_iri_label(p.iri), {}};
    case Path::Kind::sequence: {
        LTree t{"path:/", {}};
        for (const auto& c : p.children)
            t.children.push_back(path_tree(c));
        return t;
    }
    case Path::Kind::alternative: {
        LTree t{"path:|", {}};
        for (const auto& c : p.children)
            t.children.push_back(path_tree(c));
        return t;
    }
    case Path::Kind::inverse: {
        return {"path:^", {path_tree(p.children.front())}};
    }
    case Path::Kind::zero_or_more:
        return {"path:*", {path_tree(p.children.front())}};
    case Path::Kind::one_or_more:
        return {"path:+", {path_tree(p.children.front())}};
    }
    return {"path", {}};
}

inline LTree group_tree(const sparql::GroupPattern& g);
inline LTree select_core_tree(const sparql::SelectCore& s);

inline LTree expr_tree(const sparql::Expr& e) {
    using sparql::Expr;
    switch (e.kind) {
    case Expr::Kind::var:
        return {"?", {}};
    case Expr::Kind::term:
        return term_tree(e.term);
    case Expr::Kind::star:
        return {"*", {}};
    case Expr::Kind::unary:
    case Expr::Kind::binary: {
        LTree t{"op:" + e.op, {}};
        for (const auto& a : e.args)
            t.children.push_back(expr_tree(a));
        return t;
    }
    case Expr::Kind::in_list: {
        LTree t{e.negated ? "not-in" : "in", {}};
        for (const auto& a : e.args)
            t.children.push_back(expr_tree(a));
        return t;
    }
    case Expr::Kind::exists:
        return {e.negated ? "not-exists" : "exists", {group_tree(e.exists_body)}};
    case Expr::Kind::call: {
        std::string label =
            e.function_iri ? "call:" + term_iri_label(*e.function_iri) : "call:" + e.op;
        if (e.distinct)
            label += ":distinct";
        LTree t{label, {}};
        for (const auto& a : e.args)
            t.children.push_back(expr_tree(a));
        return t;
    }
    }
    return {"expr", {}};
}

inline LTree triple_tree(const sparql::TriplePattern& tp) {
    LTree t{"triple", {}};
    t.children.push_back(term_tree(tp.subject));
    if (std::holds_alternative<sparql::Variable>(tp.predicate))
        t.children.push_back({"?", {}});
    else
        t.children.push_back(path_tree(std::get<sparql::Path>(tp.predicate)));
    t.children.push_back(term_tree(tp.object));
    return t;
}

inline LTree pattern_tree(const sparql::PatternNode& p) {
    using sparql::PatternNode;
    switch (p.kind) {
    case PatternNode::Kind::triples: {
        LTree t{"triples", {}};
        for (const auto& tp : p.triples)
            t.children.push_back(triple_tree(tp));
        return t;
    }
    case PatternNode::Kind::group:
        return {"group", {group_tree(p.group)}};
    case PatternNode::Kind::optional:
        return {"optional", {group_tree(p.group)}};
    case PatternNode::Kind::minus:
        return {"minus", {group_tree(p.group)}};
    case PatternNode::Kind::union_: {
        LTree t{"union", {}};
        for (const auto& b : p.branches)
            t.children.push_back(group_tree(b));
        return t;
    }
    case PatternNode::Kind::filter:
        return {"filter", {expr_tree(p.expr)}};
    case PatternNode::Kind::bind:
        return {"bind", {expr_tree(p.expr), {"?", {}}}};
    case PatternNode::Kind::values: {
        LTree t{"values", {}};
        for (std::size_t i = 0; i < p.values_vars.size(); ++i)
            t.children.push_back({"?", {}});
        for (const auto& row : p.values_rows) {
            LTree r{"row", {}};
            for (const auto& cell : row)
                r.children.push_back(cell ? term_tree(*cell) : LTree{"undef", {}});
            t.children.push_back(std::move(r));
        }
        return t;
    }
    case PatternNode::Kind::subselect:
        return {"subselect", {select_core_tree(p.subselect)}};
    }
    return {"pattern", {}};
}

inline LTree group_tree(const sparql::GroupPattern& g) {
    LTree t{"group-pattern", {}};
    for (const auto& c : g.children)
        t.children.push_back(pattern_tree(c));
    return t;
}

inline LTree select_core_tree(const sparql::SelectCore& s) {
    LTree t{"select-core", {}};
    LTree proj{"proj", {}};
    if (s.projection.distinct)
        proj.label += ":distinct";
    if (s.projection.reduced)
        proj.label += ":reduced";
    if (s.projection.star) {
        proj.children.push_back({"*", {}});
    } else {
        for (const auto& item : s.projection.items) {
            if (item.expr)
                proj.children.push_back({"as", {expr_tree(*item.expr), {"?", {}}}});
            else
                proj.children.push_back({"?", {}});
        }
    }
    t.children.push_back(std::move(proj));
    t.children.push_back(group_tree(s.where));
    const auto& m = s.modifiers;
    if (!m.group_by.empty()) {
        LTree g{"groupby", {}};
        for (const auto& item : m.group_by) {
            if (item.as)
                g.children.push_back({"as", {expr_tree(item.expr), {"?", {}}}});
            else
                g.children.push_back(expr_tree(item.expr));
        }
        t.children.push_back(std::move(g));
    }
    if (!m.having.empty()) {
        LTree h{"having", {}};
        for (const auto& e : m.having)
            h.children.push_back(expr_tree(e));
        t.children.push_back(std::move(h));
    }
    if (!m.order_by.empty()) {
        LTree o{"orderby", {}};
        for (const auto& item : m.order_by) {
            const char* dir = item.direction == sparql::OrderItem::Direction::asc    ? "asc"
                              : item.direction == sparql::OrderItem::Direction::desc ? "desc"
                                                                                     : "plain";
            o.children.push_back({dir, {expr_tree(item.expr)}});
        }
        t.children.push_back(std::move(o));
    }
    if (m.limit)
        t.children.push_back({"limit:" + std::to_string(*m.limit), {}});
    if (m.offset)
        t.children.push_back({"offset:" + std::to_string(*m.offset), {}});
    return t;
}

inline LTree query_tree(const sparql::QueryAst& q) {
    using Form = sparql::QueryAst::Form;
    const char* form = q.form == Form::select      ? "select"
                       : q.form == Form::ask       ? "ask"
                       : q.form == Form::construct ? "construct"
                                                   : "describe";
    LTree t{std::string("query:") + form, {}};
    if (q.form == Form::construct) {
        LTree tmpl{"template", {}};
        for (const auto& tp : q.construct_template)
            tmpl.children.push_back(triple_tree(tp));
        t.children.push_back(std::move(tmpl));
    }
    if (q.form == Form::describe) {
        LTree d{"describe-terms", {}};
        for (const auto& term : q.describe_terms)
            d.children.push_back(term_tree(term));
        t.children.push_back(std::move(d));
    }
    t.children.push_back(select_core_tree(q.select));
    return t;
}

// Depth-bounded serialization: each node contributes one string rendering
// its subtree truncated at `depth` levels.
inline void render(const LTree& node, int depth, std::string& out) {
    out += node.label;
    if (depth <= 1 || node.children.empty())
        return;
    out += '(';
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i)
            out += ',';
        render(node.children[i], depth - 1, out);
    }
    out += ')';
}

inline void collect_subtrees(const LTree& node, int depth,
                             std::unordered_map<std::string, long long>& counts,
                             long long& total) {
    std::string key;
    render(node, depth, key);
    ++counts[key];
    ++total;
    for (const auto& c : node.children)
        collect_subtrees(c, depth, counts, total);
}

inline double subtree_match(const sparql::QueryAst& pred, const sparql::QueryAst& gold,
                            int depth) {
    std::unordered_map<std::string, long long> pc, gc;
    long long ptotal = 0, gtotal = 0;
    collect_subtrees(query_tree(pred), depth, pc, ptotal);
    collect_subtrees(query_tree(gold), depth, gc, gtotal);
    if (gtotal == 0)
        return 0;
    long long matched = 0;
    for (const auto& [key, count] : gc) {
        auto it = pc.find(key);
        if (it != pc.end())
            matched += std::min(count, it->second);
    }
    return static_cast<double>(matched) / static_cast<double>(gtotal);
}

// Variable def-use edges: one edge per pair of variable positions inside a
// single triple pattern, with canonically renamed variables and positions
// labeled s/p/o.
inline std::set<std::string> dataflow_edges(sparql::QueryAst ast) {
    sparql::normalize_variables(ast);
    std::set<std::string> edges;
    sparql::walk_triples(ast, [&](const sparql::TriplePattern& tp) {
        std::vector<std::string> endpoints;
        if (const auto* v = std::get_if<sparql::Variable>(&tp.subject))
            endpoints.push_back(v->name + "@s");
        if (const auto* v = std::get_if<sparql::Variable>(&tp.predicate))
            endpoints.push_back(v->name + "@p");
        if (const auto* v = std::get_if<sparql::Variable>(&tp.object))
            endpoints.push_back(v->name + "@o");
        for (std::size_t i = 0; i < endpoints.size(); ++i)
            for (std::size_t j = i + 1; j < endpoints.size(); ++j) {
                std::string a = endpoints[i], b = endpoints[j];
                if (b < a)
                    std::swap(a, b);
                edges.insert(a + "|" + b);
            }
    });
    return edges;
}

inline double set_f1(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty())
        return 1;
    if (a.empty() || b.empty())
        return 0;
    std::size_t inter = 0;
    for (const auto& x : a)
        inter += b.count(x);
    return 2.0 * static_cast<double>(inter) / static_cast<double>(a.size() + b.size());
}

} // namespace cbdetail

inline CodeBleuBreakdown codebleu(const std::string& pred, const std::string& gold,
                                  const CodeBleuParams& params = {}) {
    CodeBleuBreakdown out;
    double wsum = params.weights[0] + params.weights[1] + params.weights[2] + params.weights[3];
    for (int i = 0; i < 4; ++i)
        out.weights[i] = wsum > 0 ? params.weights[i] / wsum : 0.25;

    TokenSequence ptoks, gtoks;
    try {
        ptoks = sparql::tokenize(pred);
    } catch (const sparql::LexicalError&) {
        out.pred_parse_error = true;
    }
    try {
        gtoks = sparql::tokenize(gold);
    } catch (const sparql::LexicalError&) {
        out.gold_parse_error = true;
    }
    out.ngram = bleu(ptoks, gtoks, params.max_ngram, BleuMode::cumulative);
    out.weighted_ngram = cbdetail::weighted_bleu(ptoks, gtoks, params.max_ngram, params.keyword_weight);

    std::optional<sparql::QueryAst> past, gast;
    try {
        past = sparql::expand_prefixes(sparql::parse(pred), params.prefixes);
    } catch (const sparql::ParseError&) {
        out.pred_parse_error = true;
    } catch (const sparql::LexicalError&) {
        out.pred_parse_error = true;
    }
    try {
        gast = sparql::expand_prefixes(sparql::parse(gold), params.prefixes);
    } catch (const sparql::ParseError&) {
        out.gold_parse_error = true;
    } catch (const sparql::LexicalError&) {
        out.gold_parse_error = true;
    }
    if (past && gast) {
        out.ast_match = cbdetail::subtree_match(*past, *gast, params.ast_depth);
        out.dataflow = cbdetail::set_f1(cbdetail::dataflow_edges(std::move(*past)),
                                        cbdetail::dataflow_edges(std::move(*gast)));
    }
    out.combined = out.weights[0] * out.ngram + out.weights[1] * out.weighted_ngram +
                   out.weights[2] * out.ast_match + out.weights[3] * out.dataflow;
    return out;
}

} // namespace sparqleval::lexical
