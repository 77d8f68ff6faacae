#pragma once
// Canonical serializer: emits a deterministic token stream (single spaces,
// uppercase keywords, fully parenthesized expressions, LIMIT before OFFSET)
// so that structurally equal ASTs produce byte-identical text. Triple and
// pattern order is preserved as parsed; nothing is reordered.

#include "sparqleval/sparql/ast.hpp"

#include <string>
#include <vector>

namespace sparqleval::sparql {

namespace serdetail {

struct Emitter {
    std::vector<std::string> out;

    void put(std::string tok) { out.push_back(std::move(tok)); }

    static std::string encode_literal_body(const std::string& text) {
        std::string enc;
        enc.reserve(text.size() + 2);
        for (char c : text) {
            switch (c) {
            case '\\': enc += "\\\\"; break;
            case '"': enc += "\\\""; break;
            case '\n': enc += "\\n"; break;
            case '\r': enc += "\\r"; break;
            case '\t': enc += "\\t"; break;
            default: enc += c;
            }
        }
        return enc;
    }

    static std::string term_iri_text(const TermIri& t) {
        if (const auto* iri = std::get_if<Iri>(&t))
            return "<" + iri->value + ">";
        const auto& pn = std::get<PrefixedName>(t);
        return pn.prefix + ":" + pn.local;
    }

    void term(const Term& t) {
        if (const auto* iri = std::get_if<Iri>(&t)) {
            put("<" + iri->value + ">");
        } else if (const auto* pn = std::get_if<PrefixedName>(&t)) {
            put(pn->prefix + ":" + pn->local);
        } else if (const auto* v = std::get_if<Variable>(&t)) {
            put("?" + v->name);
        } else if (const auto* b = std::get_if<BlankNode>(&t)) {
            if (b->anonymous)
                put("[]");
            else
                put("_:" + b->label);
        } else if (const auto* lit = std::get_if<Literal>(&t)) {
            std::string text = "\"" + encode_literal_body(lit->lexical) + "\"";
            if (!lit->lang.empty())
                text += "@" + lit->lang;
            else if (lit->datatype)
                text += "^^" + term_iri_text(*lit->datatype);
            put(std::move(text));
        } else if (const auto* num = std::get_if<NumericLiteral>(&t)) {
            put(num->lexeme);
        } else if (const auto* b2 = std::get_if<BooleanLiteral>(&t)) {
            put(b2->value ? "true" : "false");
        }
    }

    // Path precedence: alternative(0) < sequence(1) < inverse/postfix(2) < link(3).
    static int path_prec(const Path& p) {
        switch (p.kind) {
        case Path::Kind::alternative: return 0;
        case Path::Kind::sequence: return 1;
        case Path::Kind::inverse:
        case Path::Kind::zero_or_more:
        case Path::Kind::one_or_more: return 2;
        case Path::Kind::link: return 3;
        }
        return 3;
    }

    void path(const Path& p, int min_prec = 0) {
        const bool parens = path_prec(p) < min_prec;
        if (parens)
            put("(");
        switch (p.kind) {
        case Path::Kind::link:
            if (p.is_a)
                put("a");
            else
                put(term_iri_text(p.iri));
            break;
        case Path::Kind::sequence:
            for (std::size_t i = 0; i < p.children.size(); ++i) {
                if (i)
                    put("/");
                path(p.children[i], 2);
            }
            break;
        case Path::Kind::alternative:
            for (std::size_t i = 0; i < p.children.size(); ++i) {
                if (i)
                    put("|");
                path(p.children[i], 1);
            }
            break;
        case Path::Kind::inverse:
            put("^");
            path(p.children.front(), 3);
            break;
        case Path::Kind::zero_or_more:
            path(p.children.front(), 3);
            put("*");
            break;
        case Path::Kind::one_or_more:
            path(p.children.front(), 3);
            put("+");
            break;
        }
        if (parens)
            put(")");
    }

    void verb(const Verb& v) {
        if (const auto* var = std::get_if<Variable>(&v))
            put("?" + var->name);
        else
            path(std::get<Path>(v));
    }

    void triples(const std::vector<TriplePattern>& ts) {
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (i)
                put(".");
            term(ts[i].subject);
            verb(ts[i].predicate);
            term(ts[i].object);
        }
    }

    void expr(const Expr& e) {
        switch (e.kind) {
        case Expr::Kind::var:
        case Expr::Kind::term:
            term(e.term);
            break;
        case Expr::Kind::star:
            put("*");
            break;
        case Expr::Kind::unary:
            put("(");
            put(e.op);
            expr(e.args.front());
            put(")");
            break;
        case Expr::Kind::binary:
            put("(");
            expr(e.args[0]);
            put(e.op);
            expr(e.args[1]);
            put(")");
            break;
        case Expr::Kind::in_list:
            put("(");
            expr(e.args[0]);
            if (e.negated)
                put("NOT");
            put("IN");
            put("(");
            for (std::size_t i = 1; i < e.args.size(); ++i) {
                if (i > 1)
                    put(",");
                expr(e.args[i]);
            }
            put(")");
            put(")");
            break;
        case Expr::Kind::exists:
            if (e.negated)
                put("NOT");
            put("EXISTS");
            group(e.exists_body);
            break;
        case Expr::Kind::call:
            if (e.function_iri)
                put(term_iri_text(*e.function_iri));
            else
                put(e.op);
            put("(");
            if (e.distinct)
                put("DISTINCT");
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i)
                    put(",");
                expr(e.args[i]);
            }
            if (e.separator) {
                put(";");
                put("SEPARATOR");
                put("=");
                put(*e.separator);
            }
            put(")");
            break;
        }
    }

    // Binary, unary and IN expressions serialize with their own surrounding
    // parentheses; anything else gets wrapped so it reparses as a constraint.
    void constraint(const Expr& e) {
        switch (e.kind) {
        case Expr::Kind::binary:
        case Expr::Kind::unary:
        case Expr::Kind::in_list:
        case Expr::Kind::call:
        case Expr::Kind::exists:
            expr(e);
            break;
        default:
            put("(");
            expr(e);
            put(")");
        }
    }

    void pattern(const PatternNode& p) {
        switch (p.kind) {
        case PatternNode::Kind::triples:
            triples(p.triples);
            break;
        case PatternNode::Kind::group:
            group(p.group);
            break;
        case PatternNode::Kind::optional:
            put("OPTIONAL");
            group(p.group);
            break;
        case PatternNode::Kind::minus:
            put("MINUS");
            group(p.group);
            break;
        case PatternNode::Kind::union_:
            for (std::size_t i = 0; i < p.branches.size(); ++i) {
                if (i)
                    put("UNION");
                group(p.branches[i]);
            }
            break;
        case PatternNode::Kind::filter:
            put("FILTER");
            constraint(p.expr);
            break;
        case PatternNode::Kind::bind:
            put("BIND");
            put("(");
            expr(p.expr);
            put("AS");
            put("?" + p.bind_var.name);
            put(")");
            break;
        case PatternNode::Kind::values:
            put("VALUES");
            put("(");
            for (const auto& v : p.values_vars)
                put("?" + v.name);
            put(")");
            put("{");
            for (const auto& row : p.values_rows) {
                put("(");
                for (const auto& cell : row) {
                    if (cell)
                        term(*cell);
                    else
                        put("UNDEF");
                }
                put(")");
            }
            put("}");
            break;
        case PatternNode::Kind::subselect:
            put("{");
            select_core(p.subselect);
            put("}");
            break;
        }
    }

    void group(const GroupPattern& g) {
        // a lone subselect child reuses the group's braces
        if (g.children.size() == 1 && g.children[0].kind == PatternNode::Kind::subselect) {
            put("{");
            select_core(g.children[0].subselect);
            put("}");
            return;
        }
        put("{");
        const PatternNode* prev = nullptr;
        for (const auto& c : g.children) {
            if (prev && prev->kind == PatternNode::Kind::triples &&
                c.kind == PatternNode::Kind::triples)
                put(".");
            pattern(c);
            prev = &c;
        }
        put("}");
    }

    void modifiers(const SolutionModifiers& m) {
        if (!m.group_by.empty()) {
            put("GROUP");
            put("BY");
            for (const auto& item : m.group_by) {
                if (!item.as && item.expr.kind == Expr::Kind::var) {
                    expr(item.expr);
                } else if (!item.as && item.expr.kind == Expr::Kind::call) {
                    expr(item.expr);
                } else {
                    put("(");
                    expr(item.expr);
                    if (item.as) {
                        put("AS");
                        put("?" + item.as->name);
                    }
                    put(")");
                }
            }
        }
        if (!m.having.empty()) {
            put("HAVING");
            for (const auto& h : m.having)
                constraint(h);
        }
        if (!m.order_by.empty()) {
            put("ORDER");
            put("BY");
            for (const auto& item : m.order_by) {
                if (item.direction == OrderItem::Direction::asc) {
                    put("ASC");
                    put("(");
                    expr(item.expr);
                    put(")");
                } else if (item.direction == OrderItem::Direction::desc) {
                    put("DESC");
                    put("(");
                    expr(item.expr);
                    put(")");
                } else if (item.expr.kind == Expr::Kind::var ||
                           item.expr.kind == Expr::Kind::call) {
                    expr(item.expr);
                } else {
                    constraint(item.expr);
                }
            }
        }
        if (m.limit) {
            put("LIMIT");
            put(std::to_string(*m.limit));
        }
        if (m.offset) {
            put("OFFSET");
            put(std::to_string(*m.offset));
        }
    }

    void select_core(const SelectCore& s) {
        put("SELECT");
        if (s.projection.distinct)
            put("DISTINCT");
        if (s.projection.reduced)
            put("REDUCED");
        if (s.projection.star) {
            put("*");
        } else {
            for (const auto& item : s.projection.items) {
                if (item.expr) {
                    put("(");
                    expr(*item.expr);
                    put("AS");
                    put("?" + item.var.name);
                    put(")");
                } else {
                    put("?" + item.var.name);
                }
            }
        }
        put("WHERE");
        group(s.where);
        modifiers(s.modifiers);
    }

    void query(const QueryAst& q) {
        for (const auto& [prefix, iri] : q.prefixes) {
            put("PREFIX");
            put(prefix + ":");
            put("<" + iri + ">");
        }
        if (q.base) {
            put("BASE");
            put("<" + *q.base + ">");
        }
        switch (q.form) {
        case QueryAst::Form::select:
            select_core(q.select);
            break;
        case QueryAst::Form::ask:
            put("ASK");
            group(q.select.where);
            modifiers(q.select.modifiers);
            break;
        case QueryAst::Form::construct:
            put("CONSTRUCT");
            put("{");
            triples(q.construct_template);
            put("}");
            put("WHERE");
            group(q.select.where);
            modifiers(q.select.modifiers);
            break;
        case QueryAst::Form::describe:
            put("DESCRIBE");
            if (q.describe_terms.empty()) {
                put("*");
            } else {
                for (const auto& t : q.describe_terms)
                    term(t);
            }
            if (!q.select.where.children.empty()) {
                put("WHERE");
                group(q.select.where);
            }
            modifiers(q.select.modifiers);
            break;
        }
    }
};

} // namespace serdetail

inline std::string serialize(const QueryAst& ast) {
    serdetail::Emitter e;
    e.query(ast);
    std::string out;
    for (std::size_t i = 0; i < e.out.size(); ++i) {
        if (i)
            out += ' ';
        out += e.out[i];
    }
    return out;
}

} // namespace sparqleval::sparql
