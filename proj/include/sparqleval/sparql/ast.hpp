#pragma once
// Abstract syntax tree for the supported SPARQL subset, plus the document-
// order walks used by variable normalization and IRI extraction.
//
// All nodes are plain value types with structural equality. Recursive
// containment goes through std::vector, which accepts incomplete element
// types, so the whole tree is copyable.

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sparqleval::sparql {

// ---------------------------------------------------------------- terms ---

struct Iri {
    std::string value; // without angle brackets
    bool operator==(const Iri&) const = default;
};

struct PrefixedName {
    std::string prefix; // may be empty (default prefix)
    std::string local;
    bool operator==(const PrefixedName&) const = default;
};

struct Variable {
    std::string name; // without ? / $ sigil
    bool operator==(const Variable&) const = default;
};

struct BlankNode {
    std::string label;
    bool anonymous = false; // came from "[]"
    bool operator==(const BlankNode&) const = default;
};

using TermIri = std::variant<Iri, PrefixedName>;

struct Literal {
    std::string lexical; // decoded text (escape sequences resolved)
    std::string lang;    // without '@'
    std::optional<TermIri> datatype;
    bool operator==(const Literal&) const = default;
};

struct NumericLiteral {
    std::string lexeme; // as written, sign included
    bool operator==(const NumericLiteral&) const = default;
};

struct BooleanLiteral {
    bool value = false;
    bool operator==(const BooleanLiteral&) const = default;
};

using Term =
    std::variant<Iri, PrefixedName, Variable, BlankNode, Literal, NumericLiteral, BooleanLiteral>;

// ---------------------------------------------------------------- paths ---

struct Path {
    enum class Kind { link, inverse, sequence, alternative, zero_or_more, one_or_more };
    Kind kind = Kind::link;
    TermIri iri;       // link only
    bool is_a = false; // link was the keyword 'a'
    std::vector<Path> children;
    bool operator==(const Path&) const = default;
};

using Verb = std::variant<Variable, Path>;

struct TriplePattern {
    Term subject;
    Verb predicate;
    Term object;
    bool operator==(const TriplePattern&) const = default;
};

// ------------------------------------------------------------- patterns ---

struct PatternNode;

struct GroupPattern {
    std::vector<PatternNode> children;
    bool operator==(const GroupPattern&) const;
};

// ---------------------------------------------------------- expressions ---

struct Expr {
    enum class Kind {
        var,       // term holds Variable
        term,      // literal / iri / number / boolean
        call,      // built-in or iri function; op = uppercase name when built-in
        unary,     // op ∈ {!, +, -}
        binary,    // op ∈ {||, &&, =, !=, <, >, <=, >=, +, -, *, /}
        in_list,   // args[0] IN args[1..]; negated for NOT IN
        exists,    // exists_body; negated for NOT EXISTS
        star,      // the '*' inside COUNT(*)
    };
    Kind kind = Kind::term;
    std::string op;
    Term term;
    std::vector<Expr> args;
    bool negated = false;
    bool distinct = false;                  // aggregate DISTINCT
    std::optional<std::string> separator;   // GROUP_CONCAT separator literal (raw)
    std::optional<TermIri> function_iri;    // call through an IRI
    GroupPattern exists_body;
    bool operator==(const Expr&) const = default;
};

struct GroupByItem {
    Expr expr;
    std::optional<Variable> as; // (expr AS ?v)
    bool operator==(const GroupByItem&) const = default;
};

struct OrderItem {
    enum class Direction { none, asc, desc };
    Direction direction = Direction::none;
    Expr expr;
    bool operator==(const OrderItem&) const = default;
};

struct SolutionModifiers {
    std::vector<GroupByItem> group_by;
    std::vector<Expr> having;
    std::vector<OrderItem> order_by;
    std::optional<long long> limit;
    std::optional<long long> offset;
    bool operator==(const SolutionModifiers&) const = default;
};

struct Projection {
    struct Item {
        Variable var;
        std::optional<Expr> expr; // (expr AS ?v)
        bool operator==(const Item&) const = default;
    };
    bool star = false;
    std::vector<Item> items;
    bool distinct = false;
    bool reduced = false;
    bool operator==(const Projection&) const = default;
};

struct SelectCore {
    Projection projection;
    GroupPattern where;
    SolutionModifiers modifiers;
    bool operator==(const SelectCore&) const = default;
};

struct PatternNode {
    enum class Kind { triples, group, optional, union_, minus, filter, bind, values, subselect };
    Kind kind = Kind::triples;
    std::vector<TriplePattern> triples;  // triples
    GroupPattern group;                  // group / optional / minus body
    std::vector<GroupPattern> branches;  // union
    Expr expr;                           // filter / bind
    Variable bind_var;                   // bind target
    std::vector<Variable> values_vars;
    std::vector<std::vector<std::optional<Term>>> values_rows; // nullopt = UNDEF
    SelectCore subselect;
    bool operator==(const PatternNode&) const = default;
};

inline bool GroupPattern::operator==(const GroupPattern& other) const {
    return children == other.children;
}

// ---------------------------------------------------------------- query ---

struct QueryAst {
    enum class Form { select, ask, construct, describe };
    Form form = Form::select;
    std::vector<std::pair<std::string, std::string>> prefixes; // declaration order
    std::optional<std::string> base;
    SelectCore select;                            // select / ask
    std::vector<TriplePattern> construct_template; // construct
    std::vector<Term> describe_terms;              // describe (empty = *)
    bool prefixes_expanded = false;                // bookkeeping, not structure

    bool operator==(const QueryAst& o) const {
        return form == o.form && prefixes == o.prefixes && base == o.base && select == o.select &&
               construct_template == o.construct_template && describe_terms == o.describe_terms;
    }
};

// ------------------------------------------------------ document walks ----
//
// walk_names visits every Variable and BlankNode slot in left-to-right,
// depth-first document order (projection before pattern, template before
// WHERE). Variable renaming and first-occurrence indexing build on it.

namespace walkdetail {

template <class VarFn, class BlankFn> struct NameWalker {
    VarFn& on_var;
    BlankFn& on_blank;

    void term(Term& t) {
        if (auto* v = std::get_if<Variable>(&t))
            on_var(*v);
        else if (auto* b = std::get_if<BlankNode>(&t))
            on_blank(*b);
    }
    void triple(TriplePattern& tp) {
        term(tp.subject);
        if (auto* v = std::get_if<Variable>(&tp.predicate))
            on_var(*v);
        term(tp.object);
    }
    void expr(Expr& e) {
        if (e.kind == Expr::Kind::var)
            term(e.term);
        for (auto& a : e.args)
            expr(a);
        if (e.kind == Expr::Kind::exists)
            group(e.exists_body);
    }
    void pattern(PatternNode& p) {
        switch (p.kind) {
        case PatternNode::Kind::triples:
            for (auto& t : p.triples)
                triple(t);
            break;
        case PatternNode::Kind::group:
        case PatternNode::Kind::optional:
        case PatternNode::Kind::minus:
            group(p.group);
            break;
        case PatternNode::Kind::union_:
            for (auto& b : p.branches)
                group(b);
            break;
        case PatternNode::Kind::filter:
            expr(p.expr);
            break;
        case PatternNode::Kind::bind:
            expr(p.expr);
            on_var(p.bind_var);
            break;
        case PatternNode::Kind::values:
            for (auto& v : p.values_vars)
                on_var(v);
            break;
        case PatternNode::Kind::subselect:
            select_core(p.subselect);
            break;
        }
    }
    void group(GroupPattern& g) {
        for (auto& c : g.children)
            pattern(c);
    }
    void select_core(SelectCore& s) {
        for (auto& item : s.projection.items) {
            if (item.expr)
                expr(*item.expr);
            on_var(item.var);
        }
        group(s.where);
        for (auto& g : s.modifiers.group_by) {
            expr(g.expr);
            if (g.as)
                on_var(*g.as);
        }
        for (auto& h : s.modifiers.having)
            expr(h);
        for (auto& o : s.modifiers.order_by)
            expr(o.expr);
    }
    void query(QueryAst& q) {
        if (q.form == QueryAst::Form::construct)
            for (auto& t : q.construct_template)
                triple(t);
        if (q.form == QueryAst::Form::describe)
            for (auto& t : q.describe_terms)
                term(t);
        select_core(q.select);
    }
};

} // namespace walkdetail

template <class VarFn, class BlankFn>
void walk_names(QueryAst& ast, VarFn on_var, BlankFn on_blank) {
    walkdetail::NameWalker<VarFn, BlankFn> w{on_var, on_blank};
    w.query(ast);
}

// walk_iris visits every Iri in the query; is_datatype marks IRIs that only
// tag a literal's datatype.
namespace walkdetail {

template <class Fn> struct IriWalker {
    Fn& fn;

    void term_iri(const TermIri& t, bool is_datatype) {
        if (const auto* iri = std::get_if<Iri>(&t))
            fn(*iri, is_datatype);
    }
    void term(const Term& t) {
        if (const auto* iri = std::get_if<Iri>(&t))
            fn(*iri, false);
        else if (const auto* lit = std::get_if<Literal>(&t)) {
            if (lit->datatype)
                term_iri(*lit->datatype, true);
        }
    }
    void path(const Path& p) {
        if (p.kind == Path::Kind::link) {
            if (!p.is_a)
                term_iri(p.iri, false);
        } else {
            for (const auto& c : p.children)
                path(c);
        }
    }
    void triple(const TriplePattern& tp) {
        term(tp.subject);
        if (const auto* pp = std::get_if<Path>(&tp.predicate))
            path(*pp);
        term(tp.object);
    }
    void expr(const Expr& e) {
        if (e.kind == Expr::Kind::term)
            term(e.term);
        if (e.function_iri)
            term_iri(*e.function_iri, false);
        for (const auto& a : e.args)
            expr(a);
        if (e.kind == Expr::Kind::exists)
            group(e.exists_body);
    }
    void pattern(const PatternNode& p) {
        switch (p.kind) {
        case PatternNode::Kind::triples:
            for (const auto& t : p.triples)
                triple(t);
            break;
        case PatternNode::Kind::group:
        case PatternNode::Kind::optional:
        case PatternNode::Kind::minus:
            group(p.group);
            break;
        case PatternNode::Kind::union_:
            for (const auto& b : p.branches)
                group(b);
            break;
        case PatternNode::Kind::filter:
        case PatternNode::Kind::bind:
            expr(p.expr);
            break;
        case PatternNode::Kind::values:
            for (const auto& row : p.values_rows)
                for (const auto& cell : row)
                    if (cell)
                        term(*cell);
            break;
        case PatternNode::Kind::subselect:
            select_core(p.subselect);
            break;
        }
    }
    void group(const GroupPattern& g) {
        for (const auto& c : g.children)
            pattern(c);
    }
    void select_core(const SelectCore& s) {
        for (const auto& item : s.projection.items)
            if (item.expr)
                expr(*item.expr);
        group(s.where);
        for (const auto& g : s.modifiers.group_by)
            expr(g.expr);
        for (const auto& h : s.modifiers.having)
            expr(h);
        for (const auto& o : s.modifiers.order_by)
            expr(o.expr);
    }
    void query(const QueryAst& q) {
        if (q.form == QueryAst::Form::construct)
            for (const auto& t : q.construct_template)
                triple(t);
        if (q.form == QueryAst::Form::describe)
            for (const auto& t : q.describe_terms)
                term(t);
        select_core(q.select);
    }
};

} // namespace walkdetail

template <class Fn> void walk_iris(const QueryAst& ast, Fn fn) {
    walkdetail::IriWalker<Fn> w{fn};
    w.query(ast);
}

// Visits every triple pattern in the query, including nested groups,
// subselects and EXISTS bodies, in document order.
namespace walkdetail {

template <class Fn> struct TripleWalker {
    Fn& fn;
    void expr(const Expr& e) {
        for (const auto& a : e.args)
            expr(a);
        if (e.kind == Expr::Kind::exists)
            group(e.exists_body);
    }
    void pattern(const PatternNode& p) {
        switch (p.kind) {
        case PatternNode::Kind::triples:
            for (const auto& t : p.triples)
                fn(t);
            break;
        case PatternNode::Kind::group:
        case PatternNode::Kind::optional:
        case PatternNode::Kind::minus:
            group(p.group);
            break;
        case PatternNode::Kind::union_:
            for (const auto& b : p.branches)
                group(b);
            break;
        case PatternNode::Kind::filter:
        case PatternNode::Kind::bind:
            expr(p.expr);
            break;
        case PatternNode::Kind::values:
            break;
        case PatternNode::Kind::subselect:
            group(p.subselect.where);
            break;
        }
    }
    void group(const GroupPattern& g) {
        for (const auto& c : g.children)
            pattern(c);
    }
};

} // namespace walkdetail

template <class Fn> void walk_triples(const QueryAst& ast, Fn fn) {
    walkdetail::TripleWalker<Fn> w{fn};
    if (ast.form == QueryAst::Form::construct)
        for (const auto& t : ast.construct_template)
            fn(t);
    w.group(ast.select.where);
}

} // namespace sparqleval::sparql
