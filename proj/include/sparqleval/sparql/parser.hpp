#pragma once
// Recursive-descent SPARQL parser for the subset used by query comparison:
// SELECT and ASK in full (triples, group patterns, OPTIONAL, UNION, MINUS,
// FILTER, BIND, VALUES, subselects, property paths with / | ^ + *), plus
// CONSTRUCT/DESCRIBE reduced to form, template and pattern. Everything else
// fails with an error naming the construct, so callers can fall back to
// token-level comparison.

#include "sparqleval/sparql/ast.hpp"
#include "sparqleval/sparql/token.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace sparqleval::sparql {

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public ParseError {
  public:
    SyntaxError(const std::string& what, std::size_t offset)
        : ParseError(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_ = 0;
};

class UnsupportedConstructError : public ParseError {
  public:
    explicit UnsupportedConstructError(const std::string& construct)
        : ParseError("unsupported construct: " + construct), construct_(construct) {}
    const std::string& construct() const { return construct_; }

  private:
    std::string construct_;
};

namespace detail {

inline const std::unordered_set<std::string>& builtin_call_names() {
    static const std::unordered_set<std::string> names = {
        "STR", "LANG", "LANGMATCHES", "DATATYPE", "BOUND", "IRI", "URI", "BNODE", "RAND",
        "ABS", "CEIL", "FLOOR", "ROUND", "CONCAT", "STRLEN", "UCASE", "LCASE",
        "ENCODE_FOR_URI", "CONTAINS", "STRSTARTS", "STRENDS", "STRBEFORE", "STRAFTER",
        "YEAR", "MONTH", "DAY", "HOURS", "MINUTES", "SECONDS", "TIMEZONE", "TZ", "NOW",
        "UUID", "STRUUID", "MD5", "SHA1", "SHA256", "SHA384", "SHA512", "COALESCE", "IF",
        "STRLANG", "STRDT", "SAMETERM", "ISIRI", "ISURI", "ISBLANK", "ISLITERAL",
        "ISNUMERIC", "REGEX", "SUBSTR", "REPLACE",
    };
    return names;
}

inline const std::unordered_set<std::string>& aggregate_names() {
    static const std::unordered_set<std::string> names = {
        "COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE", "GROUP_CONCAT",
    };
    return names;
}

// Decodes SPARQL string escapes (\t \n \r \b \f \" \' \\ \uXXXX \UXXXXXXXX).
inline std::string decode_escapes(std::string_view raw, std::size_t offset) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '\\') {
            out += raw[i];
            continue;
        }
        if (i + 1 >= raw.size())
            throw SyntaxError("dangling escape in string literal", offset);
        char e = raw[++i];
        switch (e) {
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case '"': out += '"'; break;
        case '\'': out += '\''; break;
        case '\\': out += '\\'; break;
        case 'u':
        case 'U': {
            const std::size_t len = e == 'u' ? 4 : 8;
            if (i + len >= raw.size())
                throw SyntaxError("truncated unicode escape", offset);
            unsigned long cp = 0;
            for (std::size_t k = 1; k <= len; ++k) {
                char h = raw[i + k];
                cp <<= 4;
                if (h >= '0' && h <= '9')
                    cp |= static_cast<unsigned long>(h - '0');
                else if (h >= 'a' && h <= 'f')
                    cp |= static_cast<unsigned long>(h - 'a' + 10);
                else if (h >= 'A' && h <= 'F')
                    cp |= static_cast<unsigned long>(h - 'A' + 10);
                else
                    throw SyntaxError("bad unicode escape", offset);
            }
            i += len;
            // encode UTF-8
            if (cp < 0x80) {
                out += static_cast<char>(cp);
            } else if (cp < 0x800) {
                out += static_cast<char>(0xC0 | (cp >> 6));
                out += static_cast<char>(0x80 | (cp & 0x3F));
            } else if (cp < 0x10000) {
                out += static_cast<char>(0xE0 | (cp >> 12));
                out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (cp & 0x3F));
            } else {
                out += static_cast<char>(0xF0 | (cp >> 18));
                out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
                out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
                out += static_cast<char>(0x80 | (cp & 0x3F));
            }
            break;
        }
        default:
            throw SyntaxError("unknown escape sequence", offset);
        }
    }
    return out;
}

class Parser {
  public:
    explicit Parser(TokenSequence tokens) : toks_(std::move(tokens)) {}

    QueryAst parse_query() {
        QueryAst ast;
        parse_prologue(ast);
        if (at_end())
            throw SyntaxError("expected query form", end_offset());
        if (accept_kw("SELECT")) {
            ast.form = QueryAst::Form::select;
            ast.select = parse_select_rest();
        } else if (accept_kw("ASK")) {
            ast.form = QueryAst::Form::ask;
            accept_kw("WHERE");
            ast.select.where = parse_group_pattern();
            ast.select.modifiers = parse_solution_modifiers();
        } else if (accept_kw("CONSTRUCT")) {
            ast.form = QueryAst::Form::construct;
            expect_punct("{");
            parse_triples_into(ast.construct_template, "}");
            expect_punct("}");
            accept_kw("WHERE");
            ast.select.where = parse_group_pattern();
            ast.select.modifiers = parse_solution_modifiers();
        } else if (accept_kw("DESCRIBE")) {
            ast.form = QueryAst::Form::describe;
            if (!accept_punct("*")) {
                while (!at_end() && starts_var_or_iri())
                    ast.describe_terms.push_back(parse_term());
                if (ast.describe_terms.empty())
                    throw SyntaxError("DESCRIBE needs * or at least one resource", cur_offset());
            }
            if (accept_kw("WHERE") || peek_punct("{"))
                ast.select.where = parse_group_pattern();
            ast.select.modifiers = parse_solution_modifiers();
        } else {
            reject_unsupported_form();
            throw SyntaxError("expected SELECT, ASK, CONSTRUCT or DESCRIBE", cur_offset());
        }
        if (!at_end())
            throw SyntaxError("unexpected trailing input", cur_offset());
        return ast;
    }

  private:
    TokenSequence toks_;
    std::size_t pos_ = 0;
    int anon_counter_ = 0;

    // --- token access -----------------------------------------------------
    bool at_end() const { return pos_ >= toks_.size(); }
    const Token& cur() const { return toks_[pos_]; }
    std::size_t cur_offset() const { return at_end() ? end_offset() : cur().offset; }
    std::size_t end_offset() const { return toks_.empty() ? 0 : toks_.back().offset + toks_.back().lexeme.size(); }

    bool peek_kw(std::string_view kw, std::size_t ahead = 0) const {
        return pos_ + ahead < toks_.size() && toks_[pos_ + ahead].kind == TokenKind::keyword &&
               toks_[pos_ + ahead].lexeme == kw;
    }
    bool peek_punct(std::string_view p, std::size_t ahead = 0) const {
        return pos_ + ahead < toks_.size() &&
               (toks_[pos_ + ahead].kind == TokenKind::punctuation ||
                toks_[pos_ + ahead].kind == TokenKind::path_op) &&
               toks_[pos_ + ahead].lexeme == p;
    }
    bool peek_kind(TokenKind k, std::size_t ahead = 0) const {
        return pos_ + ahead < toks_.size() && toks_[pos_ + ahead].kind == k;
    }
    bool accept_kw(std::string_view kw) {
        if (peek_kw(kw)) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool accept_punct(std::string_view p) {
        if (peek_punct(p)) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect_kw(std::string_view kw) {
        if (!accept_kw(kw))
            throw SyntaxError("expected '" + std::string(kw) + "'", cur_offset());
    }
    void expect_punct(std::string_view p) {
        if (!accept_punct(p))
            throw SyntaxError("expected '" + std::string(p) + "'", cur_offset());
    }
    Token take() {
        if (at_end())
            throw SyntaxError("unexpected end of input", end_offset());
        return toks_[pos_++];
    }

    void reject_unsupported_form() {
        static const char* updates[] = {"LOAD", "CLEAR", "DROP", "CREATE", "INSERT", "DELETE", "WITH"};
        for (const char* u : updates)
            if (peek_kw(u))
                throw UnsupportedConstructError(std::string(u) + " (SPARQL Update)");
    }

    // --- prologue -----------------------------------------------------------
    void parse_prologue(QueryAst& ast) {
        for (;;) {
            if (accept_kw("PREFIX")) {
                Token name = take();
                if (name.kind != TokenKind::prefixed_name || name.lexeme.back() != ':' ||
                    name.lexeme.find(':') != name.lexeme.size() - 1)
                    throw SyntaxError("expected prefix declaration name", name.offset);
                Token iri = take();
                if (iri.kind != TokenKind::iri)
                    throw SyntaxError("expected IRI in prefix declaration", iri.offset);
                ast.prefixes.emplace_back(name.lexeme.substr(0, name.lexeme.size() - 1),
                                          strip_angle(iri.lexeme));
            } else if (accept_kw("BASE")) {
                Token iri = take();
                if (iri.kind != TokenKind::iri)
                    throw SyntaxError("expected IRI in BASE declaration", iri.offset);
                ast.base = strip_angle(iri.lexeme);
            } else {
                return;
            }
        }
    }

    static std::string strip_angle(const std::string& lexeme) {
        return lexeme.substr(1, lexeme.size() - 2);
    }

    // --- select -------------------------------------------------------------
    SelectCore parse_select_rest() {
        SelectCore core;
        if (accept_kw("DISTINCT"))
            core.projection.distinct = true;
        else if (accept_kw("REDUCED"))
            core.projection.reduced = true;
        if (accept_punct("*")) {
            core.projection.star = true;
        } else {
            while (true) {
                if (peek_kind(TokenKind::variable)) {
                    core.projection.items.push_back({parse_variable(), std::nullopt});
                } else if (peek_punct("(")) {
                    ++pos_;
                    Expr e = parse_expression();
                    expect_kw("AS");
                    Variable v = parse_variable();
                    expect_punct(")");
                    core.projection.items.push_back({std::move(v), std::move(e)});
                } else {
                    break;
                }
            }
            if (core.projection.items.empty())
                throw SyntaxError("projection needs * or at least one variable", cur_offset());
        }
        if (peek_kw("FROM"))
            throw UnsupportedConstructError("FROM dataset clause");
        accept_kw("WHERE");
        core.where = parse_group_pattern();
        core.modifiers = parse_solution_modifiers();
        // A trailing VALUES clause folds into the group pattern.
        if (peek_kw("VALUES")) {
            PatternNode values = parse_values();
            core.where.children.push_back(std::move(values));
        }
        return core;
    }

    Variable parse_variable() {
        Token t = take();
        if (t.kind != TokenKind::variable || t.lexeme.rfind("_:", 0) == 0)
            throw SyntaxError("expected variable", t.offset);
        return Variable{t.lexeme.substr(1)};
    }

    // --- patterns -----------------------------------------------------------
    GroupPattern parse_group_pattern() {
        expect_punct("{");
        GroupPattern group;
        while (!peek_punct("}")) {
            if (at_end())
                throw SyntaxError("unterminated group pattern", end_offset());
            if (peek_kw("GRAPH"))
                throw UnsupportedConstructError("GRAPH");
            if (peek_kw("SERVICE"))
                throw UnsupportedConstructError("SERVICE");
            if (peek_kw("SELECT")) {
                PatternNode node;
                node.kind = PatternNode::Kind::subselect;
                expect_kw("SELECT");
                node.subselect = parse_select_rest();
                group.children.push_back(std::move(node));
            } else if (accept_kw("OPTIONAL")) {
                PatternNode node;
                node.kind = PatternNode::Kind::optional;
                node.group = parse_group_pattern();
                group.children.push_back(std::move(node));
            } else if (accept_kw("MINUS")) {
                PatternNode node;
                node.kind = PatternNode::Kind::minus;
                node.group = parse_group_pattern();
                group.children.push_back(std::move(node));
            } else if (accept_kw("FILTER")) {
                PatternNode node;
                node.kind = PatternNode::Kind::filter;
                node.expr = parse_constraint();
                group.children.push_back(std::move(node));
            } else if (accept_kw("BIND")) {
                PatternNode node;
                node.kind = PatternNode::Kind::bind;
                expect_punct("(");
                node.expr = parse_expression();
                expect_kw("AS");
                node.bind_var = parse_variable();
                expect_punct(")");
                group.children.push_back(std::move(node));
            } else if (peek_kw("VALUES")) {
                group.children.push_back(parse_values());
            } else if (peek_punct("{")) {
                std::vector<GroupPattern> branches;
                branches.push_back(parse_group_pattern());
                while (accept_kw("UNION"))
                    branches.push_back(parse_group_pattern());
                PatternNode node;
                if (branches.size() == 1) {
                    // "{ { SELECT ... } }" and "{ SELECT ... }" are the same
                    // subselect; drop the redundant group wrapper.
                    if (branches.front().children.size() == 1 &&
                        branches.front().children[0].kind == PatternNode::Kind::subselect) {
                        node = std::move(branches.front().children[0]);
                    } else {
                        node.kind = PatternNode::Kind::group;
                        node.group = std::move(branches.front());
                    }
                } else {
                    node.kind = PatternNode::Kind::union_;
                    node.branches = std::move(branches);
                }
                group.children.push_back(std::move(node));
            } else if (accept_punct(".")) {
                // stray separator between pattern elements
            } else {
                PatternNode node;
                node.kind = PatternNode::Kind::triples;
                parse_triples_into(node.triples, "}");
                if (node.triples.empty())
                    throw SyntaxError("expected graph pattern", cur_offset());
                // adjacent triple blocks (split by stray separators) merge
                if (!group.children.empty() &&
                    group.children.back().kind == PatternNode::Kind::triples) {
                    auto& prev = group.children.back().triples;
                    prev.insert(prev.end(), std::make_move_iterator(node.triples.begin()),
                                std::make_move_iterator(node.triples.end()));
                } else {
                    group.children.push_back(std::move(node));
                }
            }
        }
        expect_punct("}");
        return group;
    }

    // Parses consecutive triples-same-subject groups separated by '.' until a
    // token that cannot start a subject.
    void parse_triples_into(std::vector<TriplePattern>& out, std::string_view stop) {
        while (!at_end() && !peek_punct(stop) && starts_term()) {
            Term subject = parse_term();
            for (;;) {
                Verb verb = parse_verb();
                for (;;) {
                    Term object = parse_term();
                    out.push_back(TriplePattern{subject, verb, std::move(object)});
                    if (!accept_punct(","))
                        break;
                }
                if (!accept_punct(";"))
                    break;
                if (peek_punct(".") || peek_punct(stop) || at_end())
                    break; // trailing ';'
            }
            if (!accept_punct("."))
                break;
        }
    }

    bool starts_term() const {
        if (at_end())
            return false;
        const Token& t = cur();
        switch (t.kind) {
        case TokenKind::variable:
        case TokenKind::iri:
        case TokenKind::prefixed_name:
        case TokenKind::literal:
        case TokenKind::number:
            return true;
        case TokenKind::punctuation:
            return t.lexeme == "[" || ((t.lexeme == "+" || t.lexeme == "-") && peek_kind(TokenKind::number, 1));
        default:
            return false;
        }
    }

    bool starts_var_or_iri() const {
        return peek_kind(TokenKind::variable) || peek_kind(TokenKind::iri) ||
               peek_kind(TokenKind::prefixed_name);
    }

    Term parse_term() {
        Token t = take();
        switch (t.kind) {
        case TokenKind::variable:
            if (t.lexeme.rfind("_:", 0) == 0)
                return BlankNode{t.lexeme.substr(2), false};
            return Variable{t.lexeme.substr(1)};
        case TokenKind::iri:
            return Iri{strip_angle(t.lexeme)};
        case TokenKind::prefixed_name:
            return split_prefixed(t.lexeme);
        case TokenKind::literal:
            if (t.lexeme == "true" || t.lexeme == "false")
                return BooleanLiteral{t.lexeme == "true"};
            return parse_literal(t);
        case TokenKind::number:
            return NumericLiteral{t.lexeme};
        case TokenKind::punctuation:
            if (t.lexeme == "[") {
                if (accept_punct("]"))
                    return BlankNode{"anon" + std::to_string(anon_counter_++), true};
                throw UnsupportedConstructError("blank node property list");
            }
            if ((t.lexeme == "+" || t.lexeme == "-") && peek_kind(TokenKind::number)) {
                Token num = take();
                return NumericLiteral{t.lexeme + num.lexeme};
            }
            if (t.lexeme == "(")
                throw UnsupportedConstructError("RDF collection");
            break;
        default:
            break;
        }
        throw SyntaxError("expected RDF term, found '" + t.lexeme + "'", t.offset);
    }

    static PrefixedName split_prefixed(const std::string& lexeme) {
        auto colon = lexeme.find(':');
        return PrefixedName{lexeme.substr(0, colon), lexeme.substr(colon + 1)};
    }

    // Splits a literal token lexeme into decoded text, language tag and
    // datatype; also absorbs a whitespace-separated "^^ <iri>" suffix.
    Literal parse_literal(const Token& t) {
        const std::string& lex = t.lexeme;
        const char q = lex[0];
        bool long_form = lex.size() >= 6 && lex[1] == q && lex[2] == q;
        std::size_t body_start = long_form ? 3 : 1;
        std::size_t close = std::string::npos;
        if (long_form) {
            const std::string closer(3, q);
            close = lex.find(closer, body_start);
        } else {
            for (std::size_t i = body_start; i < lex.size(); ++i) {
                if (lex[i] == '\\') {
                    ++i;
                    continue;
                }
                if (lex[i] == q) {
                    close = i;
                    break;
                }
            }
        }
        if (close == std::string::npos)
            throw SyntaxError("malformed string literal", t.offset);
        Literal lit;
        lit.lexical = decode_escapes(std::string_view(lex).substr(body_start, close - body_start), t.offset);
        std::size_t suffix = close + (long_form ? 3 : 1);
        if (suffix < lex.size()) {
            if (lex[suffix] == '@') {
                lit.lang = lex.substr(suffix + 1);
            } else if (lex.compare(suffix, 2, "^^") == 0) {
                std::string dt = lex.substr(suffix + 2);
                if (!dt.empty() && dt.front() == '<')
                    lit.datatype = Iri{dt.substr(1, dt.size() - 2)};
                else
                    lit.datatype = split_prefixed(dt);
            }
        } else if (accept_punct("^^")) {
            Token dt = take();
            if (dt.kind == TokenKind::iri)
                lit.datatype = Iri{strip_angle(dt.lexeme)};
            else if (dt.kind == TokenKind::prefixed_name)
                lit.datatype = split_prefixed(dt.lexeme);
            else
                throw SyntaxError("expected datatype IRI after '^^'", dt.offset);
        }
        return lit;
    }

    // --- property paths ------------------------------------------------------
    Verb parse_verb() {
        if (peek_kind(TokenKind::variable))
            return parse_variable();
        return parse_path_alternative();
    }

    Path parse_path_alternative() {
        Path first = parse_path_sequence();
        if (!peek_punct("|"))
            return first;
        Path alt;
        alt.kind = Path::Kind::alternative;
        alt.children.push_back(std::move(first));
        while (accept_punct("|"))
            alt.children.push_back(parse_path_sequence());
        return alt;
    }

    Path parse_path_sequence() {
        Path first = parse_path_elt();
        if (!peek_punct("/"))
            return first;
        Path seq;
        seq.kind = Path::Kind::sequence;
        seq.children.push_back(std::move(first));
        while (accept_punct("/"))
            seq.children.push_back(parse_path_elt());
        return seq;
    }

    Path parse_path_elt() {
        bool inverse = accept_punct("^");
        Path p = parse_path_primary();
        if (peek_punct("*")) {
            ++pos_;
            Path star;
            star.kind = Path::Kind::zero_or_more;
            star.children.push_back(std::move(p));
            p = std::move(star);
        } else if (peek_punct("+") && !peek_kind(TokenKind::number, 1)) {
            // '+' followed by a number is the sign of the object instead
            ++pos_;
            Path plus;
            plus.kind = Path::Kind::one_or_more;
            plus.children.push_back(std::move(p));
            p = std::move(plus);
        } else if (peek_punct("?")) {
            throw UnsupportedConstructError("path zero-or-one modifier");
        }
        if (inverse) {
            Path inv;
            inv.kind = Path::Kind::inverse;
            inv.children.push_back(std::move(p));
            return inv;
        }
        return p;
    }

    Path parse_path_primary() {
        if (peek_punct("!"))
            throw UnsupportedConstructError("negated property set");
        if (accept_punct("(")) {
            Path inner = parse_path_alternative();
            expect_punct(")");
            return inner;
        }
        Token t = take();
        Path p;
        p.kind = Path::Kind::link;
        if (t.kind == TokenKind::keyword && t.lexeme == "a") {
            p.is_a = true;
            return p;
        }
        if (t.kind == TokenKind::iri) {
            p.iri = Iri{strip_angle(t.lexeme)};
            return p;
        }
        if (t.kind == TokenKind::prefixed_name) {
            p.iri = split_prefixed(t.lexeme);
            return p;
        }
        throw SyntaxError("expected predicate, found '" + t.lexeme + "'", t.offset);
    }

    // --- VALUES ----------------------------------------------------------------
    PatternNode parse_values() {
        expect_kw("VALUES");
        PatternNode node;
        node.kind = PatternNode::Kind::values;
        if (peek_kind(TokenKind::variable)) {
            node.values_vars.push_back(parse_variable());
            expect_punct("{");
            while (!accept_punct("}")) {
                std::vector<std::optional<Term>> row;
                row.push_back(parse_values_cell());
                node.values_rows.push_back(std::move(row));
            }
        } else {
            expect_punct("(");
            while (!accept_punct(")"))
                node.values_vars.push_back(parse_variable());
            expect_punct("{");
            while (!accept_punct("}")) {
                expect_punct("(");
                std::vector<std::optional<Term>> row;
                while (!accept_punct(")"))
                    row.push_back(parse_values_cell());
                if (row.size() != node.values_vars.size())
                    throw SyntaxError("VALUES row width mismatch", cur_offset());
                node.values_rows.push_back(std::move(row));
            }
        }
        return node;
    }

    std::optional<Term> parse_values_cell() {
        if (accept_kw("UNDEF"))
            return std::nullopt;
        if (peek_kind(TokenKind::variable))
            throw SyntaxError("variables are not allowed in VALUES data", cur_offset());
        return parse_term();
    }

    // --- expressions -------------------------------------------------------------
    Expr parse_constraint() {
        if (peek_punct("(")) {
            ++pos_;
            Expr e = parse_expression();
            expect_punct(")");
            return e;
        }
        return parse_primary_expression(); // builtin call, EXISTS, function call
    }

    Expr parse_expression() { return parse_or(); }

    Expr make_binary(std::string op, Expr lhs, Expr rhs) {
        Expr e;
        e.kind = Expr::Kind::binary;
        e.op = std::move(op);
        e.args.push_back(std::move(lhs));
        e.args.push_back(std::move(rhs));
        return e;
    }

    Expr parse_or() {
        Expr lhs = parse_and();
        while (accept_punct("||"))
            lhs = make_binary("||", std::move(lhs), parse_and());
        return lhs;
    }

    Expr parse_and() {
        Expr lhs = parse_relational();
        while (accept_punct("&&"))
            lhs = make_binary("&&", std::move(lhs), parse_relational());
        return lhs;
    }

    Expr parse_relational() {
        Expr lhs = parse_additive();
        static const char* ops[] = {"=", "!=", "<=", ">=", "<", ">"};
        for (const char* op : ops) {
            if (peek_punct(op)) {
                ++pos_;
                return make_binary(op, std::move(lhs), parse_additive());
            }
        }
        bool negated = false;
        if (peek_kw("NOT") && peek_kw("IN", 1)) {
            pos_ += 2;
            negated = true;
        } else if (accept_kw("IN")) {
            negated = false;
        } else {
            return lhs;
        }
        Expr e;
        e.kind = Expr::Kind::in_list;
        e.negated = negated;
        e.args.push_back(std::move(lhs));
        expect_punct("(");
        if (!peek_punct(")")) {
            do {
                e.args.push_back(parse_expression());
            } while (accept_punct(","));
        }
        expect_punct(")");
        return e;
    }

    Expr parse_additive() {
        Expr lhs = parse_multiplicative();
        for (;;) {
            if (accept_punct("+"))
                lhs = make_binary("+", std::move(lhs), parse_multiplicative());
            else if (accept_punct("-"))
                lhs = make_binary("-", std::move(lhs), parse_multiplicative());
            else
                break;
        }
        return lhs;
    }

    Expr parse_multiplicative() {
        Expr lhs = parse_unary();
        for (;;) {
            if (accept_punct("*"))
                lhs = make_binary("*", std::move(lhs), parse_unary());
            else if (accept_punct("/"))
                lhs = make_binary("/", std::move(lhs), parse_unary());
            else
                break;
        }
        return lhs;
    }

    Expr parse_unary() {
        static const char* ops[] = {"!", "+", "-"};
        for (const char* op : ops) {
            if (peek_punct(op)) {
                ++pos_;
                Expr e;
                e.kind = Expr::Kind::unary;
                e.op = op;
                e.args.push_back(parse_unary());
                return e;
            }
        }
        return parse_primary_expression();
    }

    Expr parse_primary_expression() {
        if (accept_punct("(")) {
            Expr inner = parse_expression();
            expect_punct(")");
            return inner;
        }
        if (at_end())
            throw SyntaxError("expected expression", end_offset());
        const Token& t = cur();
        if (t.kind == TokenKind::variable) {
            Expr e;
            e.kind = Expr::Kind::var;
            e.term = parse_term();
            return e;
        }
        if (t.kind == TokenKind::number || t.kind == TokenKind::literal) {
            Expr e;
            e.kind = Expr::Kind::term;
            e.term = parse_term();
            return e;
        }
        if (t.kind == TokenKind::keyword) {
            if (peek_kw("NOT") && peek_kw("EXISTS", 1)) {
                pos_ += 2;
                return parse_exists_body(true);
            }
            if (accept_kw("EXISTS"))
                return parse_exists_body(false);
            if (aggregate_names().count(t.lexeme))
                return parse_aggregate();
            if (builtin_call_names().count(t.lexeme))
                return parse_builtin_call();
            throw SyntaxError("unexpected keyword '" + t.lexeme + "' in expression", t.offset);
        }
        if (t.kind == TokenKind::iri || t.kind == TokenKind::prefixed_name) {
            Term term = parse_term();
            if (accept_punct("(")) { // function call through an IRI
                Expr e;
                e.kind = Expr::Kind::call;
                if (auto* iri = std::get_if<Iri>(&term))
                    e.function_iri = *iri;
                else
                    e.function_iri = std::get<PrefixedName>(term);
                if (!peek_punct(")")) {
                    do {
                        e.args.push_back(parse_expression());
                    } while (accept_punct(","));
                }
                expect_punct(")");
                return e;
            }
            Expr e;
            e.kind = Expr::Kind::term;
            e.term = std::move(term);
            return e;
        }
        if (t.kind == TokenKind::punctuation && (t.lexeme == "+" || t.lexeme == "-") &&
            peek_kind(TokenKind::number, 1)) {
            Expr e;
            e.kind = Expr::Kind::term;
            e.term = parse_term();
            return e;
        }
        throw SyntaxError("expected expression, found '" + t.lexeme + "'", t.offset);
    }

    Expr parse_exists_body(bool negated) {
        Expr e;
        e.kind = Expr::Kind::exists;
        e.negated = negated;
        e.exists_body = parse_group_pattern();
        return e;
    }

    Expr parse_aggregate() {
        Token name = take();
        Expr e;
        e.kind = Expr::Kind::call;
        e.op = name.lexeme;
        expect_punct("(");
        if (accept_kw("DISTINCT"))
            e.distinct = true;
        if (name.lexeme == "COUNT" && accept_punct("*")) {
            Expr star;
            star.kind = Expr::Kind::star;
            e.args.push_back(std::move(star));
        } else {
            e.args.push_back(parse_expression());
        }
        if (name.lexeme == "GROUP_CONCAT" && accept_punct(";")) {
            expect_kw("SEPARATOR");
            expect_punct("=");
            Token sep = take();
            if (sep.kind != TokenKind::literal)
                throw SyntaxError("expected separator string", sep.offset);
            e.separator = sep.lexeme;
        }
        expect_punct(")");
        return e;
    }

    Expr parse_builtin_call() {
        Token name = take();
        Expr e;
        e.kind = Expr::Kind::call;
        e.op = name.lexeme;
        expect_punct("(");
        if (!peek_punct(")")) {
            do {
                e.args.push_back(parse_expression());
            } while (accept_punct(","));
        }
        expect_punct(")");
        return e;
    }

    // --- solution modifiers -----------------------------------------------------
    SolutionModifiers parse_solution_modifiers() {
        SolutionModifiers mods;
        if (accept_kw("GROUP")) {
            expect_kw("BY");
            for (;;) {
                if (peek_kind(TokenKind::variable)) {
                    GroupByItem item;
                    item.expr.kind = Expr::Kind::var;
                    item.expr.term = parse_variable();
                    mods.group_by.push_back(std::move(item));
                } else if (accept_punct("(")) {
                    GroupByItem item;
                    item.expr = parse_expression();
                    if (accept_kw("AS"))
                        item.as = parse_variable();
                    expect_punct(")");
                    mods.group_by.push_back(std::move(item));
                } else if (peek_kind(TokenKind::keyword) &&
                           (builtin_call_names().count(cur().lexeme) ||
                            aggregate_names().count(cur().lexeme))) {
                    GroupByItem item;
                    item.expr = parse_primary_expression();
                    mods.group_by.push_back(std::move(item));
                } else {
                    break;
                }
            }
            if (mods.group_by.empty())
                throw SyntaxError("GROUP BY needs at least one grouping condition", cur_offset());
        }
        if (accept_kw("HAVING")) {
            while (peek_punct("(") ||
                   (peek_kind(TokenKind::keyword) && (builtin_call_names().count(cur().lexeme) ||
                                                      aggregate_names().count(cur().lexeme))))
                mods.having.push_back(parse_constraint());
            if (mods.having.empty())
                throw SyntaxError("HAVING needs at least one constraint", cur_offset());
        }
        if (accept_kw("ORDER")) {
            expect_kw("BY");
            for (;;) {
                OrderItem item;
                if (accept_kw("ASC")) {
                    item.direction = OrderItem::Direction::asc;
                    expect_punct("(");
                    item.expr = parse_expression();
                    expect_punct(")");
                } else if (accept_kw("DESC")) {
                    item.direction = OrderItem::Direction::desc;
                    expect_punct("(");
                    item.expr = parse_expression();
                    expect_punct(")");
                } else if (peek_kind(TokenKind::variable)) {
                    item.expr.kind = Expr::Kind::var;
                    item.expr.term = parse_variable();
                } else if (peek_punct("(")) {
                    ++pos_;
                    item.expr = parse_expression();
                    expect_punct(")");
                } else if (peek_kind(TokenKind::keyword) &&
                           (builtin_call_names().count(cur().lexeme) ||
                            aggregate_names().count(cur().lexeme))) {
                    item.expr = parse_primary_expression();
                } else {
                    break;
                }
                mods.order_by.push_back(std::move(item));
            }
            if (mods.order_by.empty())
                throw SyntaxError("ORDER BY needs at least one condition", cur_offset());
        }
        // LIMIT and OFFSET accepted in either order, one of each
        bool saw_limit = false, saw_offset = false;
        for (;;) {
            if (!saw_limit && accept_kw("LIMIT")) {
                mods.limit = parse_nonnegative_int();
                saw_limit = true;
            } else if (!saw_offset && accept_kw("OFFSET")) {
                mods.offset = parse_nonnegative_int();
                saw_offset = true;
            } else {
                break;
            }
        }
        return mods;
    }

    long long parse_nonnegative_int() {
        Token t = take();
        if (t.kind != TokenKind::number)
            throw SyntaxError("expected integer", t.offset);
        try {
            std::size_t used = 0;
            long long v = std::stoll(t.lexeme, &used);
            if (used != t.lexeme.size() || v < 0)
                throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw SyntaxError("expected non-negative integer, found '" + t.lexeme + "'", t.offset);
        }
    }
};

} // namespace detail

inline QueryAst parse(std::string_view query) {
    detail::Parser parser(tokenize(query));
    return parser.parse_query();
}

} // namespace sparqleval::sparql
