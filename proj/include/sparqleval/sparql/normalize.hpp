#pragma once
// Query normalization: prefix expansion, canonical variable renaming and
// re-serialization. Two queries that differ only in variable names or prefix
// spellings normalize to identical text, which is what the SP-variants of
// the lexical metrics compare.

#include "sparqleval/sparql/ast.hpp"
#include "sparqleval/sparql/parser.hpp"
#include "sparqleval/sparql/serialize.hpp"

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>

namespace sparqleval::sparql {

using PrefixMap = std::map<std::string, std::string>;

class UnresolvedPrefixError : public ParseError {
  public:
    explicit UnresolvedPrefixError(const std::string& prefix)
        : ParseError("unresolved prefix: '" + prefix + "'"), prefix_(prefix) {}
    const std::string& prefix() const { return prefix_; }

  private:
    std::string prefix_;
};

// Prefixes commonly used across KGQA benchmarks. The same table ships as
// data/prefixes.txt; a user-provided map replaces or extends it.
inline const PrefixMap& builtin_prefix_map() {
    static const PrefixMap map = {
        {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
        {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
        {"owl", "http://www.w3.org/2002/07/owl#"},
        {"xsd", "http://www.w3.org/2001/XMLSchema#"},
        {"foaf", "http://xmlns.com/foaf/0.1/"},
        {"dc", "http://purl.org/dc/elements/1.1/"},
        {"dct", "http://purl.org/dc/terms/"},
        {"dcterms", "http://purl.org/dc/terms/"},
        {"skos", "http://www.w3.org/2004/02/skos/core#"},
        {"schema", "http://schema.org/"},
        {"prov", "http://www.w3.org/ns/prov#"},
        {"geo", "http://www.opengis.net/ont/geosparql#"},
        {"wd", "http://www.wikidata.org/entity/"},
        {"wdt", "http://www.wikidata.org/prop/direct/"},
        {"p", "http://www.wikidata.org/prop/"},
        {"ps", "http://www.wikidata.org/prop/statement/"},
        {"pq", "http://www.wikidata.org/prop/qualifier/"},
        {"wikibase", "http://wikiba.se/ontology#"},
        {"bd", "http://www.bigdata.com/rdf#"},
        {"dbo", "http://dbpedia.org/ontology/"},
        {"dbr", "http://dbpedia.org/resource/"},
        {"dbp", "http://dbpedia.org/property/"},
        {"yago", "http://yago-knowledge.org/resource/"},
        {"void", "http://rdfs.org/ns/void#"},
        {"dcat", "http://www.w3.org/ns/dcat#"},
    };
    return map;
}

// One "prefix <iri>" pair per line. A line whose first non-blank character
// is '#' is a comment; inline '#' stays, since namespace IRIs end in it.
inline PrefixMap load_prefix_map(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open prefix map file: " + path);
    PrefixMap map;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos || line[a] == '#')
            continue;
        std::size_t b = line.find_first_of(" \t", a);
        if (b == std::string::npos)
            throw std::runtime_error("malformed prefix map line: " + line);
        std::size_t c = line.find_first_not_of(" \t", b);
        std::size_t d = line.find_last_not_of(" \t\r");
        map[line.substr(a, b - a)] = line.substr(c, d - c + 1);
    }
    return map;
}

namespace normdetail {

class PrefixExpander {
  public:
    PrefixExpander(const PrefixMap& provided, const QueryAst& ast) : map_(provided) {
        for (const auto& [prefix, iri] : ast.prefixes)
            map_[prefix] = iri; // query-local declarations win
        if (ast.base)
            base_ = *ast.base;
    }

    std::string resolve(const PrefixedName& pn) const {
        auto it = map_.find(pn.prefix);
        if (it == map_.end())
            throw UnresolvedPrefixError(pn.prefix);
        return it->second + pn.local;
    }

    std::string resolve_relative(const std::string& iri) const {
        if (base_.empty() || iri.find("://") != std::string::npos || iri.rfind("urn:", 0) == 0)
            return iri;
        return base_ + iri;
    }

    void term_iri(TermIri& t) {
        if (auto* pn = std::get_if<PrefixedName>(&t))
            t = Iri{resolve(*pn)};
        else
            std::get<Iri>(t).value = resolve_relative(std::get<Iri>(t).value);
    }
    void term(Term& t) {
        if (auto* pn = std::get_if<PrefixedName>(&t))
            t = Iri{resolve(*pn)};
        else if (auto* iri = std::get_if<Iri>(&t))
            iri->value = resolve_relative(iri->value);
        else if (auto* lit = std::get_if<Literal>(&t)) {
            if (lit->datatype)
                term_iri(*lit->datatype);
        }
    }
    void path(Path& p) {
        if (p.kind == Path::Kind::link) {
            if (!p.is_a)
                term_iri(p.iri);
        } else {
            for (auto& c : p.children)
                path(c);
        }
    }
    void expr(Expr& e) {
        if (e.kind == Expr::Kind::term)
            term(e.term);
        if (e.function_iri)
            term_iri(*e.function_iri);
        for (auto& a : e.args)
            expr(a);
        if (e.kind == Expr::Kind::exists)
            group(e.exists_body);
    }
    void pattern(PatternNode& p) {
        switch (p.kind) {
        case PatternNode::Kind::triples:
            for (auto& t : p.triples) {
                term(t.subject);
                if (auto* pp = std::get_if<Path>(&t.predicate))
                    path(*pp);
                term(t.object);
            }
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
        case PatternNode::Kind::bind:
            expr(p.expr);
            break;
        case PatternNode::Kind::values:
            for (auto& row : p.values_rows)
                for (auto& cell : row)
                    if (cell)
                        term(*cell);
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
        for (auto& item : s.projection.items)
            if (item.expr)
                expr(*item.expr);
        group(s.where);
        for (auto& g : s.modifiers.group_by)
            expr(g.expr);
        for (auto& h : s.modifiers.having)
            expr(h);
        for (auto& o : s.modifiers.order_by)
            expr(o.expr);
    }
    void query(QueryAst& q) {
        for (auto& t : q.construct_template) {
            term(t.subject);
            if (auto* pp = std::get_if<Path>(&t.predicate))
                path(*pp);
            term(t.object);
        }
        for (auto& t : q.describe_terms)
            term(t);
        select_core(q.select);
    }

  private:
    PrefixMap map_;
    std::string base_;
};

} // namespace normdetail

// Replaces every prefixed name by its absolute IRI. Query-local declarations
// shadow the provided map; the prologue is consumed.
inline QueryAst expand_prefixes(QueryAst ast, const PrefixMap& prefix_map) {
    normdetail::PrefixExpander expander(prefix_map, ast);
    expander.query(ast);
    ast.prefixes.clear();
    ast.base.reset();
    ast.prefixes_expanded = true;
    return ast;
}

// Renames variables to ?v0, ?v1, ... and blank nodes to _:b0, _:b1, ... by
// first occurrence in a left-to-right depth-first walk. Returns the applied
// variable mapping (original -> canonical).
inline std::unordered_map<std::string, std::string> normalize_variables(QueryAst& ast) {
    std::unordered_map<std::string, std::string> var_map;
    std::unordered_map<std::string, std::string> blank_map;
    walk_names(
        ast,
        [&](Variable& v) {
            auto [it, inserted] = var_map.try_emplace(v.name, "v" + std::to_string(var_map.size()));
            v.name = it->second;
        },
        [&](BlankNode& b) {
            auto [it, inserted] = blank_map.try_emplace(b.label, "b" + std::to_string(blank_map.size()));
            b.label = it->second;
            b.anonymous = false;
        });
    return var_map;
}

struct NormalizedQuery {
    std::string text;
    std::unordered_map<std::string, std::string> variable_map;
    std::set<std::string> iri_set;
};

struct ExtractIrisOptions {
    bool include_datatype_iris = false;
};

// All absolute IRIs appearing in the query. Datatype IRIs on literals are
// vocabulary rather than KB entities and are excluded unless requested.
inline std::set<std::string> extract_iris(const QueryAst& ast, ExtractIrisOptions opts = {}) {
    std::set<std::string> out;
    walk_iris(ast, [&](const Iri& iri, bool is_datatype) {
        if (is_datatype && !opts.include_datatype_iris)
            return;
        out.insert(iri.value);
    });
    return out;
}

// The full pipeline: parse -> expand prefixes -> rename variables ->
// canonical serialization. Parse and prefix errors propagate.
inline NormalizedQuery normalize(std::string_view query, const PrefixMap& prefix_map) {
    QueryAst ast = expand_prefixes(parse(query), prefix_map);
    NormalizedQuery out;
    out.variable_map = normalize_variables(ast);
    out.iri_set = extract_iris(ast);
    out.text = serialize(ast);
    return out;
}

inline NormalizedQuery normalize(std::string_view query) {
    return normalize(query, builtin_prefix_map());
}

} // namespace sparqleval::sparql
