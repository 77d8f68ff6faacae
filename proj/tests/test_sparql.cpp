#include <catch2/catch_amalgamated.hpp>

#include "sparqleval/sparql/normalize.hpp"
#include "sparqleval/sparql/parser.hpp"
#include "sparqleval/sparql/serialize.hpp"
#include "sparqleval/sparql/token.hpp"
#include "support/corpus.hpp"

#include <cstdio>
#include <random>

using namespace sparqleval::sparql;

TEST_CASE("tokenize basic query") {
    auto toks = tokenize("SELECT ?x WHERE { ?x a ?y }");
    REQUIRE(toks.size() == 8);
    CHECK(toks[0].lexeme == "SELECT");
    CHECK(toks[0].kind == TokenKind::keyword);
    CHECK(toks[1].lexeme == "?x");
    CHECK(toks[1].kind == TokenKind::variable);
    CHECK(toks[2].lexeme == "WHERE");
    CHECK(toks[3].lexeme == "{");
    CHECK(toks[3].kind == TokenKind::punctuation);
    CHECK(toks[4].lexeme == "?x");
    CHECK(toks[5].lexeme == "a");
    CHECK(toks[5].kind == TokenKind::keyword);
    CHECK(toks[6].lexeme == "?y");
    CHECK(toks[7].lexeme == "}");
}

TEST_CASE("tokenize empty input") { CHECK(tokenize("").empty()); }

TEST_CASE("tokenize unterminated literal") {
    try {
        tokenize("\"abc");
        FAIL("expected LexicalError");
    } catch (const LexicalError& e) {
        CHECK(e.offset() == 0);
    }
}

TEST_CASE("tokenize unterminated IRI") {
    CHECK_THROWS_AS(tokenize("SELECT ?x WHERE { ?x <http://example.or"), LexicalError);
}

TEST_CASE("tokenize drops comments and whitespace") {
    auto a = tokenize("SELECT ?x # trailing comment\nWHERE  {\t?x a ?y }");
    auto b = tokenize("SELECT ?x WHERE { ?x a ?y }");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i].lexeme == b[i].lexeme);
}

TEST_CASE("tokenize keeps literals and IRIs single tokens") {
    auto toks = tokenize("?s <http://ex.org/p> \"two words\"@en");
    REQUIRE(toks.size() == 3);
    CHECK(toks[1].kind == TokenKind::iri);
    CHECK(toks[2].lexeme == "\"two words\"@en");
    CHECK(toks[2].kind == TokenKind::literal);
}

TEST_CASE("tokenize comparison versus IRI") {
    auto toks = tokenize("FILTER(?x<?y)");
    std::vector<std::string> lex;
    for (auto& t : toks)
        lex.push_back(t.lexeme);
    CHECK(lex == std::vector<std::string>{"FILTER", "(", "?x", "<", "?y", ")"});
}

static void check_idempotent(const std::string& text) {
    auto first = tokenize(text);
    auto again = tokenize(join_lexemes(first));
    REQUIRE(again.size() == first.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(again[i].lexeme == first[i].lexeme);
        CHECK(again[i].kind == first[i].kind);
    }
}

TEST_CASE("tokenization idempotence over corpus") {
    for (const auto& q : testsupport::load_corpus())
        check_idempotent(q);
}

TEST_CASE("tokenization idempotence on assorted strings") {
    check_idempotent("\"5\"^^xsd:integer \"x\"^^<http://t> 'a' '''long\nstring'''");
    check_idempotent("FILTER(?a = -3 && ?b >= 4.5e2 || !(?c))");
    check_idempotent("foaf: :name _:b1 wd:Q42 ?x $y a 5-3 +7");
    check_idempotent("{}[]().;,=!=<=>=&&||^^|^/*+-<not-an-iri");
}

TEST_CASE("parse minimal ASK") {
    QueryAst ast = parse("ASK { ?s ?p ?o }");
    CHECK(ast.form == QueryAst::Form::ask);
    REQUIRE(ast.select.where.children.size() == 1);
    const auto& node = ast.select.where.children[0];
    REQUIRE(node.kind == PatternNode::Kind::triples);
    REQUIRE(node.triples.size() == 1);
    CHECK(std::holds_alternative<Variable>(node.triples[0].subject));
    CHECK(std::holds_alternative<Variable>(node.triples[0].predicate));
    CHECK(std::holds_alternative<Variable>(node.triples[0].object));
}

TEST_CASE("parse select star with limit") {
    QueryAst ast = parse("SELECT * WHERE { ?s ?p ?o } LIMIT 5");
    CHECK(ast.form == QueryAst::Form::select);
    CHECK(ast.select.projection.star);
    REQUIRE(ast.select.modifiers.limit.has_value());
    CHECK(*ast.select.modifiers.limit == 5);
    CHECK_FALSE(ast.select.modifiers.offset.has_value());
}

TEST_CASE("prefixed names resolve only at expansion time") {
    QueryAst ast = parse("SELECT ?x WHERE { ?x foaf:name ?n }");
    const auto& t = ast.select.where.children[0].triples[0];
    const auto& path = std::get<Path>(t.predicate);
    REQUIRE(std::holds_alternative<PrefixedName>(path.iri));
    CHECK(std::get<PrefixedName>(path.iri).prefix == "foaf");

    // no declaration anywhere -> expansion fails naming the prefix
    try {
        expand_prefixes(std::move(ast), PrefixMap{});
        FAIL("expected UnresolvedPrefixError");
    } catch (const UnresolvedPrefixError& e) {
        CHECK(e.prefix() == "foaf");
    }
}

TEST_CASE("expand_prefixes substitutes the map") {
    QueryAst ast = parse("SELECT ?x WHERE { ?x foaf:name ?n }");
    ast = expand_prefixes(std::move(ast), PrefixMap{{"foaf", "http://xmlns.com/foaf/0.1/"}});
    CHECK(serialize(ast) ==
          "SELECT ?x WHERE { ?x <http://xmlns.com/foaf/0.1/name> ?n }");
}

TEST_CASE("expand_prefixes is a no-op without prefixed names") {
    QueryAst ast = parse("SELECT ?x WHERE { ?x a ?y }");
    QueryAst expanded = expand_prefixes(parse("SELECT ?x WHERE { ?x a ?y }"), builtin_prefix_map());
    CHECK(ast == expanded);
}

TEST_CASE("query-local prefix declarations win") {
    QueryAst ast = parse("PREFIX foaf: <http://local/> SELECT ?x WHERE { ?x foaf:name ?n }");
    ast = expand_prefixes(std::move(ast), builtin_prefix_map());
    CHECK(serialize(ast) == "SELECT ?x WHERE { ?x <http://local/name> ?n }");
}

TEST_CASE("unknown prefix is named in the error") {
    try {
        normalize("SELECT ?x WHERE { ?x ex:p ?y }", builtin_prefix_map());
        FAIL("expected UnresolvedPrefixError");
    } catch (const UnresolvedPrefixError& e) {
        CHECK(e.prefix() == "ex");
    }
}

TEST_CASE("normalize_variables uses first-occurrence order") {
    QueryAst ast = parse("SELECT ?person WHERE { ?person ?p ?n }");
    auto mapping = normalize_variables(ast);
    CHECK(mapping.at("person") == "v0");
    CHECK(mapping.at("p") == "v1");
    CHECK(mapping.at("n") == "v2");
    CHECK(serialize(ast) == "SELECT ?v0 WHERE { ?v0 ?v1 ?v2 }");
}

TEST_CASE("normalize_variables no-op on variable-free query") {
    QueryAst ast = parse("ASK { <http://a> <http://b> <http://c> }");
    QueryAst before = ast;
    normalize_variables(ast);
    CHECK(ast == before);
}

TEST_CASE("alpha-renamed copies normalize identically") {
    std::mt19937 rng(7);
    const std::string q = "SELECT ?a ?b WHERE { ?a foaf:knows ?b . ?b foaf:name ?n }";
    std::string renamed = testsupport::rename_variables(q, rng, true);
    CHECK(normalize(q).text == normalize(renamed).text);
}

TEST_CASE("serialize canonicalizes spacing and casing") {
    CHECK(serialize(parse("select ?x where{?x a ?y}")) == "SELECT ?x WHERE { ?x a ?y }");
}

TEST_CASE("serialize is a fixed point") {
    for (const auto& q : testsupport::load_corpus()) {
        std::string once = serialize(parse(q));
        CHECK(serialize(parse(once)) == once);
    }
}

TEST_CASE("triple order is preserved") {
    std::string q = "SELECT ?x WHERE { ?x a ?y . ?y a ?z }";
    CHECK(serialize(parse(q)) == "SELECT ?x WHERE { ?x a ?y . ?y a ?z }");
    std::string swapped = "SELECT ?x WHERE { ?y a ?z . ?x a ?y }";
    CHECK(serialize(parse(swapped)) == "SELECT ?x WHERE { ?y a ?z . ?x a ?y }");
}

TEST_CASE("parser round-trip over corpus") {
    for (const auto& q : testsupport::load_corpus()) {
        QueryAst first = parse(q);
        QueryAst second = parse(serialize(first));
        CHECK(first == second);
    }
}

TEST_CASE("normalize pipeline example") {
    NormalizedQuery n = normalize("SELECT ?a WHERE { ?a foaf:name ?b }");
    CHECK(n.text == "SELECT ?v0 WHERE { ?v0 <http://xmlns.com/foaf/0.1/name> ?v1 }");
    CHECK(n.variable_map.at("a") == "v0");
    CHECK(n.variable_map.at("b") == "v1");
    CHECK(n.iri_set == std::set<std::string>{"http://xmlns.com/foaf/0.1/name"});
}

TEST_CASE("normalize collapses prefix spelling differences") {
    std::string a = "SELECT ?x WHERE { ?x foaf:name ?n }";
    std::string b = "PREFIX f: <http://xmlns.com/foaf/0.1/> SELECT ?q WHERE { ?q f:name ?m }";
    CHECK(normalize(a).text == normalize(b).text);
}

TEST_CASE("normalize is idempotent") {
    for (const auto& q : testsupport::load_corpus()) {
        NormalizedQuery once = normalize(q);
        CHECK(normalize(once.text).text == once.text);
    }
}

TEST_CASE("normalize invariance under random renamings") {
    std::mt19937 rng(41);
    for (const auto& q : testsupport::load_corpus()) {
        std::string base = normalize(q).text;
        for (int i = 0; i < 3; ++i) {
            CHECK(normalize(testsupport::rename_variables(q, rng, false)).text == base);
            CHECK(normalize(testsupport::rename_variables(q, rng, true)).text == base);
        }
    }
}

TEST_CASE("extract_iris basics") {
    CHECK(extract_iris(parse("SELECT ?x WHERE { ?x ?p ?y }")).empty());

    QueryAst twice = parse("SELECT ?x WHERE { ?x <http://p> ?y . ?y <http://p> ?z }");
    CHECK(extract_iris(twice) == std::set<std::string>{"http://p"});

    QueryAst two = parse("SELECT ?x WHERE { <http://s> <http://p> ?x }");
    CHECK(extract_iris(two) == std::set<std::string>{"http://s", "http://p"});
}

TEST_CASE("extract_iris covers paths, filters and VALUES") {
    QueryAst path_query = expand_prefixes(
        parse("SELECT ?x WHERE { ?x wdt:P31/wdt:P279* wd:Q515 }"), builtin_prefix_map());
    CHECK(extract_iris(path_query) ==
          std::set<std::string>{"http://www.wikidata.org/prop/direct/P31",
                                "http://www.wikidata.org/prop/direct/P279",
                                "http://www.wikidata.org/entity/Q515"});

    QueryAst values_query = expand_prefixes(
        parse("SELECT ?x WHERE { VALUES ?x { wd:Q1 wd:Q2 } FILTER ( ?x != wd:Q3 ) }"),
        builtin_prefix_map());
    CHECK(extract_iris(values_query) ==
          std::set<std::string>{"http://www.wikidata.org/entity/Q1",
                                "http://www.wikidata.org/entity/Q2",
                                "http://www.wikidata.org/entity/Q3"});
}

TEST_CASE("extract_iris datatype exclusion flag") {
    QueryAst ast = expand_prefixes(
        parse("SELECT ?x WHERE { ?x <http://p> \"5\"^^xsd:integer }"), builtin_prefix_map());
    CHECK(extract_iris(ast) == std::set<std::string>{"http://p"});
    CHECK(extract_iris(ast, {.include_datatype_iris = true}) ==
          std::set<std::string>{"http://p", "http://www.w3.org/2001/XMLSchema#integer"});
}

TEST_CASE("extract_iris invariant under variable renaming") {
    std::mt19937 rng(3);
    for (const auto& q : testsupport::load_corpus()) {
        auto expanded = expand_prefixes(parse(q), builtin_prefix_map());
        auto renamed = expand_prefixes(parse(testsupport::rename_variables(q, rng, false)),
                                       builtin_prefix_map());
        CHECK(extract_iris(expanded) == extract_iris(renamed));
    }
}

TEST_CASE("unsupported constructs fail loudly") {
    CHECK_THROWS_AS(parse("SELECT ?x WHERE { GRAPH <http://g> { ?x a ?y } }"),
                    UnsupportedConstructError);
    CHECK_THROWS_AS(parse("SELECT ?x WHERE { SERVICE <http://e> { ?x a ?y } }"),
                    UnsupportedConstructError);
    CHECK_THROWS_AS(parse("SELECT ?x FROM <http://g> WHERE { ?x a ?y }"),
                    UnsupportedConstructError);
    CHECK_THROWS_AS(parse("SELECT ?x WHERE { ?x <http://p>? ?y }"), UnsupportedConstructError);
    CHECK_THROWS_AS(parse("SELECT ?x WHERE { ?x !<http://p> ?y }"), UnsupportedConstructError);
    CHECK_THROWS_AS(parse("SELECT ?x WHERE { [ <http://p> ?y ] a ?z }"),
                    UnsupportedConstructError);
    CHECK_THROWS_AS(parse("INSERT DATA { <http://a> <http://b> <http://c> }"),
                    UnsupportedConstructError);
    try {
        parse("SELECT ?x WHERE { GRAPH <http://g> { ?x a ?y } }");
    } catch (const UnsupportedConstructError& e) {
        CHECK(e.construct() == "GRAPH");
    }
}

TEST_CASE("syntax errors carry a position") {
    CHECK_THROWS_AS(parse("SELECT WHERE { ?s ?p ?o }"), SyntaxError);
    CHECK_THROWS_AS(parse("SELECT ?x WHERE { ?s ?p }"), SyntaxError);
    CHECK_THROWS_AS(parse("SELECT ?x WHERE { ?s ?p ?o } trailing"), SyntaxError);
    CHECK_THROWS_AS(parse(""), SyntaxError);
}

TEST_CASE("predicate object and object lists expand") {
    QueryAst ast = parse("SELECT ?x WHERE { ?x a ?t ; <http://p> ?a , ?b }");
    REQUIRE(ast.select.where.children.size() == 1);
    CHECK(ast.select.where.children[0].triples.size() == 3);
}

TEST_CASE("blank nodes parse and normalize deterministically") {
    std::string q = "SELECT ?x WHERE { ?x <http://p> _:m . _:m <http://q> [] }";
    NormalizedQuery n = normalize(q);
    CHECK(n.text == "SELECT ?v0 WHERE { ?v0 <http://p> _:b0 . _:b0 <http://q> _:b1 }");
}

TEST_CASE("limit offset canonical order") {
    CHECK(serialize(parse("SELECT ?x WHERE { ?x a ?y } OFFSET 3 LIMIT 7")) ==
          "SELECT ?x WHERE { ?x a ?y } LIMIT 7 OFFSET 3");
}

TEST_CASE("shipped prefix file matches the built-in map") {
    auto from_file = load_prefix_map(std::string(SPARQLEVAL_REPO_DIR) + "/data/prefixes.txt");
    CHECK(from_file == builtin_prefix_map());
}

TEST_CASE("prefix map file loader") {
    std::string path = std::string(SPARQLEVAL_TEST_DATA_DIR) + "/tmp_prefixes.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "ex http://example.org/\n";
        out << "ont\thttp://example.org/ontology#\n";
        out << "\n";
    }
    auto map = load_prefix_map(path);
    CHECK(map == PrefixMap{{"ex", "http://example.org/"}, {"ont", "http://example.org/ontology#"}});
    std::remove(path.c_str());
    CHECK_THROWS(load_prefix_map(path)); // gone now
}
