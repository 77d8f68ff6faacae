#include <catch2/catch_amalgamated.hpp>

#include "sparqleval/metrics/lexical.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

#include <random>

using namespace sparqleval;
using namespace sparqleval::lexical;
using sparqleval::sparql::Token;
using sparqleval::sparql::TokenKind;

namespace {

TokenSequence seq(std::initializer_list<const char*> lexemes) {
    TokenSequence out;
    for (const char* l : lexemes)
        out.push_back(Token{l, TokenKind::keyword, 0});
    return out;
}

TokenSequence random_seq(std::mt19937& rng, int max_len, int alphabet) {
    std::uniform_int_distribution<int> len(0, max_len);
    std::uniform_int_distribution<int> sym(0, alphabet - 1);
    TokenSequence out;
    int n = len(rng);
    for (int i = 0; i < n; ++i)
        out.push_back(Token{std::string(1, char('a' + sym(rng))), TokenKind::keyword, 0});
    return out;
}

} // namespace

TEST_CASE("exact match ignores whitespace via tokenization") {
    auto a = sparql::tokenize("SELECT ?x WHERE { ?x a ?y }");
    auto b = sparql::tokenize("SELECT   ?x\nWHERE {  ?x a ?y }");
    CHECK(exact_match(a, b) == 1);
    auto c = sparql::tokenize("SELECT ?z WHERE { ?x a ?y }");
    CHECK(exact_match(a, c) == 0);
    CHECK(exact_match(a, a) == 1);
}

TEST_CASE("token_prf fixtures") {
    CHECK(token_prf(seq({"select", "?x"}), seq({"select", "?y"})) == PrfTriple::all(0.5));
    CHECK(token_prf(seq({"a", "b", "c"}), seq({"a", "b", "c"})) == PrfTriple::all(1));
    CHECK(token_prf(seq({}), seq({})) == PrfTriple::all(1));
    CHECK(token_prf(seq({}), seq({"a"})) == PrfTriple::all(0));
    CHECK(token_prf(seq({"a"}), seq({})) == PrfTriple::all(0));
}

TEST_CASE("jaccard fixtures") {
    CHECK(jaccard(seq({"a", "b", "c"}), seq({"b", "c", "d"})) == 0.5);
    CHECK(jaccard(seq({"a", "b"}), seq({"b", "a", "a"})) == 1);
    CHECK(jaccard(seq({"a"}), seq({"b"})) == 0);
    CHECK(jaccard(seq({}), seq({})) == 1);
}

TEST_CASE("cosine fixtures") {
    CHECK(cosine_bow(seq({"a", "b"}), seq({"a", "b"})) == Catch::Approx(1.0));
    CHECK(cosine_bow(seq({"a"}), seq({"b"})) == 0);
    CHECK(cosine_bow(seq({"a", "b"}), seq({"a"})) ==
          Catch::Approx(0.7071067811865475).margin(1e-6));
    CHECK(cosine_bow(seq({}), seq({})) == 1);
    CHECK(cosine_bow(seq({}), seq({"a"})) == 0);
}

TEST_CASE("bleu fixtures") {
    CHECK(bleu(seq({"a", "b", "c", "d"}), seq({"a", "b", "c", "d"}), 4) == Catch::Approx(1.0));
    // brevity penalty: p1 = 1, BP = exp(1 - 4/2) = e^-1
    CHECK(bleu(seq({"a", "b"}), seq({"a", "b", "c", "d"}), 1, BleuMode::individual) ==
          Catch::Approx(0.36787944117144233).margin(1e-6));
    // clipping: p1 = 1/3, BP = 1 because |pred| > |gold|
    CHECK(bleu(seq({"a", "a", "a"}), seq({"a", "b"}), 1, BleuMode::individual) ==
          Catch::Approx(1.0 / 3.0));
    CHECK(bleu(seq({}), seq({}), 4) == 1);
    CHECK(bleu(seq({}), seq({"a"}), 4) == 0);
    CHECK(bleu(seq({"a"}), seq({}), 4) == 0);
    CHECK_THROWS_AS(bleu(seq({"a"}), seq({"a"}), 0), std::invalid_argument);
}

TEST_CASE("bleu cumulative zeroes without smoothing") {
    // no shared bigram -> p2 = 0 -> cumulative BLEU-2 is exactly 0
    CHECK(bleu(seq({"a", "x", "b"}), seq({"a", "y", "b"}), 2) == 0);
    CHECK(bleu(seq({"a", "x", "b"}), seq({"a", "y", "b"}), 1) > 0);
}

TEST_CASE("rouge fixtures") {
    CHECK(rouge(seq({"a", "b", "c"}), seq({"a", "b", "c"}), 2) == PrfTriple::all(1));
    CHECK(rouge(seq({"a", "b", "c"}), seq({"b", "c", "d"}), 2) == PrfTriple::all(0.5));
    // pred shorter than k has no k-grams -> empty-side convention
    CHECK(rouge(seq({"a"}), seq({"a", "b"}), 2) == PrfTriple::all(0));
    CHECK(rouge(seq({"a"}), seq({"b"}), 2) == PrfTriple::all(1)); // neither side has bigrams
    CHECK_THROWS_AS(rouge(seq({"a"}), seq({"a"}), 0), std::invalid_argument);
}

TEST_CASE("meteor fixtures") {
    // identical 4-token sequences: F_mean = 1, penalty = 0.5 * (1/4)^3
    CHECK(meteor(seq({"select", "?x", "where", "?y"}), seq({"select", "?x", "where", "?y"})) ==
          Catch::Approx(0.9921875).margin(1e-9));
    CHECK(meteor(seq({"a", "b"}), seq({"c", "d"})) == 0);
    CHECK(meteor(seq({}), seq({})) == 1);
    CHECK(meteor(seq({}), seq({"a"})) == 0);
}

TEST_CASE("meteor stemming stage matches inflected keywords") {
    // "names" and "name" share the stem "name"
    double with_stem = meteor(seq({"names"}), seq({"name"}));
    CHECK(with_stem > 0);
    // stems differ -> no match
    CHECK(meteor(seq({"names"}), seq({"label"})) == 0);
}

TEST_CASE("meteor synonym stage is optional") {
    SynonymTable table;
    table["film"] = {"movie"};
    MeteorParams with{&table};
    CHECK(meteor(seq({"film"}), seq({"movie"})) == 0);
    CHECK(meteor(seq({"film"}), seq({"movie"}), with) > 0);
}

TEST_CASE("sp metrics collapse variable renaming") {
    std::string gold = "SELECT ?x WHERE { ?x foaf:name ?n }";
    std::string pred = "SELECT ?a WHERE { ?a foaf:name ?b }";
    auto f1 = sp_f1(pred, gold);
    CHECK_FALSE(f1.parse_error);
    CHECK(f1.prf == PrfTriple::all(1));
    auto b = sp_bleu(pred, gold);
    CHECK_FALSE(b.parse_error);
    CHECK(b.value == 1);
    // the raw metric sees the renaming
    CHECK(bleu(sparql::tokenize(pred), sparql::tokenize(gold), 4) < 1);
}

TEST_CASE("sp metrics degrade on parse errors") {
    auto f1 = sp_f1("SELECT SELECT {", "SELECT ?x WHERE { ?x a ?y }");
    CHECK(f1.parse_error);
    CHECK(f1.prf == PrfTriple::all(0));
    auto b = sp_bleu("SELECT SELECT {", "SELECT ?x WHERE { ?x a ?y }");
    CHECK(b.parse_error);
    CHECK(b.value == 0);
}

TEST_CASE("sp invariance over corpus sample") {
    std::mt19937 rng(11);
    auto corpus = testsupport::load_corpus();
    for (std::size_t i = 0; i < corpus.size(); i += 4) {
        std::string renamed = testsupport::rename_variables(corpus[i], rng, false);
        CHECK(sp_bleu(renamed, corpus[i]).value == 1.0);
        CHECK(sp_f1(renamed, corpus[i]).prf == PrfTriple::all(1));
    }
}

TEST_CASE("lexical metrics match brute-force references on random pairs") {
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 500; ++trial) {
        TokenSequence pred = random_seq(rng, 8, 4);
        TokenSequence gold = random_seq(rng, 8, 4);
        auto pl = testsupport::lexemes(pred);
        auto gl = testsupport::lexemes(gold);

        auto prf = token_prf(pred, gold);
        auto ref = testsupport::ref_token_prf(pl, gl);
        CHECK(prf.precision == Catch::Approx(ref.precision).margin(1e-9));
        CHECK(prf.recall == Catch::Approx(ref.recall).margin(1e-9));
        CHECK(prf.f1 == Catch::Approx(ref.f1).margin(1e-9));

        CHECK(jaccard(pred, gold) == Catch::Approx(testsupport::ref_jaccard(pl, gl)).margin(1e-9));
        CHECK(cosine_bow(pred, gold) ==
              Catch::Approx(testsupport::ref_cosine(pl, gl)).margin(1e-9));

        for (int k = 1; k <= 4; ++k) {
            CHECK(bleu(pred, gold, k, BleuMode::individual) ==
                  Catch::Approx(testsupport::ref_bleu(pl, gl, k, false)).margin(1e-9));
            CHECK(bleu(pred, gold, k, BleuMode::cumulative) ==
                  Catch::Approx(testsupport::ref_bleu(pl, gl, k, true)).margin(1e-9));
        }
        for (int k = 1; k <= 3; ++k) {
            auto r = rouge(pred, gold, k);
            auto rr = testsupport::ref_rouge(pl, gl, k);
            CHECK(r.precision == Catch::Approx(rr.precision).margin(1e-9));
            CHECK(r.recall == Catch::Approx(rr.recall).margin(1e-9));
            CHECK(r.f1 == Catch::Approx(rr.f1).margin(1e-9));
        }
    }
}

TEST_CASE("lexical metric properties on random inputs") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        TokenSequence pred = random_seq(rng, 8, 3);
        TokenSequence gold = random_seq(rng, 8, 3);

        // range
        for (double v : {jaccard(pred, gold), cosine_bow(pred, gold), bleu(pred, gold, 3),
                         meteor(pred, gold), exact_match(pred, gold)}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        // symmetry
        CHECK(jaccard(pred, gold) == Catch::Approx(jaccard(gold, pred)));
        CHECK(cosine_bow(pred, gold) == Catch::Approx(cosine_bow(gold, pred)));

        // identity maxima
        CHECK(token_prf(pred, pred) == PrfTriple::all(1));
        CHECK(bleu(pred, pred, 4) == 1);
        CHECK(rouge(pred, pred, 2) == PrfTriple::all(1));
        CHECK(jaccard(pred, pred) == 1);

        // geometric-mean bound: min individual <= cumulative <= max individual
        if (!pred.empty() && !gold.empty()) {
            for (int k = 2; k <= 4; ++k) {
                double cum = bleu(pred, gold, k, BleuMode::cumulative);
                double lo = 1, hi = 0;
                for (int n = 1; n <= k; ++n) {
                    double ind = bleu(pred, gold, n, BleuMode::individual);
                    lo = std::min(lo, ind);
                    hi = std::max(hi, ind);
                }
                CHECK(cum >= lo - 1e-12);
                CHECK(cum <= hi + 1e-12);
            }
        }
    }
}

TEST_CASE("token_prf multiset overlap equals exhaustive matching") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 400; ++trial) {
        TokenSequence pred = random_seq(rng, 6, 3);
        TokenSequence gold = random_seq(rng, 6, 3);
        auto got = token_prf(pred, gold);
        auto ref = testsupport::ref_token_prf(testsupport::lexemes(pred),
                                              testsupport::lexemes(gold));
        CHECK(got.precision == Catch::Approx(ref.precision).margin(1e-12));
        CHECK(got.recall == Catch::Approx(ref.recall).margin(1e-12));
    }
}

TEST_CASE("prf harmonic mean invariant") {
    std::mt19937 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        TokenSequence pred = random_seq(rng, 8, 4);
        TokenSequence gold = random_seq(rng, 8, 4);
        auto prf = token_prf(pred, gold);
        if (prf.precision + prf.recall == 0)
            CHECK(prf.f1 == 0);
        else
            CHECK(prf.f1 == Catch::Approx(2 * prf.precision * prf.recall /
                                          (prf.precision + prf.recall))
                                .margin(1e-12));
    }
}

TEST_CASE("synonym table loader") {
    std::string path = std::string(SPARQLEVAL_TEST_DATA_DIR) + "/synonyms.tsv";
    auto table = load_synonym_table(path);
    REQUIRE(table.count("film"));
    CHECK(table.at("film").count("movie"));
    CHECK(table.at("film").count("picture"));
}
