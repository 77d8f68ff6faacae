#include <catch2/catch_amalgamated.hpp>

#include "sparqleval/metrics/ranking.hpp"
#include "support/oracles.hpp"

using namespace sparqleval;
using namespace sparqleval::ranking;

namespace {

RankedAnswers ranked_of(std::initializer_list<const char*> names) {
    RankedAnswers r;
    for (const char* n : names)
        r.items.push_back(kb::RdfTerm::iri(n));
    return r;
}

RelevantSet rel_of(std::initializer_list<const char*> names) {
    std::vector<kb::RdfTerm> terms;
    for (const char* n : names)
        terms.push_back(kb::RdfTerm::iri(n));
    return RelevantSet::from_terms(terms);
}

} // namespace

TEST_CASE("hit_at_k fixtures") {
    CHECK(hit_at_k(ranked_of({"a", "b"}), rel_of({"a"}), 1) == 1);
    CHECK(hit_at_k(ranked_of({"x", "y", "a"}), rel_of({"a"}), 2) == 0);
    CHECK(hit_at_k(ranked_of({"x", "y", "a"}), rel_of({"a"}), 3) == 1);
    CHECK(hit_at_k(ranked_of({}), rel_of({"a"}), 3) == 0);
    CHECK(hit_at_k(ranked_of({"a"}), rel_of({}), 3) == 0);
    CHECK_THROWS_AS(hit_at_k(ranked_of({"a"}), rel_of({"a"}), 0), std::invalid_argument);
}

TEST_CASE("precision_at_k fixtures") {
    CHECK(precision_at_k(ranked_of({"a", "x"}), rel_of({"a"}), 2) == 0.5);
    CHECK(precision_at_k(ranked_of({"a", "b"}), rel_of({"a", "b"}), 2) == 1);
    CHECK(precision_at_k(ranked_of({"a"}), rel_of({}), 2) == 0);
    // short list: missing slots count as misses
    CHECK(precision_at_k(ranked_of({"a"}), rel_of({"a"}), 4) == 0.25);
    // duplicate relevant item counts once
    CHECK(precision_at_k(ranked_of({"a", "a"}), rel_of({"a"}), 2) == 0.5);
}

TEST_CASE("mrr fixtures") {
    CHECK(mrr(ranked_of({"x", "y", "a"}), rel_of({"a"})) ==
          Catch::Approx(1.0 / 3.0).margin(1e-6));
    CHECK(mrr(ranked_of({"a", "x"}), rel_of({"a"})) == 1);
    CHECK(mrr(ranked_of({"x", "y"}), rel_of({"a"})) == 0);
    CHECK(mrr(ranked_of({"x"}), rel_of({})) == 0);
}

TEST_CASE("ndcg fixtures") {
    // ranked [rel, non, rel], |rel| = 2, k = 3:
    // DCG = 1 + 1/log2(4) = 1.5, IDCG = 1 + 1/log2(3)
    CHECK(ndcg_at_k(ranked_of({"a", "x", "b"}), rel_of({"a", "b"}), 3) ==
          Catch::Approx(0.9197207891481876).margin(1e-5));
    CHECK(ndcg_at_k(ranked_of({"a", "b", "x"}), rel_of({"a", "b"}), 3) == 1);
    CHECK(ndcg_at_k(ranked_of({"x", "y"}), rel_of({"a"}), 2) == 0);
    CHECK(ndcg_at_k(ranked_of({"x"}), rel_of({}), 2) == 0);
    CHECK_THROWS_AS(ndcg_at_k(ranked_of({"a"}), rel_of({"a"}), -1), std::invalid_argument);
}

TEST_CASE("ranking metrics match the exhaustive reference everywhere") {
    // all ranked lists of length <= 5 over a 3-term universe, every relevant
    // subset, k in {1,2,3}
    const std::vector<std::string> universe = {"a", "b", "c"};
    std::vector<std::vector<std::string>> lists = {{}};
    for (int len = 1; len <= 5; ++len) {
        std::vector<std::vector<std::string>> next;
        for (const auto& l : lists)
            if (static_cast<int>(l.size()) == len - 1)
                for (const auto& u : universe) {
                    auto copy = l;
                    copy.push_back(u);
                    next.push_back(copy);
                }
        lists.insert(lists.end(), next.begin(), next.end());
    }
    for (int mask = 0; mask < 8; ++mask) {
        std::set<std::string> rel_names;
        std::vector<kb::RdfTerm> rel_terms;
        for (int i = 0; i < 3; ++i)
            if (mask & (1 << i)) {
                rel_names.insert(universe[i]);
                rel_terms.push_back(kb::RdfTerm::iri(universe[i]));
            }
        RelevantSet rel = RelevantSet::from_terms(rel_terms);
        for (const auto& list : lists) {
            RankedAnswers ranked;
            for (const auto& n : list)
                ranked.items.push_back(kb::RdfTerm::iri(n));
            for (int k = 1; k <= 3; ++k) {
                CHECK(hit_at_k(ranked, rel, k) ==
                      Catch::Approx(testsupport::ref_hit_at_k(list, rel_names, k)));
                CHECK(precision_at_k(ranked, rel, k) ==
                      Catch::Approx(testsupport::ref_precision_at_k(list, rel_names, k)));
                CHECK(ndcg_at_k(ranked, rel, k) ==
                      Catch::Approx(testsupport::ref_ndcg_at_k(list, rel_names, k)).margin(1e-12));
            }
            CHECK(mrr(ranked, rel) == Catch::Approx(testsupport::ref_mrr(list, rel_names)));
        }
    }
}

TEST_CASE("ranking metric properties") {
    auto ranked = ranked_of({"x", "a", "b", "y", "c"});
    auto rel = rel_of({"a", "b", "c"});

    // hit monotone in k, precision*k monotone in k
    for (int k = 1; k < 5; ++k) {
        CHECK(hit_at_k(ranked, rel, k) <= hit_at_k(ranked, rel, k + 1));
        CHECK(precision_at_k(ranked, rel, k) * k <=
              precision_at_k(ranked, rel, k + 1) * (k + 1) + 1e-12);
    }

    // mrr == 1 iff hit@1 == 1 (non-empty rel)
    CHECK((mrr(ranked, rel) == 1) == (hit_at_k(ranked, rel, 1) == 1));
    auto front = ranked_of({"a", "x"});
    CHECK((mrr(front, rel) == 1) == (hit_at_k(front, rel, 1) == 1));

    // any permutation with all relevant first is ideal
    CHECK(ndcg_at_k(ranked_of({"c", "a", "b", "x", "y"}), rel, 5) == 1);
    CHECK(ndcg_at_k(ranked_of({"b", "c", "a", "y", "x"}), rel, 5) == 1);

    // swapping a relevant item upward never decreases mrr / ndcg
    auto before = ranked_of({"x", "a", "y"});
    auto after = ranked_of({"a", "x", "y"});
    CHECK(mrr(after, rel) >= mrr(before, rel));
    CHECK(ndcg_at_k(after, rel, 3) >= ndcg_at_k(before, rel, 3));
}

TEST_CASE("duplicates gain only at first occurrence") {
    auto rel = rel_of({"a"});
    CHECK(ndcg_at_k(ranked_of({"a", "a", "a"}), rel, 3) ==
          ndcg_at_k(ranked_of({"a", "x", "y"}), rel, 3));
    CHECK(precision_at_k(ranked_of({"a", "a"}), rel, 2) == 0.5);
    CHECK(hit_at_k(ranked_of({"a", "a"}), rel, 2) == 1);
}

TEST_CASE("term identity follows normalized equality") {
    // "5"^^xsd:integer and "05"^^xsd:int are the same value
    RankedAnswers ranked;
    ranked.items.push_back(
        kb::RdfTerm::literal("05", "http://www.w3.org/2001/XMLSchema#int"));
    RelevantSet rel = RelevantSet::from_terms(
        {kb::RdfTerm::literal("5", "http://www.w3.org/2001/XMLSchema#integer")});
    CHECK(mrr(ranked, rel) == 1);
}
