#pragma once
// Ranking metrics over a predicted ranked list of RDF terms judged against a
// gold relevant set with binary relevance. A duplicated relevant term counts
// only at its first occurrence; an empty relevant set scores 0 everywhere
// (callers flag such records as eligible for exclusion).

#include "sparqleval/kb/term.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparqleval::ranking {

struct RankedAnswers {
    enum class Source { dataset_field, execution_order };
    std::vector<kb::RdfTerm> items; // rank 1 first
    Source source = Source::dataset_field;
};

struct RelevantSet {
    std::set<std::string> keys; // normalized term keys

    static RelevantSet from_terms(const std::vector<kb::RdfTerm>& terms) {
        RelevantSet r;
        for (const auto& t : terms)
            r.keys.insert(kb::term_key(t));
        return r;
    }
    static RelevantSet from_table(const kb::AnswerTable& table) {
        RelevantSet r;
        r.keys = kb::value_set(table);
        return r;
    }
    bool empty() const { return keys.empty(); }
};

namespace rankdetail {

inline void require_k(int k) {
    if (k < 1)
        throw std::invalid_argument("ranking metric: k must be >= 1");
}

// relevance per rank, deduplicated at first occurrence
inline std::vector<bool> gains(const RankedAnswers& ranked, const RelevantSet& rel) {
    std::vector<bool> out;
    std::set<std::string> seen;
    out.reserve(ranked.items.size());
    for (const auto& item : ranked.items) {
        std::string key = kb::term_key(item);
        out.push_back(rel.keys.count(key) > 0 && seen.insert(key).second);
    }
    return out;
}

} // namespace rankdetail

inline double hit_at_k(const RankedAnswers& ranked, const RelevantSet& rel, int k) {
    rankdetail::require_k(k);
    if (rel.empty())
        return 0;
    const std::size_t upto = std::min<std::size_t>(k, ranked.items.size());
    for (std::size_t i = 0; i < upto; ++i)
        if (rel.keys.count(kb::term_key(ranked.items[i])))
            return 1;
    return 0;
}

inline double precision_at_k(const RankedAnswers& ranked, const RelevantSet& rel, int k) {
    rankdetail::require_k(k);
    if (rel.empty())
        return 0;
    auto g = rankdetail::gains(ranked, rel);
    int hits = 0;
    for (std::size_t i = 0; i < g.size() && i < static_cast<std::size_t>(k); ++i)
        hits += g[i] ? 1 : 0;
    return static_cast<double>(hits) / k; // short lists: missing slots count as misses
}

inline double mrr(const RankedAnswers& ranked, const RelevantSet& rel) {
    if (rel.empty())
        return 0;
    for (std::size_t i = 0; i < ranked.items.size(); ++i)
        if (rel.keys.count(kb::term_key(ranked.items[i])))
            return 1.0 / static_cast<double>(i + 1);
    return 0;
}

inline double ndcg_at_k(const RankedAnswers& ranked, const RelevantSet& rel, int k) {
    rankdetail::require_k(k);
    if (rel.empty())
        return 0;
    auto g = rankdetail::gains(ranked, rel);
    double dcg = 0;
    for (std::size_t i = 0; i < g.size() && i < static_cast<std::size_t>(k); ++i)
        if (g[i])
            dcg += 1.0 / std::log2(static_cast<double>(i + 2));
    double idcg = 0;
    const std::size_t ideal = std::min<std::size_t>(k, rel.keys.size());
    for (std::size_t i = 0; i < ideal; ++i)
        idcg += 1.0 / std::log2(static_cast<double>(i + 2));
    return idcg == 0 ? 0 : dcg / idcg;
}

} // namespace sparqleval::ranking
