#pragma once
// Token-level metrics over predicted vs gold query token sequences: exact
// match, bag-overlap P/R/F1, Jaccard, bag-of-words cosine, BLEU (individual
// and cumulative, unsmoothed), ROUGE@k, METEOR, and the SP-variants that
// compare normalized query text.
//
// Degenerate-input convention used throughout: when both inputs are empty a
// metric returns its maximum; when exactly one is empty it returns 0.

#include "sparqleval/metrics/prf.hpp"
#include "sparqleval/sparql/normalize.hpp"
#include "sparqleval/sparql/token.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sparqleval::lexical {

using sparql::Token;
using sparql::TokenKind;
using sparql::TokenSequence;

inline double exact_match(const TokenSequence& pred, const TokenSequence& gold) {
    if (pred.size() != gold.size())
        return 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i].lexeme != gold[i].lexeme)
            return 0;
    return 1;
}

namespace lexdetail {

inline std::unordered_map<std::string, int> bag(const TokenSequence& seq) {
    std::unordered_map<std::string, int> counts;
    for (const auto& t : seq)
        ++counts[t.lexeme];
    return counts;
}

// n-grams encoded as lexemes joined by an unlikely separator byte
inline std::unordered_map<std::string, int> ngram_bag(const TokenSequence& seq, int n) {
    std::unordered_map<std::string, int> counts;
    if (static_cast<int>(seq.size()) < n)
        return counts;
    for (std::size_t i = 0; i + n <= seq.size(); ++i) {
        std::string key;
        for (int j = 0; j < n; ++j) {
            if (j)
                key += '\x1f';
            key += seq[i + j].lexeme;
        }
        ++counts[key];
    }
    return counts;
}

} // namespace lexdetail

inline PrfTriple token_prf(const TokenSequence& pred, const TokenSequence& gold) {
    if (pred.empty() && gold.empty())
        return PrfTriple::all(1);
    if (pred.empty() || gold.empty())
        return PrfTriple::all(0);
    auto pb = lexdetail::bag(pred);
    auto gb = lexdetail::bag(gold);
    long long overlap = 0;
    for (const auto& [lexeme, count] : pb) {
        auto it = gb.find(lexeme);
        if (it != gb.end())
            overlap += std::min(count, it->second);
    }
    return PrfTriple::from_pr(static_cast<double>(overlap) / pred.size(),
                              static_cast<double>(overlap) / gold.size());
}

inline double jaccard(const TokenSequence& pred, const TokenSequence& gold) {
    std::unordered_set<std::string> ps, gs;
    for (const auto& t : pred)
        ps.insert(t.lexeme);
    for (const auto& t : gold)
        gs.insert(t.lexeme);
    if (ps.empty() && gs.empty())
        return 1;
    std::size_t inter = 0;
    for (const auto& s : ps)
        inter += gs.count(s);
    std::size_t uni = ps.size() + gs.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double cosine_bow(const TokenSequence& pred, const TokenSequence& gold) {
    if (pred.empty() && gold.empty())
        return 1;
    if (pred.empty() || gold.empty())
        return 0;
    auto pb = lexdetail::bag(pred);
    auto gb = lexdetail::bag(gold);
    double dot = 0, pn = 0, gn = 0;
    for (const auto& [lexeme, count] : pb) {
        pn += static_cast<double>(count) * count;
        auto it = gb.find(lexeme);
        if (it != gb.end())
            dot += static_cast<double>(count) * it->second;
    }
    for (const auto& [lexeme, count] : gb)
        gn += static_cast<double>(count) * count;
    // rounding can push identical distributions an ulp past 1
    return std::min(1.0, dot / (std::sqrt(pn) * std::sqrt(gn)));
}

enum class BleuMode { individual, cumulative };

// Modified (clipped) n-gram precision. When neither side has n-grams of this
// order the precision is neutral (1); when only the prediction lacks them it
// is 0.
inline double clipped_precision(const TokenSequence& pred, const TokenSequence& gold, int n) {
    auto pg = lexdetail::ngram_bag(pred, n);
    auto gg = lexdetail::ngram_bag(gold, n);
    long long total = 0, clipped = 0;
    for (const auto& [gram, count] : pg) {
        total += count;
        auto it = gg.find(gram);
        if (it != gg.end())
            clipped += std::min(count, it->second);
    }
    if (total == 0)
        return gg.empty() ? 1.0 : 0.0;
    return static_cast<double>(clipped) / static_cast<double>(total);
}

inline double brevity_penalty(std::size_t pred_len, std::size_t gold_len) {
    if (pred_len > gold_len)
        return 1.0;
    return std::exp(1.0 - static_cast<double>(gold_len) / static_cast<double>(pred_len));
}

// Sentence-level BLEU without smoothing: a cumulative score is exactly 0 as
// soon as any constituent precision is 0.
inline double bleu(const TokenSequence& pred, const TokenSequence& gold, int k,
                   BleuMode mode = BleuMode::cumulative) {
    if (k < 1)
        throw std::invalid_argument("bleu: k must be >= 1");
    if (pred.empty())
        return gold.empty() ? 1.0 : 0.0;
    if (gold.empty())
        return 0.0;
    const double bp = brevity_penalty(pred.size(), gold.size());
    if (mode == BleuMode::individual)
        return bp * clipped_precision(pred, gold, k);
    double log_sum = 0;
    for (int n = 1; n <= k; ++n) {
        double p = clipped_precision(pred, gold, n);
        if (p == 0)
            return 0.0;
        log_sum += std::log(p);
    }
    return bp * std::exp(log_sum / k);
}

inline PrfTriple rouge(const TokenSequence& pred, const TokenSequence& gold, int k) {
    if (k < 1)
        throw std::invalid_argument("rouge: k must be >= 1");
    auto pg = lexdetail::ngram_bag(pred, k);
    auto gg = lexdetail::ngram_bag(gold, k);
    long long ptotal = 0, gtotal = 0, overlap = 0;
    for (const auto& [gram, count] : pg) {
        ptotal += count;
        auto it = gg.find(gram);
        if (it != gg.end())
            overlap += std::min(count, it->second);
    }
    for (const auto& [gram, count] : gg)
        gtotal += count;
    if (ptotal == 0 && gtotal == 0)
        return PrfTriple::all(1);
    if (ptotal == 0 || gtotal == 0)
        return PrfTriple::all(0);
    return PrfTriple::from_pr(static_cast<double>(overlap) / ptotal,
                              static_cast<double>(overlap) / gtotal);
}

// ------------------------------------------------------------- METEOR -----

using SynonymTable = std::unordered_map<std::string, std::unordered_set<std::string>>;

// "term<TAB>syn1,syn2,..." per line
inline SynonymTable load_synonym_table(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open synonym table: " + path);
    SynonymTable table;
    std::string line;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            continue;
        std::string term = line.substr(0, tab);
        auto& set = table[term];
        std::string rest = line.substr(tab + 1);
        std::size_t start = 0;
        while (start <= rest.size()) {
            auto comma = rest.find(',', start);
            std::string syn = rest.substr(start, comma == std::string::npos ? std::string::npos
                                                                            : comma - start);
            if (!syn.empty())
                set.insert(syn);
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
    }
    return table;
}

struct MeteorParams {
    const SynonymTable* synonyms = nullptr;
};

namespace lexdetail {

// Fixed suffix stripper (documented, deliberately small): plural endings
// first (sses->ss, ies->i, s dropped), then -ing / -ed when at least three
// characters remain.
inline std::string strip_suffixes(std::string w) {
    auto ends_with = [&](const char* suffix) {
        std::size_t len = std::char_traits<char>::length(suffix);
        return w.size() >= len && w.compare(w.size() - len, len, suffix) == 0;
    };
    if (ends_with("sses"))
        w.erase(w.size() - 2);
    else if (ends_with("ies"))
        w.erase(w.size() - 2);
    else if (!ends_with("ss") && ends_with("s") && w.size() > 1)
        w.pop_back();
    if (ends_with("ing") && w.size() >= 6)
        w.erase(w.size() - 3);
    else if (ends_with("ed") && w.size() >= 5)
        w.erase(w.size() - 2);
    return w;
}

// Stemming applies to keywords, the local name of prefixed names, and string
// literal bodies; other kinds (variables, IRIs, numbers) keep their lexeme.
inline std::string stem_key(const Token& t) {
    switch (t.kind) {
    case TokenKind::keyword:
        return strip_suffixes(sparql::detail::to_lower(t.lexeme));
    case TokenKind::prefixed_name: {
        auto colon = t.lexeme.find(':');
        return t.lexeme.substr(0, colon + 1) + strip_suffixes(sparql::detail::to_lower(t.lexeme.substr(colon + 1)));
    }
    case TokenKind::literal: {
        if (t.lexeme.empty() || (t.lexeme[0] != '"' && t.lexeme[0] != '\''))
            return t.lexeme;
        const char q = t.lexeme[0];
        std::size_t close = t.lexeme.rfind(q);
        if (close == 0)
            return t.lexeme;
        std::string body = t.lexeme.substr(1, close - 1);
        return q + strip_suffixes(sparql::detail::to_lower(body)) + t.lexeme.substr(close);
    }
    default:
        return t.lexeme;
    }
}

inline bool synonym_related(const SynonymTable& table, const std::string& a, const std::string& b) {
    if (auto it = table.find(a); it != table.end() && it->second.count(b))
        return true;
    if (auto it = table.find(b); it != table.end() && it->second.count(a))
        return true;
    return false;
}

} // namespace lexdetail

// Staged unigram alignment (exact, stemmed, synonym), greedy left-to-right
// with run extension: each prediction token prefers the gold position right
// after its left neighbour's match, which keeps identical sequences in a
// single chunk.
inline double meteor(const TokenSequence& pred, const TokenSequence& gold,
                     const MeteorParams& params = {}) {
    if (pred.empty() && gold.empty())
        return 1;
    if (pred.empty() || gold.empty())
        return 0;

    const std::size_t np = pred.size(), ng = gold.size();
    std::vector<int> pred_to_gold(np, -1);
    std::vector<bool> gold_used(ng, false);

    auto align_stage = [&](auto&& matches) {
        for (std::size_t i = 0; i < np; ++i) {
            if (pred_to_gold[i] != -1)
                continue;
            int preferred = -1;
            if (i > 0 && pred_to_gold[i - 1] != -1)
                preferred = pred_to_gold[i - 1] + 1;
            if (preferred >= 0 && preferred < static_cast<int>(ng) && !gold_used[preferred] &&
                matches(pred[i], gold[preferred])) {
                pred_to_gold[i] = preferred;
                gold_used[preferred] = true;
                continue;
            }
            for (std::size_t j = 0; j < ng; ++j) {
                if (!gold_used[j] && matches(pred[i], gold[j])) {
                    pred_to_gold[i] = static_cast<int>(j);
                    gold_used[j] = true;
                    break;
                }
            }
        }
    };

    align_stage([](const Token& a, const Token& b) { return a.lexeme == b.lexeme; });
    align_stage([](const Token& a, const Token& b) {
        return lexdetail::stem_key(a) == lexdetail::stem_key(b);
    });
    if (params.synonyms) {
        align_stage([&](const Token& a, const Token& b) {
            return lexdetail::synonym_related(*params.synonyms, sparql::detail::to_lower(a.lexeme),
                                              sparql::detail::to_lower(b.lexeme));
        });
    }

    int m = 0;
    for (std::size_t i = 0; i < np; ++i)
        if (pred_to_gold[i] != -1)
            ++m;
    if (m == 0)
        return 0;

    int chunks = 0;
    int prev_pred = -2, prev_gold = -2;
    for (std::size_t i = 0; i < np; ++i) {
        if (pred_to_gold[i] == -1)
            continue;
        if (static_cast<int>(i) != prev_pred + 1 || pred_to_gold[i] != prev_gold + 1)
            ++chunks;
        prev_pred = static_cast<int>(i);
        prev_gold = pred_to_gold[i];
    }

    const double p = static_cast<double>(m) / np;
    const double r = static_cast<double>(m) / ng;
    const double f_mean = 10 * p * r / (r + 9 * p);
    const double penalty = 0.5 * std::pow(static_cast<double>(chunks) / m, 3);
    return f_mean * (1 - penalty);
}

// ----------------------------------------------------- SP-variants --------
//
// Both queries run through the full normalization pipeline before a plain
// token metric. A query that fails to parse or to resolve scores 0 with a
// parse_error marker, per the degradation contract.

struct SpPrfResult {
    PrfTriple prf;
    bool parse_error = false;
};

struct SpScoreResult {
    double value = 0;
    bool parse_error = false;
};

inline SpPrfResult sp_f1(const std::string& pred, const std::string& gold,
                         const sparql::PrefixMap& prefixes = sparql::builtin_prefix_map()) {
    try {
        auto p = sparql::tokenize(sparql::normalize(pred, prefixes).text);
        auto g = sparql::tokenize(sparql::normalize(gold, prefixes).text);
        return {token_prf(p, g), false};
    } catch (const sparql::ParseError&) {
        return {PrfTriple::all(0), true};
    } catch (const sparql::LexicalError&) {
        return {PrfTriple::all(0), true};
    }
}

inline SpScoreResult sp_bleu(const std::string& pred, const std::string& gold, int k = 4,
                             const sparql::PrefixMap& prefixes = sparql::builtin_prefix_map()) {
    if (k < 1)
        throw std::invalid_argument("sp_bleu: k must be >= 1");
    try {
        auto p = sparql::tokenize(sparql::normalize(pred, prefixes).text);
        auto g = sparql::tokenize(sparql::normalize(gold, prefixes).text);
        return {bleu(p, g, k, BleuMode::cumulative), false};
    } catch (const sparql::ParseError&) {
        return {0.0, true};
    } catch (const sparql::LexicalError&) {
        return {0.0, true};
    }
}

} // namespace sparqleval::lexical
