#pragma once
// Execution-based metrics over answer tables: success flag, answer-set
// precision/recall/F1 in value-set and row-set modes, the QALD empty-set
// conventions, the column-forgiving Spinach F1, and the URI-hallucination
// check backed by a membership oracle.

#include "sparqleval/kb/endpoint.hpp"
#include "sparqleval/kb/oracle.hpp"
#include "sparqleval/metrics/prf.hpp"
#include "sparqleval/sparql/normalize.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace sparqleval::kb {

class TypeMismatchError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline double query_execution_success(const ExecutionOutcome& outcome) {
    return outcome.status == ExecStatus::ok ? 1.0 : 0.0;
}

enum class AnswerCompareMode { value_set, row_set };

namespace ansdetail {

inline PrfTriple set_prf(const std::set<std::string>& pred, const std::set<std::string>& gold) {
    if (pred.empty() && gold.empty())
        return PrfTriple::all(1);
    if (pred.empty() || gold.empty())
        return PrfTriple::all(0);
    std::size_t inter = 0;
    for (const auto& k : pred)
        inter += gold.count(k);
    return PrfTriple::from_pr(static_cast<double>(inter) / pred.size(),
                              static_cast<double>(inter) / gold.size());
}

} // namespace ansdetail

inline PrfTriple answer_prf(const AnswerTable& pred, const AnswerTable& gold,
                            AnswerCompareMode mode = AnswerCompareMode::value_set) {
    if (pred.kind != gold.kind)
        throw TypeMismatchError("cannot compare boolean result against bindings");
    if (pred.kind == AnswerTable::Kind::boolean)
        return PrfTriple::all(pred.boolean_value == gold.boolean_value ? 1 : 0);
    if (mode == AnswerCompareMode::value_set)
        return ansdetail::set_prf(value_set(pred), value_set(gold));
    return ansdetail::set_prf(row_signature_set(pred), row_signature_set(gold));
}

// QALD convention: failed execution scores 0, two empty answer sets score 1,
// one empty set scores 0, otherwise value-set F1.
inline double f1_qald(const ExecutionOutcome& pred, const AnswerTable& gold) {
    if (pred.status != ExecStatus::ok || !pred.answers)
        return 0;
    const AnswerTable& pt = *pred.answers;
    if (pt.kind == AnswerTable::Kind::boolean || gold.kind == AnswerTable::Kind::boolean)
        return answer_prf(pt, gold).f1;
    if (pt.empty() && gold.empty())
        return 1;
    if (pt.empty() || gold.empty())
        return 0;
    return answer_prf(pt, gold, AnswerCompareMode::value_set).f1;
}

struct SpinachResult {
    double f1 = 0;
    bool greedy = false; // exact search skipped (column count beyond cap)
};

namespace ansdetail {

inline std::set<std::string> project_signatures(const AnswerTable& t,
                                                const std::vector<std::string>& columns) {
    std::set<std::string> sigs;
    for (const auto& row : t.rows) {
        std::map<std::string, RdfTerm> projected;
        for (const auto& c : columns) {
            auto it = row.find(c);
            if (it != row.end())
                projected.emplace(*it);
        }
        sigs.insert(row_signature(projected));
    }
    return sigs;
}

// every size-k column combination, lexicographic
inline void for_each_combination(std::size_t n, std::size_t k,
                                 const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i)
        idx[i] = i;
    for (;;) {
        fn(idx);
        std::size_t i = k;
        while (i > 0) {
            --i;
            if (idx[i] != i + n - k) {
                ++idx[i];
                for (std::size_t j = i + 1; j < k; ++j)
                    idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0)
                return;
        }
    }
}

inline double best_projection_f1(const AnswerTable& wide, const AnswerTable& narrow) {
    // project `wide` onto every column subset of the narrow table's width and
    // keep the best row-set F1
    const std::size_t k = narrow.columns.size();
    auto narrow_sigs = row_signature_set(narrow);
    double best = 0;
    for_each_combination(wide.columns.size(), k, [&](const std::vector<std::size_t>& idx) {
        std::vector<std::string> cols;
        for (auto i : idx)
            cols.push_back(wide.columns[i]);
        best = std::max(best, set_prf(project_signatures(wide, cols), narrow_sigs).f1);
    });
    return best;
}

inline double per_column_value_f1(const AnswerTable& t, const std::string& column,
                                  const std::set<std::string>& gold_values) {
    std::set<std::string> values;
    for (const auto& row : t.rows) {
        auto it = row.find(column);
        if (it != row.end())
            values.insert(term_key(it->second));
    }
    return set_prf(values, gold_values).f1;
}

} // namespace ansdetail

// Extra predicted columns are free: the score is the best row-set F1 over
// projections of the wider table onto as many columns as the narrower one
// has. Beyond `column_cap` columns the exact subset search gives way to
// greedy per-column matching, flagged in the result.
inline SpinachResult f1_spinach(const AnswerTable& pred, const AnswerTable& gold,
                                std::size_t column_cap = 8) {
    SpinachResult out;
    if (pred.kind == AnswerTable::Kind::boolean || gold.kind == AnswerTable::Kind::boolean) {
        out.f1 = answer_prf(pred, gold).f1;
        return out;
    }
    if (pred.empty() && gold.empty()) {
        out.f1 = 1;
        return out;
    }
    if (pred.empty() || gold.empty()) {
        out.f1 = 0;
        return out;
    }
    if (std::max(pred.columns.size(), gold.columns.size()) > column_cap) {
        // greedy fallback: match each gold column to its best unused pred
        // column by value-set F1, then compare the projected rows
        out.greedy = true;
        std::vector<std::string> chosen;
        std::vector<bool> used(pred.columns.size(), false);
        for (const auto& gcol : gold.columns) {
            std::set<std::string> gold_values;
            for (const auto& row : gold.rows) {
                auto it = row.find(gcol);
                if (it != row.end())
                    gold_values.insert(term_key(it->second));
            }
            double best = -1;
            std::size_t best_idx = 0;
            for (std::size_t i = 0; i < pred.columns.size(); ++i) {
                if (used[i])
                    continue;
                double f = ansdetail::per_column_value_f1(pred, pred.columns[i], gold_values);
                if (f > best) {
                    best = f;
                    best_idx = i;
                }
            }
            if (best >= 0) {
                used[best_idx] = true;
                chosen.push_back(pred.columns[best_idx]);
            }
        }
        out.f1 = ansdetail::set_prf(ansdetail::project_signatures(pred, chosen),
                                    row_signature_set(gold))
                     .f1;
        return out;
    }
    if (pred.columns.size() >= gold.columns.size())
        out.f1 = ansdetail::best_projection_f1(pred, gold);
    else
        out.f1 = ansdetail::best_projection_f1(gold, pred);
    return out;
}

struct HallucinationOptions {
    sparql::PrefixMap prefixes = sparql::builtin_prefix_map();
    bool include_datatype_iris = false;
};

struct HallucinationResult {
    double value = 0; // 1 when at least one IRI is ungrounded (or unparseable)
    bool parse_error = false;
    std::vector<std::string> missing;
};

inline HallucinationResult uri_hallucination(const std::string& pred_query,
                                             MembershipOracle& oracle,
                                             const HallucinationOptions& opts = {}) {
    HallucinationResult out;
    std::set<std::string> iris;
    try {
        auto ast = sparql::expand_prefixes(sparql::parse(pred_query), opts.prefixes);
        iris = sparql::extract_iris(ast, {.include_datatype_iris = opts.include_datatype_iris});
    } catch (const sparql::ParseError&) {
        out.parse_error = true; // an unparseable query cannot be shown grounded
        out.value = 1;
        return out;
    } catch (const sparql::LexicalError&) {
        out.parse_error = true;
        out.value = 1;
        return out;
    }
    for (const auto& iri : iris)
        if (!oracle.contains(iri))
            out.missing.push_back(iri);
    out.value = out.missing.empty() ? 0 : 1;
    return out;
}

} // namespace sparqleval::kb
