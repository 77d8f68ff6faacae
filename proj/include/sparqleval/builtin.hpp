#pragma once
// The built-in measure registry: one measure per supported metric id, wiring
// the metric implementations to records and context. All built-ins score in
// [0,1].
//
// Parameter defaults (overridable through EvalContext.options under the
// metric id): bleu_k k=4, bleu_cumulative k=4, sp_bleu k=4, rouge_k k=2,
// hit_at_k / precision_at_k / ndcg_at_k k=10, codebleu keyword_weight=5
// ast_depth=3 equal component weights, answer_prf mode=value_set,
// f1_spinach column_cap=8.

#include "sparqleval/core.hpp"
#include "sparqleval/kb/answer_metrics.hpp"
#include "sparqleval/metrics/codebleu.hpp"
#include "sparqleval/metrics/lexical.hpp"
#include "sparqleval/metrics/ranking.hpp"

#include <sstream>

namespace sparqleval {

namespace builtindetail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

inline sparql::TokenSequence tokens_or_empty(const std::string& text) {
    try {
        return sparql::tokenize(text);
    } catch (const sparql::LexicalError&) {
        return {};
    }
}

// gold answers: inline from the record when present, otherwise by executing
// the gold query (the caller has already checked the capability)
inline kb::AnswerTable gold_table(const EvalRecord& r, const EvalContext& ctx) {
    if (r.gold_answers)
        return *r.gold_answers;
    if (!ctx.endpoint)
        throw std::runtime_error("no endpoint to execute the gold query");
    kb::ExecutionOutcome outcome = ctx.execute(r.gold_query);
    if (outcome.status != kb::ExecStatus::ok || !outcome.answers)
        throw std::runtime_error("gold query execution failed: " +
                                 std::string(kb::exec_status_name(outcome.status)) +
                                 (outcome.error_message.empty() ? "" : " " + outcome.error_message));
    return *outcome.answers;
}

struct ResolvedRanking {
    ranking::RankedAnswers ranked;
    const char* source = "dataset_field";
};

inline ResolvedRanking ranked_list(const EvalRecord& r, const EvalContext& ctx) {
    ResolvedRanking out;
    if (r.ranked_answers) {
        out.ranked.items = *r.ranked_answers;
        out.ranked.source = ranking::RankedAnswers::Source::dataset_field;
        out.source = "dataset_field";
        return out;
    }
    if (!ctx.endpoint)
        throw std::runtime_error("no ranked answers and no endpoint");
    kb::ExecutionOutcome outcome = ctx.execute(r.predicted_query);
    if (outcome.status != kb::ExecStatus::ok || !outcome.answers)
        throw std::runtime_error("predicted query execution failed: " +
                                 std::string(kb::exec_status_name(outcome.status)));
    const kb::AnswerTable& table = *outcome.answers;
    out.ranked.source = ranking::RankedAnswers::Source::execution_order;
    out.source = "execution_order";
    if (table.kind == kb::AnswerTable::Kind::bindings && !table.columns.empty()) {
        const std::string& first = table.columns.front();
        for (const auto& row : table.rows) {
            auto it = row.find(first);
            if (it != row.end())
                out.ranked.items.push_back(it->second);
        }
    }
    return out;
}

inline MetricScore prf_component(const std::string& id, const PrfTriple& prf, int component,
                                 bool parse_error = false) {
    double value = component == 0 ? prf.precision : component == 1 ? prf.recall : prf.f1;
    MetricScore s = MetricScore::ok_score(id, value);
    s.detail["precision"] = fmt(prf.precision);
    s.detail["recall"] = fmt(prf.recall);
    s.detail["f1"] = fmt(prf.f1);
    if (parse_error)
        s.detail["parse_error"] = "true";
    return s;
}

inline MeasureSpec lexical_measure(std::string id, Category category,
                                   std::set<Capability> needs,
                                   std::function<MetricScore(const EvalRecord&, const EvalContext&)> fn) {
    MeasureSpec spec;
    spec.metric_id = std::move(id);
    spec.category = category;
    spec.needs = std::move(needs);
    spec.compute = std::move(fn);
    return spec;
}

inline MetricScore ranking_score(const std::string& id, const EvalRecord& r,
                                 const EvalContext& ctx,
                                 const std::function<double(const ranking::RankedAnswers&,
                                                            const ranking::RelevantSet&)>& fn) {
    ResolvedRanking resolved = ranked_list(r, ctx);
    ranking::RelevantSet rel = ranking::RelevantSet::from_table(gold_table(r, ctx));
    MetricScore s = MetricScore::ok_score(id, 0);
    s.detail["ranking_source"] = resolved.source;
    if (rel.empty()) {
        s.value = 0;
        s.detail["empty_gold"] = "true"; // eligible for exclusion in aggregation
        return s;
    }
    s.value = fn(resolved.ranked, rel);
    return s;
}

} // namespace builtindetail

inline MeasureRegistry make_default_registry() {
    using namespace builtindetail;
    namespace lex = sparqleval::lexical;
    MeasureRegistry reg;

    // --- lexical ----------------------------------------------------------
    reg.register_measure(lexical_measure(
        "exact_match_token", Category::lexical, {},
        [](const EvalRecord& r, const EvalContext&) {
            return MetricScore::ok_score("exact_match_token",
                                         lex::exact_match(tokens_or_empty(r.predicted_query),
                                                          tokens_or_empty(r.gold_query)));
        }));
    for (int component = 0; component < 3; ++component) {
        const char* ids[] = {"precision_token", "recall_token", "f1_token"};
        reg.register_measure(lexical_measure(
            ids[component], Category::lexical, {},
            [component, id = std::string(ids[component])](const EvalRecord& r,
                                                          const EvalContext&) {
                auto prf = lex::token_prf(tokens_or_empty(r.predicted_query),
                                          tokens_or_empty(r.gold_query));
                return prf_component(id, prf, component);
            }));
    }
    reg.register_measure(lexical_measure(
        "sp_f1_token", Category::lexical, {Capability::parsed_ast},
        [](const EvalRecord& r, const EvalContext& ctx) {
            auto res = lex::sp_f1(r.predicted_query, r.gold_query, ctx.prefix_map);
            return prf_component("sp_f1_token", res.prf, 2, res.parse_error);
        }));
    reg.register_measure(lexical_measure(
        "jaccard_token", Category::lexical, {},
        [](const EvalRecord& r, const EvalContext&) {
            return MetricScore::ok_score("jaccard_token",
                                         lex::jaccard(tokens_or_empty(r.predicted_query),
                                                      tokens_or_empty(r.gold_query)));
        }));
    reg.register_measure(lexical_measure(
        "cosine_bow", Category::lexical, {},
        [](const EvalRecord& r, const EvalContext&) {
            return MetricScore::ok_score("cosine_bow",
                                         lex::cosine_bow(tokens_or_empty(r.predicted_query),
                                                         tokens_or_empty(r.gold_query)));
        }));
    reg.register_measure(lexical_measure(
        "bleu_k", Category::lexical, {},
        [](const EvalRecord& r, const EvalContext& ctx) {
            int k = ctx.option_int("bleu_k", "k", 4);
            MetricScore s = MetricScore::ok_score(
                "bleu_k", lex::bleu(tokens_or_empty(r.predicted_query),
                                    tokens_or_empty(r.gold_query), k, lex::BleuMode::individual));
            s.detail["k"] = std::to_string(k);
            return s;
        }));
    reg.register_measure(lexical_measure(
        "bleu_cumulative", Category::lexical, {},
        [](const EvalRecord& r, const EvalContext& ctx) {
            int k = ctx.option_int("bleu_cumulative", "k", 4);
            MetricScore s = MetricScore::ok_score(
                "bleu_cumulative",
                lex::bleu(tokens_or_empty(r.predicted_query), tokens_or_empty(r.gold_query), k,
                          lex::BleuMode::cumulative));
            s.detail["k"] = std::to_string(k);
            return s;
        }));
    reg.register_measure(lexical_measure(
        "sp_bleu", Category::lexical, {Capability::parsed_ast},
        [](const EvalRecord& r, const EvalContext& ctx) {
            int k = ctx.option_int("sp_bleu", "k", 4);
            auto res = lex::sp_bleu(r.predicted_query, r.gold_query, k, ctx.prefix_map);
            MetricScore s = MetricScore::ok_score("sp_bleu", res.value);
            s.detail["k"] = std::to_string(k);
            if (res.parse_error)
                s.detail["parse_error"] = "true";
            return s;
        }));
    reg.register_measure(lexical_measure(
        "codebleu", Category::lexical, {Capability::parsed_ast},
        [](const EvalRecord& r, const EvalContext& ctx) {
            lex::CodeBleuParams params;
            params.prefixes = ctx.prefix_map;
            params.keyword_weight = ctx.option_double("codebleu", "keyword_weight", 5.0);
            params.ast_depth = ctx.option_int("codebleu", "ast_depth", 3);
            auto opts = ctx.metric_options("codebleu");
            if (opts.contains("weights") && opts["weights"].is_array() &&
                opts["weights"].size() == 4)
                for (int i = 0; i < 4; ++i)
                    params.weights[i] = opts["weights"][i].get<double>();
            auto b = lex::codebleu(r.predicted_query, r.gold_query, params);
            MetricScore s = MetricScore::ok_score("codebleu", b.combined);
            s.detail["ngram"] = fmt(b.ngram);
            s.detail["weighted_ngram"] = fmt(b.weighted_ngram);
            s.detail["ast_match"] = fmt(b.ast_match);
            s.detail["dataflow"] = fmt(b.dataflow);
            if (b.pred_parse_error)
                s.detail["parse_error"] = "true";
            return s;
        }));
    reg.register_measure(lexical_measure(
        "rouge_k", Category::lexical, {},
        [](const EvalRecord& r, const EvalContext& ctx) {
            int k = ctx.option_int("rouge_k", "k", 2);
            auto prf = lex::rouge(tokens_or_empty(r.predicted_query),
                                  tokens_or_empty(r.gold_query), k);
            MetricScore s = prf_component("rouge_k", prf, 2);
            s.detail["k"] = std::to_string(k);
            return s;
        }));
    reg.register_measure(lexical_measure(
        "meteor", Category::lexical, {},
        [](const EvalRecord& r, const EvalContext& ctx) {
            lex::MeteorParams params;
            params.synonyms = ctx.synonyms.get();
            return MetricScore::ok_score("meteor",
                                         lex::meteor(tokens_or_empty(r.predicted_query),
                                                     tokens_or_empty(r.gold_query), params));
        }));

    // --- structural -------------------------------------------------------
    reg.register_measure(lexical_measure(
        "uri_hallucination", Category::structural, {Capability::endpoint},
        [](const EvalRecord& r, const EvalContext& ctx) {
            if (!ctx.kb_oracle)
                return MetricScore::skipped("uri_hallucination", "no KB oracle configured");
            kb::HallucinationOptions opts;
            opts.prefixes = ctx.prefix_map;
            auto res = kb::uri_hallucination(r.predicted_query, *ctx.kb_oracle, opts);
            MetricScore s = MetricScore::ok_score("uri_hallucination", res.value);
            if (res.parse_error)
                s.detail["parse_error"] = "true";
            if (!res.missing.empty()) {
                std::string joined;
                for (const auto& iri : res.missing) {
                    if (!joined.empty())
                        joined += " ";
                    joined += iri;
                }
                s.detail["missing_iris"] = joined;
            }
            return s;
        }));

    // --- execution ---------------------------------------------------------
    reg.register_measure(lexical_measure(
        "query_execution", Category::execution, {Capability::endpoint},
        [](const EvalRecord& r, const EvalContext& ctx) {
            if (!ctx.endpoint)
                return MetricScore::skipped("query_execution", "no endpoint configured");
            auto outcome = ctx.execute(r.predicted_query);
            MetricScore s =
                MetricScore::ok_score("query_execution", kb::query_execution_success(outcome));
            s.detail["status"] = kb::exec_status_name(outcome.status);
            return s;
        }));
    for (int component = 0; component < 3; ++component) {
        const char* ids[] = {"precision_answers", "recall_answers", "f1_answers"};
        reg.register_measure(lexical_measure(
            ids[component], Category::execution, {Capability::endpoint, Capability::gold_answers},
            [component, id = std::string(ids[component])](const EvalRecord& r,
                                                          const EvalContext& ctx) {
                if (!ctx.endpoint)
                    return MetricScore::skipped(id, "no endpoint configured");
                auto outcome = ctx.execute(r.predicted_query);
                if (outcome.status != kb::ExecStatus::ok || !outcome.answers)
                    return MetricScore::error(id, "predicted query execution failed: " +
                                                      std::string(kb::exec_status_name(
                                                          outcome.status)));
                kb::AnswerCompareMode mode =
                    ctx.option_string(id, "mode", "value_set") == "row_set"
                        ? kb::AnswerCompareMode::row_set
                        : kb::AnswerCompareMode::value_set;
                auto prf = kb::answer_prf(*outcome.answers, gold_table(r, ctx), mode);
                return prf_component(id, prf, component);
            }));
    }
    reg.register_measure(lexical_measure(
        "f1_qald", Category::execution, {Capability::endpoint, Capability::gold_answers},
        [](const EvalRecord& r, const EvalContext& ctx) {
            if (!ctx.endpoint)
                return MetricScore::skipped("f1_qald", "no endpoint configured");
            auto outcome = ctx.execute(r.predicted_query);
            return MetricScore::ok_score("f1_qald", kb::f1_qald(outcome, gold_table(r, ctx)));
        }));
    reg.register_measure(lexical_measure(
        "f1_spinach", Category::execution, {Capability::endpoint, Capability::gold_answers},
        [](const EvalRecord& r, const EvalContext& ctx) {
            if (!ctx.endpoint)
                return MetricScore::skipped("f1_spinach", "no endpoint configured");
            auto outcome = ctx.execute(r.predicted_query);
            if (outcome.status != kb::ExecStatus::ok || !outcome.answers)
                return MetricScore::ok_score("f1_spinach", 0); // failed execution, QALD-style
            std::size_t cap = static_cast<std::size_t>(
                ctx.option_int("f1_spinach", "column_cap", 8));
            auto res = kb::f1_spinach(*outcome.answers, gold_table(r, ctx), cap);
            MetricScore s = MetricScore::ok_score("f1_spinach", res.f1);
            if (res.greedy)
                s.detail["greedy_column_matching"] = "true";
            return s;
        }));

    // --- ranking -----------------------------------------------------------
    reg.register_measure(lexical_measure(
        "hit_at_k", Category::ranking, {Capability::gold_answers, Capability::ranked_answers},
        [](const EvalRecord& r, const EvalContext& ctx) {
            int k = ctx.option_int("hit_at_k", "k", 10);
            MetricScore s = ranking_score("hit_at_k", r, ctx,
                                          [k](const ranking::RankedAnswers& ranked,
                                              const ranking::RelevantSet& rel) {
                                              return ranking::hit_at_k(ranked, rel, k);
                                          });
            s.detail["k"] = std::to_string(k);
            return s;
        }));
    reg.register_measure(lexical_measure(
        "precision_at_k", Category::ranking,
        {Capability::gold_answers, Capability::ranked_answers},
        [](const EvalRecord& r, const EvalContext& ctx) {
            int k = ctx.option_int("precision_at_k", "k", 10);
            MetricScore s = ranking_score("precision_at_k", r, ctx,
                                          [k](const ranking::RankedAnswers& ranked,
                                              const ranking::RelevantSet& rel) {
                                              return ranking::precision_at_k(ranked, rel, k);
                                          });
            s.detail["k"] = std::to_string(k);
            return s;
        }));
    reg.register_measure(lexical_measure(
        "mrr", Category::ranking, {Capability::gold_answers, Capability::ranked_answers},
        [](const EvalRecord& r, const EvalContext& ctx) {
            return ranking_score("mrr", r, ctx,
                                 [](const ranking::RankedAnswers& ranked,
                                    const ranking::RelevantSet& rel) {
                                     return ranking::mrr(ranked, rel);
                                 });
        }));
    reg.register_measure(lexical_measure(
        "ndcg_at_k", Category::ranking, {Capability::gold_answers, Capability::ranked_answers},
        [](const EvalRecord& r, const EvalContext& ctx) {
            int k = ctx.option_int("ndcg_at_k", "k", 10);
            MetricScore s = ranking_score("ndcg_at_k", r, ctx,
                                          [k](const ranking::RankedAnswers& ranked,
                                              const ranking::RelevantSet& rel) {
                                              return ranking::ndcg_at_k(ranked, rel, k);
                                          });
            s.detail["k"] = std::to_string(k);
            return s;
        }));

    // --- qualitative -------------------------------------------------------
    reg.register_measure(lexical_measure(
        "llm_judge", Category::qualitative, {Capability::llm},
        [](const EvalRecord& r, const EvalContext& ctx) {
            auto verdict = judge::judge(r.question.value_or(""), r.predicted_query, *ctx.llm,
                                        ctx.llm->include_gold_query ? r.gold_query : "");
            MetricScore s = MetricScore::ok_score("llm_judge", verdict.score);
            s.detail["reasoning"] = verdict.reasoning;
            s.detail["raw"] = verdict.raw;
            s.detail["parse_ok"] = verdict.parse_ok ? "true" : "false";
            return s;
        }));

    return reg;
}

inline const MeasureRegistry& default_registry() {
    static const MeasureRegistry reg = make_default_registry();
    return reg;
}

} // namespace sparqleval
