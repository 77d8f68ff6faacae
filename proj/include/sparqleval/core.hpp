#pragma once
// Shared data model: evaluation records, metric scores, the measure registry
// and the dataset orchestrator. Measures are pure given (record, context)
// apart from endpoint/LLM calls, so records can be evaluated concurrently.

#include "sparqleval/judge.hpp"
#include "sparqleval/kb/endpoint.hpp"
#include "sparqleval/kb/oracle.hpp"
#include "sparqleval/metrics/lexical.hpp"
#include "sparqleval/sparql/normalize.hpp"

#include "json.hpp"

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace sparqleval {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct EvalRecord {
    std::string id;
    std::optional<std::string> question;
    std::string gold_query;
    std::string predicted_query; // may be empty: the model produced nothing
    std::optional<kb::AnswerTable> gold_answers;
    std::optional<std::vector<kb::RdfTerm>> ranked_answers;
};

enum class ScoreStatus { ok, skipped, error };

inline const char* score_status_name(ScoreStatus s) {
    switch (s) {
    case ScoreStatus::ok: return "ok";
    case ScoreStatus::skipped: return "skipped";
    case ScoreStatus::error: return "error";
    }
    return "unknown";
}

struct MetricScore {
    std::string metric_id;
    double value = 0;
    std::pair<double, double> range{0.0, 1.0};
    std::map<std::string, std::string> detail;
    ScoreStatus status = ScoreStatus::ok;
    std::string message;

    static MetricScore ok_score(std::string id, double value) {
        MetricScore s;
        s.metric_id = std::move(id);
        s.value = value;
        return s;
    }
    static MetricScore skipped(std::string id, std::string why) {
        MetricScore s;
        s.metric_id = std::move(id);
        s.status = ScoreStatus::skipped;
        s.message = std::move(why);
        return s;
    }
    static MetricScore error(std::string id, std::string why) {
        MetricScore s;
        s.metric_id = std::move(id);
        s.status = ScoreStatus::error;
        s.message = std::move(why);
        return s;
    }
};

enum class Category { lexical, structural, execution, ranking, qualitative };

inline const char* category_name(Category c) {
    switch (c) {
    case Category::lexical: return "lexical";
    case Category::structural: return "structural";
    case Category::execution: return "execution";
    case Category::ranking: return "ranking";
    case Category::qualitative: return "qualitative";
    }
    return "unknown";
}

enum class Capability { parsed_ast, endpoint, gold_answers, ranked_answers, llm };

inline const char* capability_name(Capability c) {
    switch (c) {
    case Capability::parsed_ast: return "parsed_ast";
    case Capability::endpoint: return "endpoint";
    case Capability::gold_answers: return "gold_answers";
    case Capability::ranked_answers: return "ranked_answers";
    case Capability::llm: return "llm";
    }
    return "unknown";
}

struct EvalContext {
    std::optional<kb::EndpointConfig> endpoint;
    sparql::PrefixMap prefix_map = sparql::builtin_prefix_map();
    std::optional<judge::JudgeConfig> llm;
    nlohmann::json options = nlohmann::json::object(); // per-metric parameter map
    std::shared_ptr<kb::MembershipOracle> kb_oracle;   // file- or endpoint-backed
    std::shared_ptr<kb::ExecutionCache> exec_cache = std::make_shared<kb::ExecutionCache>();
    std::shared_ptr<kb::TraceLog> trace;
    std::shared_ptr<lexical::SynonymTable> synonyms;
    std::shared_ptr<kb::ConcurrencyLimiter> endpoint_limiter; // set up by evaluate_dataset
    int concurrency = 1;

    kb::ExecutionOutcome execute(const std::string& query) const {
        kb::ConcurrencyLimiter::Guard guard(endpoint_limiter.get());
        return exec_cache->fetch(*endpoint, query, trace.get());
    }

    nlohmann::json metric_options(const std::string& metric_id) const {
        if (options.is_object() && options.contains(metric_id))
            return options.at(metric_id);
        return nlohmann::json::object();
    }
    int option_int(const std::string& metric_id, const std::string& key, int fallback) const {
        auto opts = metric_options(metric_id);
        if (opts.contains(key) && opts[key].is_number())
            return opts[key].get<int>();
        return fallback;
    }
    double option_double(const std::string& metric_id, const std::string& key,
                         double fallback) const {
        auto opts = metric_options(metric_id);
        if (opts.contains(key) && opts[key].is_number())
            return opts[key].get<double>();
        return fallback;
    }
    std::string option_string(const std::string& metric_id, const std::string& key,
                              std::string fallback) const {
        auto opts = metric_options(metric_id);
        if (opts.contains(key) && opts[key].is_string())
            return opts[key].get<std::string>();
        return fallback;
    }
};

struct MeasureSpec {
    std::string metric_id;
    Category category = Category::lexical;
    std::set<Capability> needs;
    std::function<MetricScore(const EvalRecord&, const EvalContext&)> compute;
};

class MeasureRegistry {
  public:
    void register_measure(MeasureSpec spec) {
        if (measures_.count(spec.metric_id))
            throw ConfigError("measure id already registered: " + spec.metric_id);
        measures_.emplace(spec.metric_id, std::move(spec));
    }
    std::vector<MeasureSpec> list() const { // sorted by metric_id (map order)
        std::vector<MeasureSpec> out;
        for (const auto& [id, spec] : measures_)
            out.push_back(spec);
        return out;
    }
    const MeasureSpec* find(const std::string& id) const {
        auto it = measures_.find(id);
        return it == measures_.end() ? nullptr : &it->second;
    }
    std::size_t size() const { return measures_.size(); }

  private:
    std::map<std::string, MeasureSpec> measures_;
};

inline MeasureRegistry& register_measure(MeasureSpec spec, MeasureRegistry& registry) {
    registry.register_measure(std::move(spec));
    return registry;
}

inline std::vector<MeasureSpec> list_measures(const MeasureRegistry& registry) {
    return registry.list();
}

struct RecordScores {
    std::string id;
    std::map<std::string, MetricScore> scores;
};

struct EvalReport {
    std::vector<std::string> metric_ids; // sorted selection
    std::vector<RecordScores> rows;      // input order
};

namespace coredetail {

// Context-level capability availability; a KB oracle stands in for the
// endpoint (execution measures re-check for a real endpoint and skip).
inline bool capability_available(Capability c, const EvalRecord& record,
                                 const EvalContext& ctx) {
    switch (c) {
    case Capability::parsed_ast:
        return true;
    case Capability::endpoint:
        return ctx.endpoint.has_value() || ctx.kb_oracle != nullptr;
    case Capability::gold_answers:
        return record.gold_answers.has_value() || ctx.endpoint.has_value();
    case Capability::ranked_answers:
        return record.ranked_answers.has_value() || ctx.endpoint.has_value();
    case Capability::llm:
        return ctx.llm.has_value();
    }
    return false;
}

inline std::optional<Capability> missing_capability(const MeasureSpec& spec,
                                                    const EvalRecord& record,
                                                    const EvalContext& ctx) {
    for (Capability c : spec.needs)
        if (!capability_available(c, record, ctx))
            return c;
    return std::nullopt;
}

} // namespace coredetail

// Runs the selected measures over all records. Unknown measure ids fail
// before any computation; a missing capability turns into skipped scores; a
// record-level failure is contained as status=error and never aborts the run.
inline EvalReport evaluate_dataset(const std::vector<EvalRecord>& records,
                                   const std::vector<std::string>& measure_ids,
                                   const EvalContext& context, const MeasureRegistry& registry) {
    std::vector<std::string> selected(measure_ids.begin(), measure_ids.end());
    std::sort(selected.begin(), selected.end());
    selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
    for (const auto& id : selected)
        if (!registry.find(id))
            throw ConfigError("unknown measure id: " + id);

    EvalContext ctx = context;
    if (ctx.endpoint && !ctx.endpoint_limiter)
        ctx.endpoint_limiter =
            std::make_shared<kb::ConcurrencyLimiter>(ctx.endpoint->concurrency_limit);
    if (!ctx.kb_oracle && ctx.endpoint)
        ctx.kb_oracle = std::make_shared<kb::EndpointMembershipOracle>(
            *ctx.endpoint, ctx.trace.get(), ctx.endpoint_limiter);

    EvalReport report;
    report.metric_ids = selected;
    report.rows.resize(records.size());

    auto evaluate_record = [&](std::size_t index) {
        const EvalRecord& record = records[index];
        RecordScores row;
        row.id = record.id;
        for (const auto& id : selected) {
            const MeasureSpec& spec = *registry.find(id);
            if (auto missing = coredetail::missing_capability(spec, record, ctx)) {
                row.scores.emplace(id, MetricScore::skipped(
                                           id, std::string("missing capability: ") +
                                                   capability_name(*missing)));
                continue;
            }
            MetricScore score;
            try {
                score = spec.compute(record, ctx);
            } catch (const std::exception& e) {
                score = MetricScore::error(id, e.what());
            }
            score.metric_id = id;
            if (score.status == ScoreStatus::ok &&
                (score.value < score.range.first || score.value > score.range.second))
                score = MetricScore::error(id, "metric value out of declared range");
            row.scores.emplace(id, std::move(score));
        }
        report.rows[index] = std::move(row);
    };

    const int threads = std::max(1, ctx.concurrency);
    if (threads == 1 || records.size() <= 1) {
        for (std::size_t i = 0; i < records.size(); ++i)
            evaluate_record(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int used = std::min<int>(threads, static_cast<int>(records.size()));
        pool.reserve(used);
        for (int t = 0; t < used; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < records.size();
                     i = next.fetch_add(1))
                    evaluate_record(i);
            });
        for (auto& th : pool)
            th.join();
    }
    return report;
}

} // namespace sparqleval
