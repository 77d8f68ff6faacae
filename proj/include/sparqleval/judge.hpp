#pragma once
// LLM-as-a-judge: prompts a chat-completion-style HTTP service to score a
// predicted query for the question, expects a JSON verdict {"score",
// "reasoning"} and degrades to score 0 when the reply cannot be parsed or
// the service cannot be reached.

#include "httplib.h"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

namespace sparqleval::judge {

inline const std::string& default_system_prompt() {
    static const std::string prompt =
        "You are a SPARQL expert. Score the given query from 0.0 to 1.0 based on "
        "correctness, efficiency, readability, and adherence to best practices. "
        "Reply with JSON: {\"score\": <number>, \"reasoning\": <string>}.";
    return prompt;
}

struct JudgeConfig {
    std::string base_url;       // full endpoint URL; path defaults to /v1/chat/completions
    std::string model = "default";
    std::string system_prompt = default_system_prompt();
    double temperature = 0;
    double timeout_seconds = 60;
    int max_retries = 1;
    bool include_gold_query = false; // off by default: the judge sees question + query only
};

struct PromptPayload {
    std::string system;
    std::string user;

    nlohmann::ordered_json to_request(const JudgeConfig& cfg) const {
        nlohmann::ordered_json body;
        body["model"] = cfg.model;
        body["temperature"] = cfg.temperature;
        body["messages"] = nlohmann::ordered_json::array(
            {{{"role", "system"}, {"content", system}}, {{"role", "user"}, {"content", user}}});
        return body;
    }
};

struct JudgeVerdict {
    double score = 0;
    std::string reasoning;
    std::string raw;      // verbatim model output
    bool parse_ok = false;
};

inline PromptPayload build_judge_prompt(const std::string& question,
                                        const std::string& predicted_query,
                                        const JudgeConfig& cfg,
                                        const std::string& gold_query = "") {
    PromptPayload payload;
    payload.system = cfg.system_prompt;
    std::string user = "Question: ";
    user += question.empty() ? "(no question provided)" : question;
    user += "\n\nSPARQL query:\n" + predicted_query;
    if (cfg.include_gold_query && !gold_query.empty())
        user += "\n\nReference query:\n" + gold_query;
    user += "\n\nReply with a JSON object {\"score\": number, \"reasoning\": string} and "
            "nothing else.";
    payload.user = user;
    return payload;
}

namespace judgedetail {

// first balanced {...} span starting at `from`, string- and escape-aware
inline std::optional<std::string> balanced_object(const std::string& text, std::size_t from) {
    int depth = 0;
    bool in_string = false, escaped = false;
    for (std::size_t i = from; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"')
            in_string = true;
        else if (c == '{')
            ++depth;
        else if (c == '}') {
            --depth;
            if (depth == 0)
                return text.substr(from, i - from + 1);
            if (depth < 0)
                return std::nullopt;
        }
    }
    return std::nullopt;
}

} // namespace judgedetail

// Extracts the first JSON object with a numeric "score" from the raw model
// output (prose and code fences around it are fine), clamping the score into
// [0,1]. Anything else yields the parse_error verdict with score 0.
inline JudgeVerdict parse_judge_response(const std::string& raw) {
    JudgeVerdict verdict;
    verdict.raw = raw;
    for (std::size_t at = raw.find('{'); at != std::string::npos; at = raw.find('{', at + 1)) {
        auto candidate = judgedetail::balanced_object(raw, at);
        if (!candidate)
            continue;
        nlohmann::json doc = nlohmann::json::parse(*candidate, nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("score") ||
            !doc["score"].is_number())
            continue;
        double score = doc["score"].get<double>();
        if (std::isnan(score))
            continue;
        verdict.score = std::clamp(score, 0.0, 1.0);
        verdict.parse_ok = true;
        if (doc.contains("reasoning") && doc["reasoning"].is_string())
            verdict.reasoning = doc["reasoning"].get<std::string>();
        return verdict;
    }
    verdict.score = 0;
    verdict.parse_ok = false;
    verdict.reasoning = "parse_error";
    return verdict;
}

namespace judgedetail {

struct SplitUrl {
    std::string base;
    std::string path;
};

inline SplitUrl split_judge_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t path_start =
        scheme_end == std::string::npos ? url.find('/') : url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {url, "/v1/chat/completions"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

// content extraction for chat-completion style responses, with fallbacks for
// simpler servers
inline std::string response_content(const std::string& body) {
    nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
    if (!doc.is_discarded() && doc.is_object()) {
        if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
            const auto& first = doc["choices"][0];
            if (first.contains("message") && first["message"].contains("content") &&
                first["message"]["content"].is_string())
                return first["message"]["content"].get<std::string>();
            if (first.contains("text") && first["text"].is_string())
                return first["text"].get<std::string>();
        }
        if (doc.contains("message") && doc["message"].is_object() &&
            doc["message"].contains("content") && doc["message"]["content"].is_string())
            return doc["message"]["content"].get<std::string>();
        if (doc.contains("response") && doc["response"].is_string())
            return doc["response"].get<std::string>();
    }
    return body;
}

} // namespace judgedetail

inline JudgeVerdict judge(const std::string& question, const std::string& predicted_query,
                          const JudgeConfig& cfg, const std::string& gold_query = "") {
    std::string base_url = cfg.base_url;
    if (const char* env = std::getenv("SPARQLEVAL_JUDGE_URL"); env && *env)
        base_url = env;

    JudgeVerdict failure;
    failure.score = 0;
    failure.parse_ok = false;
    failure.reasoning = "transport_error";

    if (base_url.empty()) {
        failure.raw = "no judge endpoint configured";
        return failure;
    }

    const auto url = judgedetail::split_judge_url(base_url);
    httplib::Client client(url.base);
    const auto timeout_ms =
        std::chrono::milliseconds(static_cast<long long>(cfg.timeout_seconds * 1000));
    client.set_connection_timeout(timeout_ms);
    client.set_read_timeout(timeout_ms);

    const auto payload = build_judge_prompt(question, predicted_query, cfg, gold_query);
    const std::string body = payload.to_request(cfg).dump();

    httplib::Result res;
    const int attempts = std::max(1, cfg.max_retries + 1);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        res = client.Post(url.path, body, "application/json");
        if (res)
            break;
    }
    if (!res) {
        failure.raw = httplib::to_string(res.error());
        return failure;
    }
    if (res->status < 200 || res->status >= 300) {
        failure.raw = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500);
        return failure;
    }
    return parse_judge_response(judgedetail::response_content(res->body));
}

} // namespace sparqleval::judge
