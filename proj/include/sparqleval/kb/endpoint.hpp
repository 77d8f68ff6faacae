#pragma once
// SPARQL protocol client: issues queries over HTTP requesting JSON results,
// with bounded retries on transport failures only. All failures become
// ExecutionOutcome statuses rather than exceptions, and every interaction
// can be appended to a JSON-lines trace file for replay.

#include "sparqleval/kb/results.hpp"

#include "httplib.h"
#include "json.hpp"

#include <chrono>
#include <condition_variable>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

namespace sparqleval::kb {

struct EndpointConfig {
    std::string url;                 // absolute http(s) address
    double timeout_seconds = 30.0;
    int max_retries = 2;
    std::map<std::string, std::string> headers;
    int concurrency_limit = 4;
    bool use_get = false; // default: POST with urlencoded body
};

enum class ExecStatus { ok, syntax_rejected, http_error, timeout };

struct ExecutionOutcome {
    ExecStatus status = ExecStatus::http_error;
    std::optional<AnswerTable> answers; // present iff status == ok
    std::string error_message;
    std::chrono::milliseconds latency{0};
};

inline const char* exec_status_name(ExecStatus s) {
    switch (s) {
    case ExecStatus::ok: return "ok";
    case ExecStatus::syntax_rejected: return "syntax_rejected";
    case ExecStatus::http_error: return "http_error";
    case ExecStatus::timeout: return "timeout";
    }
    return "unknown";
}

// Append-only JSON-lines log of endpoint interactions.
class TraceLog {
  public:
    explicit TraceLog(const std::string& path) : out_(path, std::ios::app), path_(path) {
        if (!out_)
            throw std::runtime_error("cannot open trace file: " + path);
    }
    void record(const std::string& kind, const std::string& query, const ExecutionOutcome& outcome,
                int http_status) {
        nlohmann::ordered_json line;
        line["kind"] = kind;
        line["query"] = query;
        line["status"] = exec_status_name(outcome.status);
        line["http_status"] = http_status;
        line["latency_ms"] = outcome.latency.count();
        if (!outcome.error_message.empty())
            line["error"] = outcome.error_message;
        std::lock_guard<std::mutex> lock(mutex_);
        out_ << line.dump() << "\n";
        out_.flush();
    }
    const std::string& path() const { return path_; }

  private:
    std::ofstream out_;
    std::string path_;
    std::mutex mutex_;
};

namespace epdetail {

struct SplitUrl {
    std::string base; // scheme://host:port
    std::string path; // at least "/"
};

inline SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t path_start =
        scheme_end == std::string::npos ? url.find('/') : url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace epdetail

inline ExecutionOutcome execute_query(const EndpointConfig& endpoint, const std::string& query,
                                      TraceLog* trace = nullptr) {
    using clock = std::chrono::steady_clock;
    const auto url = epdetail::split_url(endpoint.url);
    const auto started = clock::now();

    ExecutionOutcome outcome;
    int http_status = 0;

    httplib::Client client(url.base);
    const auto timeout_ms =
        std::chrono::milliseconds(static_cast<long long>(endpoint.timeout_seconds * 1000));
    client.set_connection_timeout(timeout_ms);
    client.set_read_timeout(timeout_ms);
    client.set_write_timeout(timeout_ms);

    httplib::Headers headers{{"Accept", "application/sparql-results+json"}};
    for (const auto& [k, v] : endpoint.headers)
        headers.emplace(k, v);

    int attempts = std::max(1, endpoint.max_retries + 1);
    httplib::Result res;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (endpoint.use_get) {
            std::string target =
                url.path + "?query=" + httplib::detail::encode_query_param(query);
            res = client.Get(target, headers);
        } else {
            httplib::Params params{{"query", query}};
            res = client.Post(url.path, headers, params);
        }
        if (res) // endpoint answered; endpoint-reported errors are not retried
            break;
    }

    outcome.latency =
        std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - started);

    if (!res) {
        auto err = res.error();
        bool timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                         err == httplib::Error::Write;
        outcome.status = timed_out ? ExecStatus::timeout : ExecStatus::http_error;
        outcome.error_message = httplib::to_string(err);
    } else {
        http_status = res->status;
        if (res->status >= 200 && res->status < 300) {
            try {
                outcome.answers = parse_results(res->body);
                outcome.status = ExecStatus::ok;
            } catch (const ResultsParseError& e) {
                outcome.status = ExecStatus::http_error;
                outcome.error_message = e.what();
            }
        } else if (res->status == 400) {
            outcome.status = ExecStatus::syntax_rejected;
            outcome.error_message = res->body.substr(0, 2000);
        } else {
            outcome.status = ExecStatus::http_error;
            outcome.error_message =
                "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500);
        }
    }

    if (trace)
        trace->record("query", query, outcome, http_status);
    return outcome;
}

// Bounds in-flight endpoint requests to EndpointConfig.concurrency_limit.
class ConcurrencyLimiter {
  public:
    explicit ConcurrencyLimiter(int limit) : limit_(std::max(1, limit)) {}

    struct Guard {
        ConcurrencyLimiter* limiter;
        explicit Guard(ConcurrencyLimiter* l) : limiter(l) {
            if (limiter)
                limiter->acquire();
        }
        ~Guard() {
            if (limiter)
                limiter->release();
        }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;
    };

  private:
    void acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return active_ < limit_; });
        ++active_;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            --active_;
        }
        cv_.notify_one();
    }

    int limit_;
    int active_ = 0;
    std::mutex mutex_;
    std::condition_variable cv_;
};

// Per-run cache of execution outcomes keyed by query text; shared by the
// measures so each distinct query runs once.
class ExecutionCache {
  public:
    ExecutionOutcome fetch(const EndpointConfig& endpoint, const std::string& query,
                           TraceLog* trace = nullptr) {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(query);
            if (it != cache_.end())
                return it->second;
        }
        ExecutionOutcome outcome = execute_query(endpoint, query, trace);
        std::lock_guard<std::mutex> lock(mutex_);
        return cache_.emplace(query, std::move(outcome)).first->second;
    }

  private:
    std::unordered_map<std::string, ExecutionOutcome> cache_;
    std::mutex mutex_;
};

} // namespace sparqleval::kb
