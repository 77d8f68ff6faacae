#pragma once
// KB membership oracles for the URI-hallucination check. Two backends: ASK
// probing against a live endpoint (cached per run) and a file with one
// absolute IRI per line for offline, reproducible runs.

#include "sparqleval/kb/endpoint.hpp"

#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <unordered_map>

namespace sparqleval::kb {

class OracleUnreachableError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class MembershipOracle {
  public:
    virtual ~MembershipOracle() = default;
    // true iff the KB mentions the IRI anywhere; throws OracleUnreachableError
    // when the answer cannot be obtained.
    virtual bool contains(const std::string& iri) = 0;
};

class FileMembershipOracle : public MembershipOracle {
  public:
    explicit FileMembershipOracle(std::set<std::string> iris) : iris_(std::move(iris)) {}

    static FileMembershipOracle from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open IRI set file: " + path);
        std::set<std::string> iris;
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
                line.pop_back();
            if (!line.empty())
                iris.insert(line);
        }
        return FileMembershipOracle(std::move(iris));
    }

    bool contains(const std::string& iri) override { return iris_.count(iri) > 0; }
    std::size_t size() const { return iris_.size(); }

  private:
    std::set<std::string> iris_;
};

// One ASK probe per distinct IRI, subject/predicate/object union, cached for
// the run.
inline bool kb_contains(const EndpointConfig& endpoint, const std::string& iri,
                        TraceLog* trace = nullptr) {
    const std::string ask = "ASK { { <" + iri + "> ?p ?o } UNION { ?s <" + iri +
                            "> ?o } UNION { ?s ?p <" + iri + "> } }";
    ExecutionOutcome outcome = execute_query(endpoint, ask, trace);
    if (outcome.status != ExecStatus::ok || !outcome.answers ||
        outcome.answers->kind != AnswerTable::Kind::boolean)
        throw OracleUnreachableError("membership probe failed for <" + iri +
                                     ">: " + outcome.error_message);
    return outcome.answers->boolean_value;
}

class EndpointMembershipOracle : public MembershipOracle {
  public:
    explicit EndpointMembershipOracle(EndpointConfig endpoint, TraceLog* trace = nullptr,
                                      std::shared_ptr<ConcurrencyLimiter> limiter = nullptr)
        : endpoint_(std::move(endpoint)), trace_(trace), limiter_(std::move(limiter)) {}

    bool contains(const std::string& iri) override {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(iri);
            if (it != cache_.end())
                return it->second;
        }
        bool present;
        {
            ConcurrencyLimiter::Guard guard(limiter_.get());
            present = kb_contains(endpoint_, iri, trace_);
        }
        std::lock_guard<std::mutex> lock(mutex_);
        return cache_.emplace(iri, present).first->second;
    }

  private:
    EndpointConfig endpoint_;
    TraceLog* trace_;
    std::shared_ptr<ConcurrencyLimiter> limiter_;
    std::unordered_map<std::string, bool> cache_;
    std::mutex mutex_;
};

} // namespace sparqleval::kb
