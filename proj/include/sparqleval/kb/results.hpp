#pragma once
// SPARQL JSON results parsing (application/sparql-results+json).

#include "sparqleval/kb/term.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>

namespace sparqleval::kb {

class ResultsParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline RdfTerm parse_result_cell(const nlohmann::json& cell, const std::string& path) {
    if (!cell.is_object() || !cell.contains("type") || !cell.contains("value"))
        throw ResultsParseError("malformed binding cell at " + path);
    const std::string type = cell["type"].get<std::string>();
    const std::string value = cell["value"].get<std::string>();
    if (type == "uri")
        return RdfTerm::iri(value);
    if (type == "bnode")
        return RdfTerm::blank(value);
    if (type == "literal" || type == "typed-literal") {
        RdfTerm t = RdfTerm::literal(value);
        if (cell.contains("datatype"))
            t.datatype = cell["datatype"].get<std::string>();
        if (cell.contains("xml:lang"))
            t.lang = cell["xml:lang"].get<std::string>();
        return t;
    }
    throw ResultsParseError("unknown term type '" + type + "' at " + path);
}

inline AnswerTable parse_results(const std::string& payload) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(payload);
    } catch (const nlohmann::json::parse_error& e) {
        throw ResultsParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ResultsParseError("root must be an object");

    if (doc.contains("boolean")) {
        if (!doc["boolean"].is_boolean())
            throw ResultsParseError("malformed value at /boolean");
        return AnswerTable::boolean(doc["boolean"].get<bool>());
    }

    if (!doc.contains("results"))
        throw ResultsParseError("missing key at /results");
    const auto& results = doc["results"];
    if (!results.is_object() || !results.contains("bindings") || !results["bindings"].is_array())
        throw ResultsParseError("missing or malformed array at /results/bindings");

    AnswerTable table;
    if (doc.contains("head") && doc["head"].is_object() && doc["head"].contains("vars")) {
        for (const auto& v : doc["head"]["vars"]) {
            if (!v.is_string())
                throw ResultsParseError("malformed entry at /head/vars");
            table.columns.push_back(v.get<std::string>());
        }
    }

    std::size_t index = 0;
    for (const auto& binding : results["bindings"]) {
        if (!binding.is_object())
            throw ResultsParseError("malformed row at /results/bindings/" +
                                    std::to_string(index));
        std::map<std::string, RdfTerm> row;
        for (auto it = binding.begin(); it != binding.end(); ++it) {
            row[it.key()] = parse_result_cell(
                it.value(), "/results/bindings/" + std::to_string(index) + "/" + it.key());
            // columns missing from the head still become addressable
            if (std::find(table.columns.begin(), table.columns.end(), it.key()) ==
                table.columns.end())
                table.columns.push_back(it.key());
        }
        table.rows.push_back(std::move(row));
        ++index;
    }
    return table;
}

} // namespace sparqleval::kb
