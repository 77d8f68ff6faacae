#pragma once
// Dataset ingestion: a JSON array of records with ids, question text, the
// gold and predicted queries, optional inline gold answers (SPARQL JSON
// results shape) and an optional predicted ranking. Validation errors name
// the record index; see data/dataset.schema.json for the exact schema.

#include "sparqleval/core.hpp"
#include "sparqleval/kb/results.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <string>
#include <vector>

namespace sparqleval::report {

class DatasetError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DatasetFile {
    std::vector<EvalRecord> records;
};

namespace dsdetail {

inline std::string at_record(std::size_t index) {
    return "record " + std::to_string(index) + ": ";
}

} // namespace dsdetail

inline DatasetFile parse_dataset(const nlohmann::json& doc) {
    if (!doc.is_array())
        throw DatasetError("dataset root must be a JSON array of records");
    DatasetFile out;
    std::set<std::string> seen_ids;
    std::size_t index = 0;
    for (const auto& item : doc) {
        const std::string where = dsdetail::at_record(index);
        if (!item.is_object())
            throw DatasetError(where + "must be an object");
        EvalRecord record;

        if (!item.contains("id") || !item["id"].is_string() ||
            item["id"].get<std::string>().empty())
            throw DatasetError(where + "missing or empty required key 'id'");
        record.id = item["id"].get<std::string>();
        if (!seen_ids.insert(record.id).second)
            throw DatasetError(where + "duplicate id '" + record.id + "'");

        if (!item.contains("gold_query") || !item["gold_query"].is_string() ||
            item["gold_query"].get<std::string>().empty())
            throw DatasetError(where + "missing or empty required key 'gold_query'");
        record.gold_query = item["gold_query"].get<std::string>();

        if (!item.contains("predicted_query") || !item["predicted_query"].is_string())
            throw DatasetError(where + "missing required key 'predicted_query'");
        record.predicted_query = item["predicted_query"].get<std::string>();

        if (item.contains("question")) {
            if (!item["question"].is_string())
                throw DatasetError(where + "'question' must be a string");
            record.question = item["question"].get<std::string>();
        }

        if (item.contains("gold_answers") && !item["gold_answers"].is_null()) {
            try {
                record.gold_answers = kb::parse_results(item["gold_answers"].dump());
            } catch (const kb::ResultsParseError& e) {
                throw DatasetError(where + "invalid gold_answers: " + e.what());
            }
        }

        if (item.contains("ranked_answers") && !item["ranked_answers"].is_null()) {
            if (!item["ranked_answers"].is_array())
                throw DatasetError(where + "'ranked_answers' must be an array of term objects");
            std::vector<kb::RdfTerm> ranked;
            std::size_t cell_index = 0;
            for (const auto& cell : item["ranked_answers"]) {
                try {
                    ranked.push_back(
                        kb::parse_result_cell(cell, "ranked_answers/" + std::to_string(cell_index)));
                } catch (const kb::ResultsParseError& e) {
                    throw DatasetError(where + e.what());
                }
                ++cell_index;
            }
            record.ranked_answers = std::move(ranked);
        }

        out.records.push_back(std::move(record));
        ++index;
    }
    return out;
}

inline DatasetFile load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DatasetError("cannot open dataset file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw DatasetError(std::string("dataset is not valid JSON: ") + e.what());
    }
    return parse_dataset(doc);
}

} // namespace sparqleval::report
