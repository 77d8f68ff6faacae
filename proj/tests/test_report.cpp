#include <catch2/catch_amalgamated.hpp>

#include "sparqleval/builtin.hpp"
#include "sparqleval/report/emit.hpp"

#include "support/oracles.hpp"

#include <cstdio>
#include <fstream>
#include <random>

using namespace sparqleval;
using report::AggregateRow;
using report::CorrelationMatrix;

namespace {

std::string data_path(const std::string& name) {
    return std::string(SPARQLEVAL_TEST_DATA_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// minimal well-formedness scan: tags balance and nest properly
bool xml_well_formed(const std::string& text) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    while ((i = text.find('<', i)) != std::string::npos) {
        std::size_t end = text.find('>', i);
        if (end == std::string::npos)
            return false;
        std::string tag = text.substr(i + 1, end - i - 1);
        i = end + 1;
        if (tag.empty())
            return false;
        if (tag[0] == '?' || tag[0] == '!')
            continue;
        if (tag.back() == '/')
            continue; // self-closing
        if (tag[0] == '/') {
            std::string name = tag.substr(1);
            if (stack.empty() || stack.back() != name)
                return false;
            stack.pop_back();
        } else {
            std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
            stack.push_back(name);
        }
    }
    return stack.empty();
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t at = text.find(needle); at != std::string::npos;
         at = text.find(needle, at + needle.size()))
        ++count;
    return count;
}

EvalReport synthetic_report(int records) {
    // three hand-made columns: y = x scaled, z = anti-correlated with x
    EvalReport report;
    report.metric_ids = {"mx", "my", "mz"};
    for (int i = 0; i < records; ++i) {
        RecordScores row;
        row.id = "r" + std::to_string(i);
        double x = static_cast<double>(i % 5) / 4.0;
        row.scores.emplace("mx", MetricScore::ok_score("mx", x));
        row.scores.emplace("my", MetricScore::ok_score("my", 0.5 + x / 2));
        row.scores.emplace("mz", MetricScore::ok_score("mz", 1.0 - x));
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace

TEST_CASE("load_dataset happy path") {
    auto dataset = report::load_dataset(data_path("demo_dataset.json"));
    REQUIRE(dataset.records.size() == 10);
    CHECK(dataset.records[0].id == "q01");
    CHECK(dataset.records[8].predicted_query.empty());
    REQUIRE(dataset.records[8].gold_answers.has_value());
    CHECK(dataset.records[8].gold_answers->rows.size() == 2);
    REQUIRE(dataset.records[8].ranked_answers.has_value());
    CHECK(dataset.records[8].ranked_answers->size() == 3);
}

TEST_CASE("load_dataset validation errors name the offender") {
    auto check_error = [](const char* json, const char* fragment) {
        try {
            report::parse_dataset(nlohmann::json::parse(json));
            FAIL("expected DatasetError");
        } catch (const report::DatasetError& e) {
            INFO(e.what());
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };
    check_error(R"({"not": "an array"})", "array");
    check_error(R"([{"id": "a", "gold_query": "ASK { }", "predicted_query": ""},
                    {"id": "a", "gold_query": "ASK { }", "predicted_query": ""}])",
                "duplicate id 'a'");
    check_error(R"([{"id": "a", "gold_query": "ASK { }"}])", "predicted_query");
    check_error(R"([{"id": "a", "predicted_query": ""}])", "record 0");
    check_error(R"([{"id": "", "gold_query": "ASK { }", "predicted_query": ""}])", "id");
    CHECK_THROWS_AS(report::load_dataset(data_path("missing.json")), report::DatasetError);
}

TEST_CASE("aggregate means and counts") {
    EvalReport report;
    report.metric_ids = {"m"};
    for (int i = 0; i < 4; ++i) {
        RecordScores row;
        row.id = "r" + std::to_string(i);
        if (i < 2)
            row.scores.emplace("m", MetricScore::ok_score("m", i == 0 ? 1.0 : 0.0));
        else if (i == 2)
            row.scores.emplace("m", MetricScore::error("m", "boom"));
        else
            row.scores.emplace("m", MetricScore::skipped("m", "no endpoint"));
        report.rows.push_back(std::move(row));
    }
    auto rows = report::aggregate(report);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean == 0.5); // errors and skips stay out of the mean
    CHECK(rows[0].count_ok == 2);
    CHECK(rows[0].count_error == 1);
    CHECK(rows[0].count_skipped == 1);
    CHECK(rows[0].count_ok + rows[0].count_error + rows[0].count_skipped ==
          static_cast<int>(report.rows.size()));

    // all skipped -> undefined mean
    EvalReport skipped;
    skipped.metric_ids = {"m"};
    RecordScores row;
    row.id = "r";
    row.scores.emplace("m", MetricScore::skipped("m", "x"));
    skipped.rows.push_back(row);
    CHECK_FALSE(report::aggregate(skipped)[0].mean.has_value());
}

TEST_CASE("correlation matrix basics") {
    EvalReport report;
    report.metric_ids = {"x", "y", "zconst"};
    double xs[] = {0, 1, 0, 1};
    double ys[] = {1, 0, 1, 0};
    for (int i = 0; i < 4; ++i) {
        RecordScores row;
        row.id = "r" + std::to_string(i);
        row.scores.emplace("x", MetricScore::ok_score("x", xs[i]));
        row.scores.emplace("y", MetricScore::ok_score("y", ys[i]));
        row.scores.emplace("zconst", MetricScore::ok_score("zconst", 0.5));
        report.rows.push_back(std::move(row));
    }
    auto matrix = report::correlation_matrix(report);
    REQUIRE(matrix.metric_ids == std::vector<std::string>{"x", "y", "zconst"});
    CHECK(matrix.values[0][0] == 1.0); // self-correlation of a non-constant column
    CHECK(matrix.defined[0][0]);
    CHECK(matrix.values[0][1] == Catch::Approx(-1.0)); // perfectly anti-correlated
    CHECK(matrix.values[1][0] == matrix.values[0][1]);
    CHECK_FALSE(matrix.defined[2][2]); // constant column is undefined, rendered 0
    CHECK(matrix.values[2][2] == 0.0);
    CHECK_FALSE(matrix.defined[0][2]);

    // clustering permutation is a bijection
    std::set<std::size_t> seen(matrix.order.begin(), matrix.order.end());
    CHECK(seen.size() == matrix.metric_ids.size());

    EvalReport tiny;
    tiny.metric_ids = {"x"};
    tiny.rows.resize(1);
    CHECK_THROWS_AS(report::correlation_matrix(tiny), std::invalid_argument);
}

TEST_CASE("pearson matches the two-pass covariance reference") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> value(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        EvalReport report;
        report.metric_ids = {"a", "b"};
        std::vector<double> xs, ys;
        for (int i = 0; i < 10; ++i) {
            RecordScores row;
            row.id = "r" + std::to_string(i);
            double x = value(rng), y = value(rng);
            xs.push_back(x);
            ys.push_back(y);
            row.scores.emplace("a", MetricScore::ok_score("a", x));
            row.scores.emplace("b", MetricScore::ok_score("b", y));
            report.rows.push_back(std::move(row));
        }
        auto matrix = report::correlation_matrix(report);
        auto expected = testsupport::ref_pearson(xs, ys);
        REQUIRE(expected.has_value());
        CHECK(matrix.values[0][1] == Catch::Approx(*expected).margin(1e-9));
    }
}

TEST_CASE("clustering groups correlated metrics adjacently") {
    // mx and my move together; mz moves against them
    auto report = synthetic_report(10);
    auto matrix = report::correlation_matrix(report);
    std::size_t pos_x = 0, pos_y = 0;
    for (std::size_t i = 0; i < matrix.order.size(); ++i) {
        if (matrix.metric_ids[matrix.order[i]] == "mx")
            pos_x = i;
        if (matrix.metric_ids[matrix.order[i]] == "my")
            pos_y = i;
    }
    CHECK((pos_x + 1 == pos_y || pos_y + 1 == pos_x));
}

TEST_CASE("csv emission shape and quoting") {
    EvalReport report;
    report.metric_ids = {"m1", "m2", "m3"};
    for (int i = 0; i < 2; ++i) {
        RecordScores row;
        row.id = i == 0 ? "plain" : "needs,\"quoting\"";
        row.scores.emplace("m1", MetricScore::ok_score("m1", 0.5));
        row.scores.emplace("m2", MetricScore::skipped("m2", "x"));
        row.scores.emplace("m3", MetricScore::ok_score("m3", 1));
        report.rows.push_back(std::move(row));
    }
    std::string csv = report::report_to_csv(report);
    // 3 lines: header + 2 records; 4 columns: id + 3 metrics
    CHECK(count_occurrences(csv, "\r\n") == 3);
    std::string header = csv.substr(0, csv.find("\r\n"));
    CHECK(header == "id,m1,m2,m3");
    CHECK(csv.find("plain,0.5,,1") != std::string::npos);
    CHECK(csv.find("\"needs,\"\"quoting\"\"\",0.5,,1") != std::string::npos);
}

TEST_CASE("json report round trips") {
    EvalContext ctx;
    auto dataset = report::load_dataset(data_path("demo_dataset.json"));
    auto report = evaluate_dataset(dataset.records,
                                   {"f1_token", "jaccard_token", "sp_bleu", "exact_match_token"},
                                   ctx, default_registry());

    std::string path = data_path("tmp_report.json");
    report::emit_report(report, report::ReportFormat::json, path, "demo");
    auto loaded = report::load_report(path);
    CHECK(loaded.system == "demo");
    REQUIRE(loaded.report.metric_ids == report.metric_ids);
    REQUIRE(loaded.report.rows.size() == report.rows.size());
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(loaded.report.rows[i].id == report.rows[i].id);
        for (const auto& [id, score] : report.rows[i].scores) {
            const auto& round = loaded.report.rows[i].scores.at(id);
            CHECK(round.status == score.status);
            if (score.status == ScoreStatus::ok)
                CHECK(round.value == score.value);
            CHECK(round.detail == score.detail);
        }
    }
    // emitting the loaded report reproduces the same bytes
    std::string again = data_path("tmp_report2.json");
    report::emit_report(loaded.report, report::ReportFormat::json, again, "demo");
    CHECK(slurp(path) == slurp(again));
    std::remove(path.c_str());
    std::remove(again.c_str());
}

TEST_CASE("csv and json emissions agree per record") {
    EvalContext ctx;
    auto dataset = report::load_dataset(data_path("demo_dataset.json"));
    auto report =
        evaluate_dataset(dataset.records, {"f1_token", "cosine_bow"}, ctx, default_registry());
    std::string csv = report::report_to_csv(report);
    auto json = report::report_to_json(report, "demo");
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    for (const auto& rec : json["records"]) {
        std::string line;
        REQUIRE(std::getline(lines, line));
        for (const auto& id : {"cosine_bow", "f1_token"}) {
            double value = rec["scores"][id]["value"].get<double>();
            CHECK(line.find(report::number_text(value)) != std::string::npos);
        }
    }
}

TEST_CASE("radar svg shape") {
    std::vector<AggregateRow> maxed, zeroed, mixed;
    for (const char* id : {"m1", "m2", "m3", "m4"}) {
        AggregateRow row;
        row.metric_id = id;
        row.mean = 1.0;
        maxed.push_back(row);
        row.mean = 0.0;
        zeroed.push_back(row);
        row.mean = 0.5;
        mixed.push_back(row);
    }
    std::string path = data_path("tmp_radar.svg");

    report::emit_radar_svg({{"solo", maxed}}, path);
    std::string svg = slurp(path);
    CHECK(xml_well_formed(svg));
    CHECK(count_occurrences(svg, "<polygon") == 1);
    // all axis maxima: every vertex sits on the outer ring (radius 360)
    CHECK(svg.find("500.00,140.00") != std::string::npos); // top axis at value 1

    report::emit_radar_svg({{"zero", zeroed}}, path);
    svg = slurp(path);
    // degenerate polygon collapses to the center
    CHECK(count_occurrences(svg, "500.00,500.00") == 4);

    report::emit_radar_svg({{"a", maxed}, {"b", zeroed}, {"c", mixed}}, path);
    svg = slurp(path);
    CHECK(xml_well_formed(svg));
    CHECK(count_occurrences(svg, "<polygon") == 3);
    CHECK(count_occurrences(svg, "class=\"legend\"") == 6); // swatch + label per system

    std::vector<AggregateRow> other = maxed;
    other[0].metric_id = "different";
    CHECK_THROWS_AS(report::emit_radar_svg({{"a", maxed}, {"b", other}}, path),
                    std::invalid_argument);
    std::remove(path.c_str());
}

TEST_CASE("heatmap svg shape") {
    auto report = synthetic_report(8);
    auto matrix = report::correlation_matrix(report);
    std::string path = data_path("tmp_heatmap.svg");
    report::emit_heatmap_svg(matrix, path);
    std::string svg = slurp(path);
    CHECK(xml_well_formed(svg));
    // 3x3 cells plus the background rect
    CHECK(count_occurrences(svg, "<rect") == 10);
    CHECK(count_occurrences(svg, "#b2182b") >= 3); // +1 anchor on the diagonal
    CHECK(svg.find("1.00") != std::string::npos);

    // undefined cells render neutral with a marker
    EvalReport with_const = synthetic_report(6);
    for (auto& row : with_const.rows)
        row.scores.at("my") = MetricScore::ok_score("my", 0.25);
    auto m2 = report::correlation_matrix(with_const);
    report::emit_heatmap_svg(m2, path);
    svg = slurp(path);
    CHECK(svg.find("n/a") != std::string::npos);
    CHECK(count_occurrences(svg, "class=\"undefined\"") == 5); // row+column of the constant metric

    // row/column order equals the clustered order
    std::vector<std::string> labels;
    for (std::size_t idx : matrix.order)
        labels.push_back(matrix.metric_ids[idx]);
    report::emit_heatmap_svg(matrix, path);
    svg = slurp(path);
    std::size_t first = svg.find(">" + labels[0] + "<");
    std::size_t second = svg.find(">" + labels[1] + "<");
    CHECK(first < second);
    std::remove(path.c_str());
}

TEST_CASE("full pipeline determinism on the network-free subset") {
    std::vector<std::string> ids = {"exact_match_token", "f1_token", "jaccard_token",
                                    "cosine_bow",       "bleu_cumulative", "sp_bleu",
                                    "sp_f1_token",      "rouge_k",         "meteor",
                                    "codebleu"};
    auto dataset = report::load_dataset(data_path("demo_dataset.json"));
    std::string a = data_path("tmp_det_a.json");
    std::string b = data_path("tmp_det_b.json");
    {
        EvalContext ctx;
        auto r = evaluate_dataset(dataset.records, ids, ctx, default_registry());
        report::emit_report(r, report::ReportFormat::json, a, "demo");
    }
    {
        EvalContext ctx;
        auto r = evaluate_dataset(dataset.records, ids, ctx, default_registry());
        report::emit_report(r, report::ReportFormat::json, b, "demo");
    }
    CHECK(slurp(a) == slurp(b));
    std::remove(a.c_str());
    std::remove(b.c_str());
}
