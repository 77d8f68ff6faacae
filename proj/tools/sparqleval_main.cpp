// sparqleval: evaluate generated SPARQL queries against gold queries and
// emit per-record and aggregate reports with charts.
//
// Subcommands:
//   evaluate      run measures over a dataset file and write reports
//   list-metrics  print the measure registry
//   report        regenerate aggregates and charts from emitted JSON reports
//
// Exit codes: 0 success, 1 configuration error, 2 dataset validation error.
// Per-record metric failures never change the exit code; they are recorded
// in the report.

#include "sparqleval/sparqleval.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace sparqleval;

namespace {

struct EvaluateArgs {
    std::string input;
    std::string metrics = "all";
    std::string endpoint_url;
    std::string prefixes_path;
    std::string iri_set_path;
    std::string judge_url;
    std::string judge_model = "default";
    std::string judge_prompt_path;
    std::string options_path;
    std::string synonyms_path;
    std::string trace_path;
    std::string out_dir = ".";
    std::string format = "json";
    std::string system_name;
    int concurrency = 1;
    double timeout_seconds = 30;
    unsigned seed = 0; // reserved: the built-in measures are deterministic
};

std::vector<std::string> split_metric_list(const std::string& metrics,
                                           const MeasureRegistry& registry) {
    std::vector<std::string> ids;
    if (metrics == "all") {
        for (const auto& spec : registry.list())
            ids.push_back(spec.metric_id);
        return ids;
    }
    std::size_t start = 0;
    while (start <= metrics.size()) {
        auto comma = metrics.find(',', start);
        std::string id = metrics.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!id.empty())
            ids.push_back(id);
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    if (ids.empty())
        throw ConfigError("--metrics selected nothing");
    return ids;
}

std::string read_text_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(std::string("cannot open ") + what + ": " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

EvalContext build_context(const EvaluateArgs& args) {
    EvalContext ctx;
    ctx.concurrency = args.concurrency;

    if (!args.prefixes_path.empty()) {
        // user entries extend and override the built-in table
        for (const auto& [prefix, iri] : sparql::load_prefix_map(args.prefixes_path))
            ctx.prefix_map[prefix] = iri;
    }
    if (!args.endpoint_url.empty()) {
        kb::EndpointConfig endpoint;
        endpoint.url = args.endpoint_url;
        endpoint.timeout_seconds = args.timeout_seconds;
        endpoint.concurrency_limit = std::max(1, args.concurrency);
        ctx.endpoint = endpoint;
    }
    if (!args.trace_path.empty())
        ctx.trace = std::make_shared<kb::TraceLog>(args.trace_path);
    if (!args.iri_set_path.empty())
        ctx.kb_oracle = std::make_shared<kb::FileMembershipOracle>(
            kb::FileMembershipOracle::from_file(args.iri_set_path));
    if (!args.judge_url.empty() || std::getenv("SPARQLEVAL_JUDGE_URL")) {
        judge::JudgeConfig cfg;
        cfg.base_url = args.judge_url;
        cfg.model = args.judge_model;
        cfg.timeout_seconds = args.timeout_seconds;
        if (!args.judge_prompt_path.empty())
            cfg.system_prompt = read_text_file(args.judge_prompt_path, "judge prompt file");
        ctx.llm = cfg;
    }
    if (!args.options_path.empty()) {
        try {
            ctx.options = nlohmann::json::parse(read_text_file(args.options_path, "options file"));
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("options file is not valid JSON: ") + e.what());
        }
    }
    if (!args.synonyms_path.empty())
        ctx.synonyms = std::make_shared<lexical::SynonymTable>(
            lexical::load_synonym_table(args.synonyms_path));
    return ctx;
}

void print_aggregates(const EvalReport& report) {
    auto rows = report::aggregate(report);
    std::size_t width = 12;
    for (const auto& row : rows)
        width = std::max(width, row.metric_id.size());
    std::cout << std::left << std::setw(static_cast<int>(width) + 2) << "metric"
              << std::right << std::setw(10) << "mean" << std::setw(6) << "ok" << std::setw(6)
              << "err" << std::setw(6) << "skip" << "\n";
    for (const auto& row : rows) {
        std::cout << std::left << std::setw(static_cast<int>(width) + 2) << row.metric_id
                  << std::right << std::setw(10);
        if (row.mean)
            std::cout << report::svgdetail::fixed(*row.mean, 4);
        else
            std::cout << "-";
        std::cout << std::setw(6) << row.count_ok << std::setw(6) << row.count_error
                  << std::setw(6) << row.count_skipped << "\n";
    }
}

int run_evaluate(const EvaluateArgs& args) {
    const MeasureRegistry& registry = default_registry();
    report::DatasetFile dataset = report::load_dataset(args.input);
    std::vector<std::string> ids = split_metric_list(args.metrics, registry);
    EvalContext ctx = build_context(args);

    EvalReport report = evaluate_dataset(dataset.records, ids, ctx, registry);

    fs::create_directories(args.out_dir);
    std::string system =
        args.system_name.empty() ? fs::path(args.input).stem().string() : args.system_name;

    if (args.format == "json" || args.format == "both")
        report::emit_report(report, report::ReportFormat::json,
                            (fs::path(args.out_dir) / "report.json").string(), system,
                            args.trace_path);
    if (args.format == "csv" || args.format == "both")
        report::emit_report(report, report::ReportFormat::csv,
                            (fs::path(args.out_dir) / "report.csv").string(), system);

    std::map<std::string, std::vector<report::AggregateRow>> systems;
    systems[system] = report::aggregate(report);
    report::emit_radar_svg(systems, (fs::path(args.out_dir) / "radar.svg").string());

    if (report.rows.size() >= 2)
        report::emit_heatmap_svg(report::correlation_matrix(report),
                                 (fs::path(args.out_dir) / "heatmap.svg").string());
    else
        std::cout << "note: heatmap needs at least 2 records, skipped\n";

    print_aggregates(report);
    std::cout << "report written to " << args.out_dir << "\n";
    return 0;
}

int run_list_metrics() {
    for (const auto& spec : default_registry().list()) {
        std::string needs;
        for (Capability c : spec.needs) {
            if (!needs.empty())
                needs += ",";
            needs += capability_name(c);
        }
        std::cout << std::left << std::setw(20) << spec.metric_id << std::setw(13)
                  << category_name(spec.category) << " [0,1]"
                  << (needs.empty() ? "" : "  needs " + needs) << "\n";
    }
    return 0;
}

int run_report(const std::vector<std::string>& inputs, const std::string& out_dir) {
    if (inputs.empty())
        throw ConfigError("report needs at least one --input report.json");
    fs::create_directories(out_dir);

    std::map<std::string, std::vector<report::AggregateRow>> systems;
    std::optional<report::LoadedReport> first;
    for (const auto& path : inputs) {
        report::LoadedReport loaded = report::load_report(path);
        std::string name = loaded.system;
        int suffix = 2;
        while (systems.count(name))
            name = loaded.system + "-" + std::to_string(suffix++);
        systems[name] = report::aggregate(loaded.report);
        if (!first)
            first = std::move(loaded);
    }

    report::emit_radar_svg(systems, (fs::path(out_dir) / "radar.svg").string());
    if (first->report.rows.size() >= 2)
        report::emit_heatmap_svg(report::correlation_matrix(first->report),
                                 (fs::path(out_dir) / "heatmap.svg").string());

    std::string csv = "system,metric_id,mean,count_ok,count_error,count_skipped\r\n";
    for (const auto& [name, rows] : systems)
        for (const auto& row : rows) {
            csv += report::csv_quote(name) + "," + report::csv_quote(row.metric_id) + ",";
            if (row.mean)
                csv += report::number_text(*row.mean);
            csv += "," + std::to_string(row.count_ok) + "," + std::to_string(row.count_error) +
                   "," + std::to_string(row.count_skipped) + "\r\n";
        }
    report::write_file((fs::path(out_dir) / "aggregates.csv").string(), csv);
    std::cout << "charts written to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparqleval: metrics for SPARQL queries generated from natural language"};
    app.require_subcommand(1);

    EvaluateArgs args;
    auto* evaluate = app.add_subcommand("evaluate", "evaluate a dataset file");
    evaluate->add_option("--input", args.input, "dataset JSON file")->required();
    evaluate->add_option("--metrics", args.metrics, "comma-separated metric ids or \"all\"");
    evaluate->add_option("--endpoint", args.endpoint_url, "SPARQL endpoint URL");
    evaluate->add_option("--prefixes", args.prefixes_path,
                         "prefix map file (one \"prefix iri\" pair per line)");
    evaluate->add_option("--iri-set", args.iri_set_path,
                         "file-backed KB oracle (one absolute IRI per line)");
    evaluate->add_option("--judge-url", args.judge_url, "chat-completion service URL");
    evaluate->add_option("--judge-model", args.judge_model, "judge model name");
    evaluate->add_option("--judge-prompt", args.judge_prompt_path, "judge system prompt file");
    evaluate->add_option("--options", args.options_path, "per-metric options JSON file");
    evaluate->add_option("--synonyms", args.synonyms_path, "METEOR synonym table file");
    evaluate->add_option("--trace", args.trace_path, "endpoint trace JSON-lines file");
    evaluate->add_option("--out", args.out_dir, "output directory");
    evaluate->add_option("--format", args.format, "report format: json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    evaluate->add_option("--concurrency", args.concurrency, "parallel record evaluations")
        ->check(CLI::PositiveNumber);
    evaluate->add_option("--timeout", args.timeout_seconds, "endpoint/judge timeout in seconds")
        ->check(CLI::PositiveNumber);
    evaluate->add_option("--system", args.system_name, "system name used in charts");
    evaluate->add_option("--seed", args.seed,
                         "reserved for future stochastic measures; accepted for stability");

    auto* list = app.add_subcommand("list-metrics", "print the measure registry");

    std::vector<std::string> report_inputs;
    std::string report_out = ".";
    auto* report_cmd =
        app.add_subcommand("report", "regenerate aggregates and charts from JSON reports");
    report_cmd->add_option("--input", report_inputs, "emitted report.json files")->required();
    report_cmd->add_option("--out", report_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage problems are configuration errors
    }

    try {
        if (*evaluate)
            return run_evaluate(args);
        if (*list)
            return run_list_metrics();
        if (*report_cmd)
            return run_report(report_inputs, report_out);
    } catch (const report::DatasetError& e) {
        std::cerr << "dataset error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
