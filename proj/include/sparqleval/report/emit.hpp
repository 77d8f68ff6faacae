#pragma once
// Report emission: a JSON report containing per-record scores, aggregates
// and the clustered correlation matrix; a per-record CSV; and standalone SVG
// charts (radar over aggregate means, correlation heatmap). All writers are
// deterministic: identical inputs produce byte-identical files.

#include "sparqleval/report/analysis.hpp"
#include "sparqleval/report/dataset.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sparqleval::report {

// shortest round-trip number formatting, shared by JSON and CSV emission
inline std::string number_text(double v) { return nlohmann::json(v).dump(); }

inline nlohmann::ordered_json score_to_json(const MetricScore& s) {
    nlohmann::ordered_json out;
    out["status"] = score_status_name(s.status);
    if (s.status == ScoreStatus::ok)
        out["value"] = s.value;
    if (!s.message.empty())
        out["message"] = s.message;
    if (!s.detail.empty()) {
        nlohmann::ordered_json detail;
        for (const auto& [k, v] : s.detail) // std::map: stable key order
            detail[k] = v;
        out["detail"] = detail;
    }
    return out;
}

inline nlohmann::ordered_json report_to_json(const EvalReport& report, const std::string& system,
                                             const std::string& trace_file = "") {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["system"] = system;
    doc["metric_ids"] = report.metric_ids;

    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json rec;
        rec["id"] = row.id;
        nlohmann::ordered_json scores;
        for (const auto& id : report.metric_ids) {
            auto it = row.scores.find(id);
            if (it != row.scores.end())
                scores[id] = score_to_json(it->second);
        }
        rec["scores"] = scores;
        records.push_back(std::move(rec));
    }
    doc["records"] = records;

    nlohmann::ordered_json aggs = nlohmann::ordered_json::array();
    for (const auto& row : aggregate(report)) {
        nlohmann::ordered_json a;
        a["metric_id"] = row.metric_id;
        if (row.mean)
            a["mean"] = *row.mean;
        else
            a["mean"] = nullptr;
        a["count_ok"] = row.count_ok;
        a["count_error"] = row.count_error;
        a["count_skipped"] = row.count_skipped;
        aggs.push_back(std::move(a));
    }
    doc["aggregates"] = aggs;

    if (report.rows.size() >= 2) {
        CorrelationMatrix matrix = correlation_matrix(report);
        nlohmann::ordered_json corr;
        corr["metric_ids"] = matrix.metric_ids;
        nlohmann::ordered_json order = nlohmann::ordered_json::array();
        for (std::size_t idx : matrix.order)
            order.push_back(matrix.metric_ids[idx]);
        corr["order"] = order;
        corr["values"] = matrix.values;
        corr["defined"] = matrix.defined;
        doc["correlation"] = corr;
    } else {
        doc["correlation"] = nullptr;
    }

    if (trace_file.empty())
        doc["trace_file"] = nullptr;
    else
        doc["trace_file"] = trace_file;
    return doc;
}

enum class ReportFormat { json, csv };

inline std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos)
        return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"')
            quoted += "\"\"";
        else
            quoted += c;
    }
    quoted += "\"";
    return quoted;
}

// One row per record, one column per metric; cells empty unless status=ok.
inline std::string report_to_csv(const EvalReport& report) {
    std::string out = "id";
    for (const auto& id : report.metric_ids)
        out += "," + csv_quote(id);
    out += "\r\n";
    for (const auto& row : report.rows) {
        out += csv_quote(row.id);
        for (const auto& id : report.metric_ids) {
            out += ",";
            auto it = row.scores.find(id);
            if (it != row.scores.end() && it->second.status == ScoreStatus::ok)
                out += number_text(it->second.value);
        }
        out += "\r\n";
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << contents;
}

inline void emit_report(const EvalReport& report, ReportFormat format, const std::string& path,
                        const std::string& system = "system", const std::string& trace_file = "") {
    if (format == ReportFormat::json)
        write_file(path, report_to_json(report, system, trace_file).dump(2) + "\n");
    else
        write_file(path, report_to_csv(report));
}

struct LoadedReport {
    EvalReport report;
    std::string system;
};

// Reads back an emitted JSON report (used by the `report` subcommand and the
// serialization round-trip tests).
inline LoadedReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DatasetError("cannot open report file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw DatasetError(std::string("report is not valid JSON: ") + e.what());
    }
    LoadedReport out;
    if (!doc.is_object() || !doc.contains("metric_ids") || !doc.contains("records"))
        throw DatasetError("not a report file: missing metric_ids/records");
    out.system = doc.value("system", "system");
    for (const auto& id : doc["metric_ids"])
        out.report.metric_ids.push_back(id.get<std::string>());
    for (const auto& rec : doc["records"]) {
        RecordScores row;
        row.id = rec.at("id").get<std::string>();
        for (auto it = rec.at("scores").begin(); it != rec.at("scores").end(); ++it) {
            MetricScore s;
            s.metric_id = it.key();
            const auto& body = it.value();
            std::string status = body.at("status").get<std::string>();
            s.status = status == "ok"        ? ScoreStatus::ok
                       : status == "skipped" ? ScoreStatus::skipped
                                             : ScoreStatus::error;
            if (body.contains("value"))
                s.value = body["value"].get<double>();
            if (body.contains("message"))
                s.message = body["message"].get<std::string>();
            if (body.contains("detail"))
                for (auto d = body["detail"].begin(); d != body["detail"].end(); ++d)
                    s.detail[d.key()] = d.value().get<std::string>();
            row.scores.emplace(it.key(), std::move(s));
        }
        out.report.rows.push_back(std::move(row));
    }
    return out;
}

// ------------------------------------------------------------- SVG ---------

namespace svgdetail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string fixed(double v, int digits = 2) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

// diverging scale: -1 -> #2166ac, 0 -> #f7f7f7, +1 -> #b2182b
inline std::string diverging_color(double r) {
    struct Rgb {
        double red, green, blue;
    };
    const Rgb neg{0x21, 0x66, 0xac}, mid{0xf7, 0xf7, 0xf7}, pos{0xb2, 0x18, 0x2b};
    r = std::clamp(r, -1.0, 1.0);
    const Rgb& a = r < 0 ? neg : mid;
    const Rgb& b = r < 0 ? mid : pos;
    double t = r < 0 ? r + 1.0 : r;
    auto channel = [&](double ca, double cb) {
        int v = static_cast<int>(std::lround(ca + (cb - ca) * t));
        return v;
    };
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", channel(a.red, b.red),
                  channel(a.green, b.green), channel(a.blue, b.blue));
    return buf;
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                   "#66a61e", "#e6ab02", "#a6761d", "#666666"};
    return colors[i % 8];
}

} // namespace svgdetail

// Radar chart over the aggregate means of one or more systems sharing the
// same metric axis set. Radial scale [0,1]; one polygon per system.
inline void emit_radar_svg(const std::map<std::string, std::vector<AggregateRow>>& systems,
                           const std::string& path) {
    if (systems.empty())
        throw std::invalid_argument("radar chart needs at least one system");
    std::vector<std::string> axes;
    for (const auto& row : systems.begin()->second)
        axes.push_back(row.metric_id);
    for (const auto& [name, rows] : systems) {
        if (rows.size() != axes.size())
            throw std::invalid_argument("radar chart: systems have mismatched axes");
        for (std::size_t i = 0; i < axes.size(); ++i)
            if (rows[i].metric_id != axes[i])
                throw std::invalid_argument("radar chart: systems have mismatched axes");
    }
    const double cx = 500, cy = 500, radius = 360;
    const std::size_t n = axes.size();
    const double pi = 3.14159265358979323846;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" "
           "viewBox=\"0 0 1000 1000\">\n";
    svg << "<rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n";

    auto point = [&](std::size_t axis, double value) {
        double angle = -pi / 2 + 2 * pi * static_cast<double>(axis) / static_cast<double>(n);
        double x = cx + radius * value * std::cos(angle);
        double y = cy + radius * value * std::sin(angle);
        return std::make_pair(x, y);
    };

    for (double ring : {0.25, 0.5, 0.75, 1.0})
        svg << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\""
            << svgdetail::fixed(radius * ring) << "\" fill=\"none\" stroke=\"#dddddd\"/>\n";

    for (std::size_t i = 0; i < n; ++i) {
        auto [x, y] = point(i, 1.0);
        svg << "<line x1=\"" << cx << "\" y1=\"" << cy << "\" x2=\"" << svgdetail::fixed(x)
            << "\" y2=\"" << svgdetail::fixed(y) << "\" stroke=\"#bbbbbb\"/>\n";
        auto [lx, ly] = point(i, 1.07);
        svg << "<text x=\"" << svgdetail::fixed(lx) << "\" y=\"" << svgdetail::fixed(ly)
            << "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\">"
            << svgdetail::xml_escape(axes[i]) << "</text>\n";
    }

    std::size_t system_index = 0;
    for (const auto& [name, rows] : systems) {
        std::ostringstream points;
        for (std::size_t i = 0; i < n; ++i) {
            double value = rows[i].mean.value_or(0.0);
            value = std::clamp(value, 0.0, 1.0);
            auto [x, y] = point(i, value);
            if (i)
                points << " ";
            points << svgdetail::fixed(x) << "," << svgdetail::fixed(y);
        }
        const char* color = svgdetail::palette(system_index);
        svg << "<polygon points=\"" << points.str() << "\" fill=\"" << color
            << "\" fill-opacity=\"0.25\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        ++system_index;
    }

    // legend
    system_index = 0;
    for (const auto& [name, rows] : systems) {
        double y = 30 + 24 * static_cast<double>(system_index);
        svg << "<rect x=\"20\" y=\"" << svgdetail::fixed(y - 12)
            << "\" width=\"16\" height=\"16\" fill=\"" << svgdetail::palette(system_index)
            << "\" class=\"legend\"/>\n";
        svg << "<text x=\"44\" y=\"" << svgdetail::fixed(y)
            << "\" font-size=\"14\" font-family=\"sans-serif\" class=\"legend\">"
            << svgdetail::xml_escape(name) << "</text>\n";
        ++system_index;
    }

    svg << "</svg>\n";
    write_file(path, svg.str());
}

// Correlation heatmap in clustered order with a diverging color scale and
// two-decimal cell labels; undefined cells render neutral with an "n/a"
// marker.
inline void emit_heatmap_svg(const CorrelationMatrix& matrix, const std::string& path) {
    const std::size_t n = matrix.metric_ids.size();
    const double margin_left = 220, margin_top = 220;
    const double area = 760;
    const double cell = n == 0 ? area : area / static_cast<double>(n);

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" "
           "viewBox=\"0 0 1000 1000\">\n";
    svg << "<rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n";

    for (std::size_t row = 0; row < n; ++row) {
        const std::size_t i = matrix.order[row];
        for (std::size_t col = 0; col < n; ++col) {
            const std::size_t j = matrix.order[col];
            const double x = margin_left + cell * static_cast<double>(col);
            const double y = margin_top + cell * static_cast<double>(row);
            const bool defined = matrix.defined[i][j];
            const double r = matrix.values[i][j];
            const std::string fill =
                defined ? svgdetail::diverging_color(r) : std::string("#f7f7f7");
            svg << "<rect x=\"" << svgdetail::fixed(x) << "\" y=\"" << svgdetail::fixed(y)
                << "\" width=\"" << svgdetail::fixed(cell) << "\" height=\""
                << svgdetail::fixed(cell) << "\" fill=\"" << fill
                << "\" stroke=\"white\" stroke-width=\"1\"";
            if (!defined)
                svg << " class=\"undefined\" stroke-dasharray=\"3,2\"";
            svg << "/>\n";
            const std::string label = defined ? svgdetail::fixed(r, 2) : std::string("n/a");
            const bool dark = defined && std::fabs(r) > 0.6;
            svg << "<text x=\"" << svgdetail::fixed(x + cell / 2) << "\" y=\""
                << svgdetail::fixed(y + cell / 2 + 4)
                << "\" font-size=\"" << svgdetail::fixed(std::min(14.0, cell / 3.2), 1)
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" fill=\""
                << (dark ? "#ffffff" : "#222222") << "\">" << label << "</text>\n";
        }
    }

    for (std::size_t row = 0; row < n; ++row) {
        const std::size_t i = matrix.order[row];
        const double y = margin_top + cell * (static_cast<double>(row) + 0.5);
        svg << "<text x=\"" << svgdetail::fixed(margin_left - 8) << "\" y=\""
            << svgdetail::fixed(y + 4)
            << "\" font-size=\"13\" text-anchor=\"end\" font-family=\"sans-serif\">"
            << svgdetail::xml_escape(matrix.metric_ids[i]) << "</text>\n";
        const double x = margin_left + cell * (static_cast<double>(row) + 0.5);
        svg << "<text x=\"" << svgdetail::fixed(x) << "\" y=\""
            << svgdetail::fixed(margin_top - 8)
            << "\" font-size=\"13\" text-anchor=\"start\" font-family=\"sans-serif\" "
               "transform=\"rotate(-60 "
            << svgdetail::fixed(x) << " " << svgdetail::fixed(margin_top - 8) << ")\">"
            << svgdetail::xml_escape(matrix.metric_ids[i]) << "</text>\n";
    }

    svg << "</svg>\n";
    write_file(path, svg.str());
}

} // namespace sparqleval::report
