#pragma once
// Score aggregation and the clustered correlation matrix: per-metric macro
// averages over ok scores, pairwise Pearson correlation over records where
// both metrics are ok, and an average-linkage ordering on distance 1 - r
// that groups correlated metrics next to each other.

#include "sparqleval/core.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sparqleval::report {

struct AggregateRow {
    std::string metric_id;
    std::optional<double> mean; // absent when no record scored ok
    int count_ok = 0;
    int count_error = 0;
    int count_skipped = 0;
};

inline std::vector<AggregateRow> aggregate(const EvalReport& report) {
    std::vector<AggregateRow> out;
    for (const auto& id : report.metric_ids) {
        AggregateRow row;
        row.metric_id = id;
        double sum = 0;
        for (const auto& rec : report.rows) {
            auto it = rec.scores.find(id);
            if (it == rec.scores.end())
                continue;
            switch (it->second.status) {
            case ScoreStatus::ok:
                ++row.count_ok;
                sum += it->second.value;
                break;
            case ScoreStatus::error:
                ++row.count_error;
                break;
            case ScoreStatus::skipped:
                ++row.count_skipped;
                break;
            }
        }
        if (row.count_ok > 0)
            row.mean = sum / row.count_ok;
        out.push_back(std::move(row));
    }
    return out;
}

struct CorrelationMatrix {
    std::vector<std::string> metric_ids;         // input order (sorted ids)
    std::vector<std::vector<double>> values;     // undefined cells hold 0
    std::vector<std::vector<bool>> defined;      // false marks undefined pairs
    std::vector<std::size_t> order;              // clustered permutation of indices
};

namespace anadetail {

// Pearson r via the sum formulation; the tests check it against a two-pass
// covariance reference.
inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2)
        return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    const double dn = static_cast<double>(n);
    double vx = sxx - sx * sx / dn;
    double vy = syy - sy * sy / dn;
    if (vx <= 0 || vy <= 0)
        return std::nullopt; // constant column
    double r = (sxy - sx * sy / dn) / std::sqrt(vx * vy);
    return std::clamp(r, -1.0, 1.0);
}

// Agglomerative average-linkage on a symmetric distance matrix; returns the
// dendrogram leaves left to right. Ties break on the smallest cluster pair,
// so the ordering is deterministic.
inline std::vector<std::size_t> average_linkage_order(const std::vector<std::vector<double>>& dist) {
    const std::size_t n = dist.size();
    if (n == 0)
        return {};
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < n; ++i)
        clusters.push_back({i});
    while (clusters.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 1;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                double sum = 0;
                for (std::size_t a : clusters[i])
                    for (std::size_t b : clusters[j])
                        sum += dist[a][b];
                double avg = sum / static_cast<double>(clusters[i].size() * clusters[j].size());
                if (avg < best - 1e-15) {
                    best = avg;
                    bi = i;
                    bj = j;
                }
            }
        }
        auto merged = clusters[bi];
        merged.insert(merged.end(), clusters[bj].begin(), clusters[bj].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
        clusters[bi] = std::move(merged);
    }
    return clusters.front();
}

} // namespace anadetail

// Pairwise Pearson over records where both metrics scored ok. Pairs with a
// constant column or fewer than two shared records are undefined: rendered
// as 0 and flagged. Requires at least two records.
inline CorrelationMatrix correlation_matrix(const EvalReport& report) {
    if (report.rows.size() < 2)
        throw std::invalid_argument("correlation matrix needs at least 2 records");
    const auto& ids = report.metric_ids;
    const std::size_t n = ids.size();
    CorrelationMatrix out;
    out.metric_ids = ids;
    out.values.assign(n, std::vector<double>(n, 0.0));
    out.defined.assign(n, std::vector<bool>(n, false));

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            std::vector<double> x, y;
            for (const auto& rec : report.rows) {
                auto a = rec.scores.find(ids[i]);
                auto b = rec.scores.find(ids[j]);
                if (a == rec.scores.end() || b == rec.scores.end())
                    continue;
                if (a->second.status != ScoreStatus::ok || b->second.status != ScoreStatus::ok)
                    continue;
                x.push_back(a->second.value);
                y.push_back(b->second.value);
            }
            auto r = anadetail::pearson(x, y);
            if (r) {
                out.values[i][j] = out.values[j][i] = *r;
                out.defined[i][j] = out.defined[j][i] = true;
            }
        }
    }

    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j)
                continue;
            dist[i][j] = out.defined[i][j] ? 1.0 - out.values[i][j] : 1.0;
        }
    out.order = anadetail::average_linkage_order(dist);
    return out;
}

} // namespace sparqleval::report
