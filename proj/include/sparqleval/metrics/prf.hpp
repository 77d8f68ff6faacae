#pragma once

namespace sparqleval {

struct PrfTriple {
    double precision = 0;
    double recall = 0;
    double f1 = 0;

    static PrfTriple from_pr(double p, double r) {
        PrfTriple t;
        t.precision = p;
        t.recall = r;
        t.f1 = (p + r) == 0 ? 0 : 2 * p * r / (p + r);
        return t;
    }
    static PrfTriple all(double v) { return PrfTriple{v, v, v}; }
    bool operator==(const PrfTriple&) const = default;
};

} // namespace sparqleval
