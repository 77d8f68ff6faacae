#pragma once
// RDF terms and answer tables as returned by SPARQL endpoints. Term equality
// normalizes literals first: plain literals equal their xsd:string twins,
// numeric literals compare by value (one numeric family), booleans by
// truth value, and language tags case-insensitively.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace sparqleval::kb {

struct RdfTerm {
    enum class Kind { iri, literal, blank };
    Kind kind = Kind::literal;
    std::string lexical;
    std::string datatype; // absolute IRI, empty for plain literals
    std::string lang;     // empty if none

    static RdfTerm iri(std::string value) {
        return RdfTerm{Kind::iri, std::move(value), "", ""};
    }
    static RdfTerm literal(std::string value, std::string datatype = "", std::string lang = "") {
        return RdfTerm{Kind::literal, std::move(value), std::move(datatype), std::move(lang)};
    }
    static RdfTerm blank(std::string label) {
        return RdfTerm{Kind::blank, std::move(label), "", ""};
    }
};

namespace termdetail {

inline bool is_numeric_datatype(const std::string& dt) {
    static const std::set<std::string> numeric = {
        "http://www.w3.org/2001/XMLSchema#integer",
        "http://www.w3.org/2001/XMLSchema#decimal",
        "http://www.w3.org/2001/XMLSchema#float",
        "http://www.w3.org/2001/XMLSchema#double",
        "http://www.w3.org/2001/XMLSchema#int",
        "http://www.w3.org/2001/XMLSchema#long",
        "http://www.w3.org/2001/XMLSchema#short",
        "http://www.w3.org/2001/XMLSchema#byte",
        "http://www.w3.org/2001/XMLSchema#nonNegativeInteger",
        "http://www.w3.org/2001/XMLSchema#nonPositiveInteger",
        "http://www.w3.org/2001/XMLSchema#positiveInteger",
        "http://www.w3.org/2001/XMLSchema#negativeInteger",
        "http://www.w3.org/2001/XMLSchema#unsignedLong",
        "http://www.w3.org/2001/XMLSchema#unsignedInt",
        "http://www.w3.org/2001/XMLSchema#unsignedShort",
        "http://www.w3.org/2001/XMLSchema#unsignedByte",
    };
    return numeric.count(dt) > 0;
}

inline std::string to_lower(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Canonical lexical form for numeric comparison: integral values print as
// integers, everything else via shortest stable formatting.
inline std::optional<std::string> canonical_number(const std::string& lexical) {
    try {
        std::size_t used = 0;
        double v = std::stod(lexical, &used);
        while (used < lexical.size() && std::isspace(static_cast<unsigned char>(lexical[used])))
            ++used;
        if (used != lexical.size())
            return std::nullopt;
        if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9.0e15) {
            std::ostringstream os;
            os << static_cast<long long>(v);
            return os.str();
        }
        std::ostringstream os;
        os.precision(15);
        os << v;
        return os.str();
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace termdetail

// Stable key implementing the normalized equality; also used for hashing and
// for order-insensitive row/set comparisons.
inline std::string term_key(const RdfTerm& t) {
    static const std::string xsd_string = "http://www.w3.org/2001/XMLSchema#string";
    static const std::string xsd_boolean = "http://www.w3.org/2001/XMLSchema#boolean";
    switch (t.kind) {
    case RdfTerm::Kind::iri:
        return "i\x1f" + t.lexical;
    case RdfTerm::Kind::blank:
        return "b\x1f" + t.lexical;
    case RdfTerm::Kind::literal: {
        if (!t.lang.empty())
            return "l\x1f" + t.lexical + "\x1f@" + termdetail::to_lower(t.lang);
        if (t.datatype.empty() || t.datatype == xsd_string)
            return "l\x1f" + t.lexical + "\x1f";
        if (t.datatype == xsd_boolean) {
            bool truth = t.lexical == "true" || t.lexical == "1";
            return std::string("t\x1f") + (truth ? "true" : "false");
        }
        if (termdetail::is_numeric_datatype(t.datatype)) {
            if (auto canon = termdetail::canonical_number(t.lexical))
                return "n\x1f" + *canon;
        }
        return "l\x1f" + t.lexical + "\x1f^" + t.datatype;
    }
    }
    return {};
}

inline bool operator==(const RdfTerm& a, const RdfTerm& b) { return term_key(a) == term_key(b); }

struct AnswerTable {
    enum class Kind { bindings, boolean };
    Kind kind = Kind::bindings;
    std::vector<std::string> columns;                   // ordered variable names
    std::vector<std::map<std::string, RdfTerm>> rows;   // absent key = unbound
    bool boolean_value = false;

    static AnswerTable boolean(bool value) {
        AnswerTable t;
        t.kind = Kind::boolean;
        t.boolean_value = value;
        return t;
    }
    bool empty() const { return kind == Kind::bindings && rows.empty(); }
};

// All bound values of a table, as normalized keys.
inline std::set<std::string> value_set(const AnswerTable& t) {
    std::set<std::string> out;
    for (const auto& row : t.rows)
        for (const auto& [column, term] : row)
            out.insert(term_key(term));
    return out;
}

// Order-insensitive row signature: the multiset of the row's bound terms,
// column names ignored.
inline std::string row_signature(const std::map<std::string, RdfTerm>& row) {
    std::multiset<std::string> keys;
    for (const auto& [column, term] : row)
        keys.insert(term_key(term));
    std::string sig;
    for (const auto& k : keys) {
        sig += k;
        sig += '\x1e';
    }
    return sig;
}

inline std::set<std::string> row_signature_set(const AnswerTable& t) {
    std::set<std::string> out;
    for (const auto& row : t.rows)
        out.insert(row_signature(row));
    return out;
}

} // namespace sparqleval::kb
