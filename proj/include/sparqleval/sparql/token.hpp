#pragma once
// SPARQL tokenizer. Produces a flat token sequence that is the substrate for
// the token-level metrics and the parser. Whitespace and comments are
// dropped; IRIs and string literals (with attached language tag / datatype
// suffix) stay single tokens, so joining lexemes with single spaces
// re-tokenizes to the same sequence.

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace sparqleval::sparql {

enum class TokenKind {
    keyword,
    variable,
    iri,
    prefixed_name,
    literal,
    number,
    punctuation,
    path_op,
};

struct Token {
    std::string lexeme;
    TokenKind kind = TokenKind::punctuation;
    std::size_t offset = 0;
};

using TokenSequence = std::vector<Token>;

class LexicalError : public std::runtime_error {
  public:
    LexicalError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

namespace detail {

inline const std::unordered_set<std::string>& keyword_table() {
    static const std::unordered_set<std::string> kw = {
        // query forms and clause keywords
        "SELECT", "ASK", "CONSTRUCT", "DESCRIBE", "WHERE", "PREFIX", "BASE", "DISTINCT",
        "REDUCED", "OPTIONAL", "UNION", "MINUS", "FILTER", "BIND", "VALUES", "UNDEF",
        "GROUP", "BY", "HAVING", "ORDER", "ASC", "DESC", "LIMIT", "OFFSET", "AS", "IN",
        "NOT", "EXISTS", "FROM", "NAMED", "GRAPH", "SERVICE", "SILENT", "LOAD", "CLEAR",
        "DROP", "CREATE", "INSERT", "DELETE", "DATA", "WITH", "USING",
        // built-in calls
        "STR", "LANG", "LANGMATCHES", "DATATYPE", "BOUND", "IRI", "URI", "BNODE", "RAND",
        "ABS", "CEIL", "FLOOR", "ROUND", "CONCAT", "STRLEN", "UCASE", "LCASE",
        "ENCODE_FOR_URI", "CONTAINS", "STRSTARTS", "STRENDS", "STRBEFORE", "STRAFTER",
        "YEAR", "MONTH", "DAY", "HOURS", "MINUTES", "SECONDS", "TIMEZONE", "TZ", "NOW",
        "UUID", "STRUUID", "MD5", "SHA1", "SHA256", "SHA384", "SHA512", "COALESCE", "IF",
        "STRLANG", "STRDT", "SAMETERM", "ISIRI", "ISURI", "ISBLANK", "ISLITERAL",
        "ISNUMERIC", "REGEX", "SUBSTR", "REPLACE",
        // aggregates
        "COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE", "GROUP_CONCAT", "SEPARATOR",
    };
    return kw;
}

inline std::string to_upper(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           static_cast<unsigned char>(c) >= 0x80;
}

// PN_LOCAL body characters; '.' is handled separately (internal only).
inline bool is_local_char(char c) { return is_name_char(c) || c == '-' || c == '%'; }

inline bool iri_body_char(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u <= 0x20)
        return false;
    switch (c) {
    case '<':
    case '>':
    case '"':
    case '{':
    case '}':
    case '|':
    case '^':
    case '`':
    case '\\':
        return false;
    default:
        return true;
    }
}

// "<http" with no closing '>' is an unterminated IRI; "?x<?y" is a
// comparison. Decided by whether the scanned body starts with a URI scheme.
inline bool looks_like_scheme(std::string_view body) {
    std::size_t i = 0;
    if (i >= body.size() || !std::isalpha(static_cast<unsigned char>(body[i])))
        return false;
    ++i;
    while (i < body.size() &&
           (std::isalnum(static_cast<unsigned char>(body[i])) || body[i] == '+' ||
            body[i] == '-' || body[i] == '.'))
        ++i;
    return i < body.size() && body[i] == ':';
}

} // namespace detail

inline TokenSequence tokenize(std::string_view query) {
    using namespace detail;
    TokenSequence out;
    std::size_t i = 0;
    const std::size_t n = query.size();

    auto push = [&](std::string lexeme, TokenKind kind, std::size_t off) {
        out.push_back(Token{std::move(lexeme), kind, off});
    };

    // Scans one quoted string starting at i (positioned on the quote); returns
    // position one past the closing quote. Throws on unterminated input.
    auto scan_string = [&](std::size_t start) -> std::size_t {
        const char q = query[start];
        bool long_form = start + 2 < n && query[start + 1] == q && query[start + 2] == q;
        std::size_t p = start + (long_form ? 3 : 1);
        while (p < n) {
            if (query[p] == '\\' && p + 1 < n) {
                p += 2;
                continue;
            }
            if (query[p] == q) {
                if (!long_form)
                    return p + 1;
                if (p + 2 < n && query[p + 1] == q && query[p + 2] == q)
                    return p + 3;
            }
            if (!long_form && (query[p] == '\n' || query[p] == '\r'))
                break;
            ++p;
        }
        throw LexicalError("unterminated string literal", start);
    };

    while (i < n) {
        const char c = query[i];
        const std::size_t start = i;

        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
            ++i;
            continue;
        }
        if (c == '#') { // comment to end of line
            while (i < n && query[i] != '\n')
                ++i;
            continue;
        }
        if (c == '<') {
            std::size_t p = i + 1;
            while (p < n && iri_body_char(query[p]))
                ++p;
            if (p < n && query[p] == '>') {
                push(std::string(query.substr(i, p + 1 - i)), TokenKind::iri, start);
                i = p + 1;
                continue;
            }
            if (p >= n && looks_like_scheme(query.substr(i + 1)))
                throw LexicalError("unterminated IRI", start);
            if (i + 1 < n && query[i + 1] == '=') {
                push("<=", TokenKind::punctuation, start);
                i += 2;
            } else {
                push("<", TokenKind::punctuation, start);
                ++i;
            }
            continue;
        }
        if (c == '"' || c == '\'') {
            std::size_t end = scan_string(i);
            // Attach directly adjacent language tag or datatype so an RDF
            // literal stays one token.
            if (end < n && query[end] == '@') {
                std::size_t p = end + 1;
                while (p < n && (std::isalnum(static_cast<unsigned char>(query[p])) || query[p] == '-'))
                    ++p;
                if (p > end + 1)
                    end = p;
            } else if (end + 1 < n && query[end] == '^' && query[end + 1] == '^') {
                std::size_t p = end + 2;
                if (p < n && query[p] == '<') {
                    std::size_t q2 = p + 1;
                    while (q2 < n && iri_body_char(query[q2]))
                        ++q2;
                    if (q2 < n && query[q2] == '>')
                        end = q2 + 1;
                } else if (p < n && (is_name_char(query[p]) || query[p] == ':')) {
                    std::size_t q2 = p;
                    while (q2 < n && is_name_char(query[q2]))
                        ++q2;
                    if (q2 < n && query[q2] == ':') {
                        ++q2;
                        while (q2 < n && (is_local_char(query[q2]) ||
                                          (query[q2] == '.' && q2 + 1 < n && is_local_char(query[q2 + 1]))))
                            ++q2;
                        end = q2;
                    }
                }
            }
            push(std::string(query.substr(i, end - i)), TokenKind::literal, start);
            i = end;
            continue;
        }
        if (c == '?' || c == '$') {
            if (i + 1 < n && is_name_char(query[i + 1])) {
                std::size_t p = i + 1;
                while (p < n && is_name_char(query[p]))
                    ++p;
                push(std::string(query.substr(i, p - i)), TokenKind::variable, start);
                i = p;
            } else {
                push(std::string(1, c), TokenKind::path_op, start);
                ++i;
            }
            continue;
        }
        if (c == '_' && i + 1 < n && query[i + 1] == ':') {
            std::size_t p = i + 2;
            while (p < n && (is_name_char(query[p]) ||
                             (query[p] == '.' && p + 1 < n && is_name_char(query[p + 1]))))
                ++p;
            push(std::string(query.substr(i, p - i)), TokenKind::variable, start);
            i = p;
            continue;
        }
        if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(query[i + 1]))) {
            std::size_t p = i;
            while (p < n && is_digit(query[p]))
                ++p;
            if (p < n && query[p] == '.' && p + 1 < n && is_digit(query[p + 1])) {
                ++p;
                while (p < n && is_digit(query[p]))
                    ++p;
            }
            if (p < n && (query[p] == 'e' || query[p] == 'E')) {
                std::size_t q2 = p + 1;
                if (q2 < n && (query[q2] == '+' || query[q2] == '-'))
                    ++q2;
                if (q2 < n && is_digit(query[q2])) {
                    ++q2;
                    while (q2 < n && is_digit(query[q2]))
                        ++q2;
                    p = q2;
                }
            }
            push(std::string(query.substr(i, p - i)), TokenKind::number, start);
            i = p;
            continue;
        }
        if ((c == '+' || c == '-') && i + 1 < n &&
            (is_digit(query[i + 1]) || (query[i + 1] == '.' && i + 2 < n && is_digit(query[i + 2])))) {
            // Sign fuses into the numeric literal unless the previous token
            // could end an operand ("1-2" stays a subtraction).
            bool prev_is_operand = false;
            if (!out.empty()) {
                const Token& prev = out.back();
                prev_is_operand = prev.kind == TokenKind::number || prev.kind == TokenKind::variable ||
                                  prev.kind == TokenKind::iri || prev.kind == TokenKind::prefixed_name ||
                                  prev.kind == TokenKind::literal || prev.lexeme == ")" || prev.lexeme == "}";
            }
            if (!prev_is_operand) {
                std::size_t p = i + 1;
                while (p < n && is_digit(query[p]))
                    ++p;
                if (p < n && query[p] == '.' && p + 1 < n && is_digit(query[p + 1])) {
                    ++p;
                    while (p < n && is_digit(query[p]))
                        ++p;
                }
                push(std::string(query.substr(i, p - i)), TokenKind::number, start);
                i = p;
                continue;
            }
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
            static_cast<unsigned char>(c) >= 0x80 || c == ':') {
            std::size_t p = i;
            while (p < n && is_name_char(query[p]))
                ++p;
            if (p < n && query[p] == ':') { // prefixed name (possibly empty prefix)
                std::size_t q2 = p + 1;
                while (q2 < n && (is_local_char(query[q2]) ||
                                  (query[q2] == '.' && q2 + 1 < n && is_local_char(query[q2 + 1]))))
                    ++q2;
                push(std::string(query.substr(i, q2 - i)), TokenKind::prefixed_name, start);
                i = q2;
                continue;
            }
            std::string word(query.substr(i, p - i));
            i = p;
            if (word == "a") {
                push("a", TokenKind::keyword, start);
            } else {
                std::string upper = to_upper(word);
                if (upper == "TRUE" || upper == "FALSE")
                    push(to_lower(word), TokenKind::literal, start);
                else
                    push(std::move(upper), TokenKind::keyword, start);
            }
            continue;
        }
        // operators and punctuation
        auto two = i + 1 < n ? query.substr(i, 2) : std::string_view{};
        if (two == "&&" || two == "||" || two == "!=" || two == ">=" || two == "<=" || two == "^^") {
            push(std::string(two), TokenKind::punctuation, start);
            i += 2;
            continue;
        }
        if (c == '^' || c == '|') {
            push(std::string(1, c), TokenKind::path_op, start);
            ++i;
            continue;
        }
        switch (c) {
        case '{':
        case '}':
        case '(':
        case ')':
        case '[':
        case ']':
        case ',':
        case ';':
        case '.':
        case '=':
        case '>':
        case '!':
        case '+':
        case '-':
        case '*':
        case '/':
            push(std::string(1, c), TokenKind::punctuation, start);
            ++i;
            continue;
        default: {
            // Unknown byte: pass through one UTF-8 code point as punctuation.
            std::size_t len = 1;
            unsigned char u = static_cast<unsigned char>(c);
            if (u >= 0xF0)
                len = 4;
            else if (u >= 0xE0)
                len = 3;
            else if (u >= 0xC0)
                len = 2;
            len = std::min(len, n - i);
            push(std::string(query.substr(i, len)), TokenKind::punctuation, start);
            i += len;
        }
        }
    }
    return out;
}

inline std::string join_lexemes(const TokenSequence& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i)
            out += ' ';
        out += tokens[i].lexeme;
    }
    return out;
}

} // namespace sparqleval::sparql
