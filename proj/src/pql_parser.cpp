#include "act/pql.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>

namespace act::pql {

namespace {

std::string describe_expected(const std::set<std::string>& expected) {
    std::string out;
    for (const auto& e : expected) out += (out.empty() ? "" : ", ") + e;
    return out;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::set<std::string> expected,
                         const std::string& found)
    : Error("pql.syntax", "syntax error at byte " + std::to_string(offset) + ": expected " +
                              describe_expected(expected) + ", found " + found),
      offset_(offset),
      expected_(std::move(expected)) {}

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::eq: return "=";
        case CompareOp::ne: return "<>";
        case CompareOp::lt: return "<";
        case CompareOp::le: return "<=";
        case CompareOp::gt: return ">";
        case CompareOp::ge: return ">=";
    }
    return "=";
}

Expr Expr::variable_ref(std::string name) {
    Expr e;
    e.kind = Kind::variable;
    e.name = std::move(name);
    return e;
}

Expr Expr::property_ref(std::string name, std::string property) {
    Expr e;
    e.kind = Kind::property;
    e.name = std::move(name);
    e.property = std::move(property);
    return e;
}

Expr Expr::value(PropertyValue v) {
    Expr e;
    e.kind = Kind::literal;
    e.literal = std::move(v);
    return e;
}

namespace {

enum class Tok {
    end,
    ident,
    string,
    integer,
    real,
    lparen,
    rparen,
    lbracket,
    rbracket,
    lbrace,
    rbrace,
    colon,
    comma,
    dot,
    dotdot,
    semicolon,
    eq,
    ne,
    lt,
    le,
    gt,
    ge,
    minus,
    star,
};

struct Token {
    Tok kind = Tok::end;
    std::string text;  // identifier / decoded string / number spelling
    std::size_t offset = 0;
};

std::string tok_name(Tok t) {
    switch (t) {
        case Tok::end: return "end of input";
        case Tok::ident: return "identifier";
        case Tok::string: return "string";
        case Tok::integer: return "integer";
        case Tok::real: return "float";
        case Tok::lparen: return "'('";
        case Tok::rparen: return "')'";
        case Tok::lbracket: return "'['";
        case Tok::rbracket: return "']'";
        case Tok::lbrace: return "'{'";
        case Tok::rbrace: return "'}'";
        case Tok::colon: return "':'";
        case Tok::comma: return "','";
        case Tok::dot: return "'.'";
        case Tok::dotdot: return "'..'";
        case Tok::semicolon: return "';'";
        case Tok::eq: return "'='";
        case Tok::ne: return "'<>'";
        case Tok::lt: return "'<'";
        case Tok::le: return "'<='";
        case Tok::gt: return "'>'";
        case Tok::ge: return "'>='";
        case Tok::minus: return "'-'";
        case Tok::star: return "'*'";
    }
    return "?";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto push = [&](Tok k, std::size_t at, std::size_t len) {
        out.push_back({k, std::string(s.substr(at, len)), at});
        i = at + len;
    };
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
            while (i < s.size() && s[i] != '\n') ++i;
            continue;
        }
        const std::size_t at = i;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            push(Tok::ident, at, j - at);
            continue;
        }
        if (c == '`') {
            const std::size_t close = s.find('`', i + 1);
            if (close == std::string_view::npos)
                throw SyntaxError(at, {"closing '`'"}, "end of input");
            out.push_back({Tok::ident, std::string(s.substr(i + 1, close - i - 1)), at});
            i = close + 1;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            bool real = false;
            if (j + 1 < s.size() && s[j] == '.' && std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
                real = true;
                ++j;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            }
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
                    real = true;
                    j = k;
                    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                }
            }
            push(real ? Tok::real : Tok::integer, at, j - at);
            continue;
        }
        if (c == '\'' || c == '"') {
            std::string value;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < s.size()) {
                const char d = s[j];
                if (d == c) {
                    closed = true;
                    ++j;
                    break;
                }
                if (d == '\\' && j + 1 < s.size()) {
                    const char e = s[j + 1];
                    switch (e) {
                        case 'n': value.push_back('\n'); break;
                        case 't': value.push_back('\t'); break;
                        case 'r': value.push_back('\r'); break;
                        default: value.push_back(e); break;
                    }
                    j += 2;
                    continue;
                }
                value.push_back(d);
                ++j;
            }
            if (!closed) throw SyntaxError(at, {"closing quote"}, "end of input");
            out.push_back({Tok::string, std::move(value), at});
            i = j;
            continue;
        }
        auto two = [&](char a, char b) { return c == a && i + 1 < s.size() && s[i + 1] == b; };
        if (two('<', '>')) { push(Tok::ne, at, 2); continue; }
        if (two('<', '=')) { push(Tok::le, at, 2); continue; }
        if (two('>', '=')) { push(Tok::ge, at, 2); continue; }
        if (two('!', '=')) { push(Tok::ne, at, 2); continue; }
        if (two('.', '.')) { push(Tok::dotdot, at, 2); continue; }
        switch (c) {
            case '(': push(Tok::lparen, at, 1); continue;
            case ')': push(Tok::rparen, at, 1); continue;
            case '[': push(Tok::lbracket, at, 1); continue;
            case ']': push(Tok::rbracket, at, 1); continue;
            case '{': push(Tok::lbrace, at, 1); continue;
            case '}': push(Tok::rbrace, at, 1); continue;
            case ':': push(Tok::colon, at, 1); continue;
            case ',': push(Tok::comma, at, 1); continue;
            case '.': push(Tok::dot, at, 1); continue;
            case ';': push(Tok::semicolon, at, 1); continue;
            case '=': push(Tok::eq, at, 1); continue;
            case '<': push(Tok::lt, at, 1); continue;
            case '>': push(Tok::gt, at, 1); continue;
            case '-': push(Tok::minus, at, 1); continue;
            case '*': push(Tok::star, at, 1); continue;
            default: break;
        }
        throw SyntaxError(at, {"token"}, std::string("'") + c + "'");
    }
    out.push_back({Tok::end, {}, s.size()});
    return out;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

const std::set<std::string, std::less<>> kReserved = {
    "MATCH", "WHERE", "RETURN", "DISTINCT", "AND", "OR", "NOT", "TRUE", "FALSE"};

bool is_reserved(std::string_view word) {
    std::string upper(word);
    for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return kReserved.contains(upper);
}

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

    std::vector<Query> script() {
        std::vector<Query> out;
        while (true) {
            while (peek().kind == Tok::semicolon) ++pos_;
            if (peek().kind == Tok::end) break;
            out.push_back(query());
            if (peek().kind != Tok::end) expect(Tok::semicolon);
        }
        return out;
    }

    Query single() {
        Query q = query();
        if (peek().kind == Tok::semicolon) ++pos_;
        if (peek().kind != Tok::end) fail({"end of input"});
        return q;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }

    [[noreturn]] void fail(std::set<std::string> expected) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
        if (t.kind == Tok::string) found = "string '" + t.text + "'";
        throw SyntaxError(t.offset, std::move(expected), found);
    }

    const Token& expect(Tok k) {
        if (peek().kind != k) fail({tok_name(k)});
        return toks_[pos_++];
    }

    bool is_keyword(std::string_view kw, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::ident && iequals(t.text, kw);
    }

    bool accept_keyword(std::string_view kw) {
        if (!is_keyword(kw)) return false;
        ++pos_;
        return true;
    }

    void expect_keyword(std::string_view kw) {
        if (!accept_keyword(kw)) fail({std::string(kw)});
    }

    bool accept(Tok k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }

    std::string name() {
        if (peek().kind != Tok::ident || is_reserved(peek().text)) fail({"identifier"});
        return toks_[pos_++].text;
    }

    std::string symbolic_name() {
        // Labels, relation types and property keys may be keywords.
        if (peek().kind != Tok::ident) fail({"identifier"});
        return toks_[pos_++].text;
    }

    Query query() {
        Query q;
        if (!is_keyword("MATCH")) fail({"MATCH"});
        while (accept_keyword("MATCH")) q.matches.push_back(match_clause());
        if (accept_keyword("WHERE")) q.where = expression();
        if (!is_keyword("RETURN")) {
            std::set<std::string> exp = {"MATCH", "RETURN"};
            if (!q.where) exp.insert("WHERE");
            if (peek().kind == Tok::comma || peek().kind == Tok::minus ||
                peek().kind == Tok::lt)
                exp.insert(tok_name(peek().kind));
            fail(std::move(exp));
        }
        ++pos_;
        q.distinct = accept_keyword("DISTINCT");
        do {
            q.returns.push_back(return_item());
        } while (accept(Tok::comma));
        return q;
    }

    MatchClause match_clause() {
        MatchClause m;
        do {
            m.patterns.push_back(path_pattern());
        } while (accept(Tok::comma));
        return m;
    }

    PathPattern path_pattern() {
        PathPattern p;
        if (peek().kind == Tok::ident && peek(1).kind == Tok::eq) {
            p.path_variable = name();
            ++pos_;
        }
        if (peek().kind == Tok::lparen && peek(1).kind == Tok::lparen) {
            ++pos_;
            chain(p);
            expect(Tok::rparen);
        } else {
            chain(p);
        }
        return p;
    }

    void chain(PathPattern& p) {
        p.nodes.push_back(node_pattern());
        while (peek().kind == Tok::minus || peek().kind == Tok::lt) {
            p.rels.push_back(rel_pattern());
            p.nodes.push_back(node_pattern());
        }
    }

    NodePattern node_pattern() {
        NodePattern n;
        expect(Tok::lparen);
        if (peek().kind == Tok::ident) n.variable = name();
        if (accept(Tok::colon)) n.label = symbolic_name();
        if (peek().kind == Tok::lbrace) n.properties = property_map();
        if (!n.variable && !n.label && n.properties.empty())
            fail({"identifier", "':'", "'{'"});
        if (peek().kind != Tok::rparen) {
            std::set<std::string> exp = {"')'"};
            if (n.properties.empty()) exp.insert("'{'");
            if (!n.label) exp.insert("':'");
            fail(std::move(exp));
        }
        ++pos_;
        return n;
    }

    RelPattern rel_pattern() {
        RelPattern r;
        const bool left = accept(Tok::lt);
        expect(Tok::minus);
        if (accept(Tok::lbracket)) {
            if (peek().kind == Tok::ident) r.variable = name();
            if (accept(Tok::colon)) r.relation = symbolic_name();
            if (accept(Tok::star)) {
                r.variable_length = true;
                if (peek().kind == Tok::integer) r.min_hops = hop_count();
                if (accept(Tok::dotdot)) {
                    if (peek().kind == Tok::integer) r.max_hops = hop_count();
                } else if (previous().kind == Tok::integer) {
                    r.max_hops = r.min_hops;  // *n means exactly n
                }
            }
            if (peek().kind == Tok::lbrace) r.properties = property_map();
            if (peek().kind != Tok::rbracket) {
                std::set<std::string> exp = {"']'"};
                if (!r.variable_length) exp.insert("'*'");
                if (r.properties.empty()) exp.insert("'{'");
                fail(std::move(exp));
            }
            ++pos_;
        }
        expect(Tok::minus);
        const bool right = accept(Tok::gt);
        if (left && right) throw SyntaxError(toks_[pos_ - 1].offset, {"'-'"}, "'>'");
        r.direction = left ? RelDirection::left
                           : (right ? RelDirection::right : RelDirection::undirected);
        return r;
    }

    const Token& previous() const { return toks_[pos_ - 1]; }

    int hop_count() {
        const Token& t = expect(Tok::integer);
        int v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || v > 64) throw SemanticError("hop bound out of range: " + t.text);
        return v;
    }

    PropertyConstraints property_map() {
        PropertyConstraints out;
        expect(Tok::lbrace);
        if (accept(Tok::rbrace)) return out;
        do {
            std::string key = symbolic_name();
            expect(Tok::colon);
            PropertyValue v = literal();
            if (std::any_of(out.begin(), out.end(), [&](const auto& kv) { return kv.first == key; }))
                throw SemanticError("duplicate property key '" + key + "'");
            out.emplace_back(std::move(key), std::move(v));
        } while (accept(Tok::comma));
        expect(Tok::rbrace);
        return out;
    }

    bool at_literal() const {
        const Token& t = peek();
        if (t.kind == Tok::string || t.kind == Tok::integer || t.kind == Tok::real ||
            t.kind == Tok::minus)
            return true;
        if (t.kind == Tok::ident && (iequals(t.text, "true") || iequals(t.text, "false")))
            return true;
        return t.kind == Tok::ident && peek(1).kind == Tok::lparen &&
               (iequals(t.text, "date") || iequals(t.text, "datetime"));
    }

    PropertyValue literal() {
        const Token& t = peek();
        if (t.kind == Tok::string) {
            ++pos_;
            return PropertyValue(t.text);
        }
        bool negative = false;
        if (t.kind == Tok::minus) {
            negative = true;
            ++pos_;
            if (peek().kind != Tok::integer && peek().kind != Tok::real) fail({"number"});
        }
        const Token& n = peek();
        if (n.kind == Tok::integer) {
            ++pos_;
            std::int64_t v = 0;
            const std::string spelled = (negative ? "-" : "") + n.text;
            auto [p, ec] = std::from_chars(spelled.data(), spelled.data() + spelled.size(), v);
            if (ec != std::errc{}) throw SyntaxError(n.offset, {"integer in range"}, n.text);
            return PropertyValue(v);
        }
        if (n.kind == Tok::real) {
            ++pos_;
            const double v = std::strtod(n.text.c_str(), nullptr);
            if (!std::isfinite(v)) throw SyntaxError(n.offset, {"finite float"}, n.text);
            return PropertyValue(negative ? -v : v);
        }
        if (n.kind == Tok::ident && iequals(n.text, "true")) {
            ++pos_;
            return PropertyValue(true);
        }
        if (n.kind == Tok::ident && iequals(n.text, "false")) {
            ++pos_;
            return PropertyValue(false);
        }
        if (n.kind == Tok::ident && (iequals(n.text, "date") || iequals(n.text, "datetime")) &&
            peek(1).kind == Tok::lparen) {
            const bool date_only = iequals(n.text, "date");
            pos_ += 2;
            const Token& arg = peek();
            if (arg.kind != Tok::string) fail({"string"});
            ++pos_;
            auto ts = parse_timestamp(arg.text);
            if (!ts || (date_only && arg.text.size() != 10))
                throw SyntaxError(arg.offset,
                                  {date_only ? "'YYYY-MM-DD'" : "'YYYY-MM-DDTHH:MM:SS'"},
                                  "'" + arg.text + "'");
            expect(Tok::rparen);
            return PropertyValue(*ts);
        }
        fail({"string", "number", "true", "false", "date(...)", "datetime(...)"});
    }

    // expression := disjunction
    Expr expression() { return disjunction(); }

    Expr disjunction() {
        Expr first = conjunction();
        if (!is_keyword("OR")) return first;
        Expr e;
        e.kind = Expr::Kind::disj;
        e.children.push_back(std::move(first));
        while (accept_keyword("OR")) e.children.push_back(conjunction());
        return e;
    }

    Expr conjunction() {
        Expr first = negation();
        if (!is_keyword("AND")) return first;
        Expr e;
        e.kind = Expr::Kind::conj;
        e.children.push_back(std::move(first));
        while (accept_keyword("AND")) e.children.push_back(negation());
        return e;
    }

    Expr negation() {
        if (accept_keyword("NOT")) {
            Expr e;
            e.kind = Expr::Kind::negation;
            e.children.push_back(negation());
            return e;
        }
        return comparison();
    }

    static std::optional<CompareOp> compare_op(Tok t) {
        switch (t) {
            case Tok::eq: return CompareOp::eq;
            case Tok::ne: return CompareOp::ne;
            case Tok::lt: return CompareOp::lt;
            case Tok::le: return CompareOp::le;
            case Tok::gt: return CompareOp::gt;
            case Tok::ge: return CompareOp::ge;
            default: return std::nullopt;
        }
    }

    Expr comparison() {
        Expr first = operand();
        auto op = compare_op(peek().kind);
        if (!op) {
            if (first.kind != Expr::Kind::literal || first.literal.kind() == ValueKind::boolean)
                return first;
            fail({"'='", "'<>'", "'<'", "'<='", "'>'", "'>='"});
        }
        Expr e;
        e.kind = Expr::Kind::compare;
        e.children.push_back(std::move(first));
        while (op) {
            ++pos_;
            e.ops.push_back(*op);
            e.children.push_back(operand());
            op = compare_op(peek().kind);
        }
        return e;
    }

    Expr operand() {
        if (peek().kind == Tok::lparen) {
            ++pos_;
            Expr e = expression();
            expect(Tok::rparen);
            return e;
        }
        if (at_literal()) return Expr::value(literal());
        if (peek().kind != Tok::ident || is_reserved(peek().text))
            fail({"identifier", "literal", "'('"});
        std::string var = name();
        if (accept(Tok::dot)) return Expr::property_ref(std::move(var), symbolic_name());
        return Expr::variable_ref(std::move(var));
    }

    ReturnItem return_item() {
        if (peek().kind == Tok::ident && iequals(peek().text, "relationships") &&
            peek(1).kind == Tok::lparen) {
            pos_ += 2;
            ReturnItem item{ReturnItem::Kind::relationships, name()};
            expect(Tok::rparen);
            return item;
        }
        return {ReturnItem::Kind::variable, name()};
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

enum class VarKind { node, rel, path };

void check_semantics(const Query& q) {
    std::map<std::string, VarKind, std::less<>> kinds;
    auto declare = [&](const std::string& name, VarKind k) {
        auto [it, inserted] = kinds.emplace(name, k);
        if (!inserted && (it->second != k || k == VarKind::path))
            throw SemanticError("variable '" + name + "' is redeclared with a different role");
    };
    for (const auto& m : q.matches) {
        for (const auto& p : m.patterns) {
            for (const auto& n : p.nodes)
                if (n.variable) declare(*n.variable, VarKind::node);
            for (const auto& r : p.rels) {
                if (r.variable_length) {
                    if (r.variable)
                        throw SemanticError("variable-length relationship '" + *r.variable +
                                            "' cannot be bound; use a path variable");
                    if (r.min_hops < 1)
                        throw SemanticError("variable-length minimum must be at least 1");
                    if (r.max_hops && *r.max_hops < r.min_hops)
                        throw SemanticError("variable-length bounds require min <= max");
                }
                if (r.variable) declare(*r.variable, VarKind::rel);
            }
            if (p.path_variable) declare(*p.path_variable, VarKind::path);
        }
    }
    std::function<void(const Expr&)> walk = [&](const Expr& e) {
        if (e.kind == Expr::Kind::variable || e.kind == Expr::Kind::property) {
            auto it = kinds.find(e.name);
            if (it == kinds.end()) throw UnboundVariable(e.name);
            if (it->second == VarKind::path)
                throw SemanticError("path variable '" + e.name + "' cannot be compared");
        }
        for (const auto& c : e.children) walk(c);
    };
    if (q.where) walk(*q.where);
    for (const auto& item : q.returns) {
        auto it = kinds.find(item.name);
        if (it == kinds.end()) throw UnboundVariable(item.name);
        if (item.kind == ReturnItem::Kind::relationships && it->second != VarKind::path)
            throw SemanticError("relationships() expects a path variable, got '" + item.name + "'");
    }
}

// ---------------------------------------------------------------------------
// Canonical printer

bool plain_identifier(const std::string& s) {
    if (s.empty() || !ident_start(s[0])) return false;
    return std::all_of(s.begin(), s.end(), ident_char);
}

std::string quote_name(const std::string& s) {
    return plain_identifier(s) && !is_reserved(s) ? s : "`" + s + "`";
}

std::string quote_symbol(const std::string& s) { return plain_identifier(s) ? s : "`" + s + "`"; }

std::string quote_string(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        switch (c) {
            case '\'': out += "\\'"; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out + "'";
}

std::string literal_text(const PropertyValue& v) {
    switch (v.kind()) {
        case ValueKind::text:
        case ValueKind::identifier: return quote_string(v.as_text());
        case ValueKind::integer: return std::to_string(v.as_int());
        case ValueKind::real: {
            char buf[40];
            const double d = v.as_real();
            for (int prec = 1; prec <= 17; ++prec) {
                std::snprintf(buf, sizeof buf, "%.*e", prec - 1, d);
                if (std::strtod(buf, nullptr) == d) break;
            }
            std::string s = buf;
            // Keep the float kind on re-parse: "1e+00" -> "1.0e+00".
            const auto epos = s.find('e');
            if (s.find('.') == std::string::npos) s.insert(epos, ".0");
            return s;
        }
        case ValueKind::boolean: return v.as_bool() ? "true" : "false";
        case ValueKind::timestamp: {
            std::string iso = format_timestamp(v.as_timestamp());
            return "datetime('" + iso + "')";
        }
    }
    return "''";
}

void print_props(std::string& out, const PropertyConstraints& props) {
    if (props.empty()) return;
    out += " {";
    bool first = true;
    for (const auto& [k, v] : props) {
        out += (first ? "" : ", ") + quote_symbol(k) + ": " + literal_text(v);
        first = false;
    }
    out += "}";
}

void print_node(std::string& out, const NodePattern& n) {
    out += "(";
    if (n.variable) out += quote_name(*n.variable);
    if (n.label) out += ":" + quote_symbol(*n.label);
    print_props(out, n.properties);
    out += ")";
}

void print_rel(std::string& out, const RelPattern& r) {
    out += r.direction == RelDirection::left ? "<-" : "-";
    const bool bracket = r.variable || r.relation || r.variable_length || !r.properties.empty();
    if (bracket) {
        out += "[";
        if (r.variable) out += quote_name(*r.variable);
        if (r.relation) out += ":" + quote_symbol(*r.relation);
        if (r.variable_length) {
            out += "*";
            if (r.max_hops && *r.max_hops == r.min_hops) {
                out += std::to_string(r.min_hops);
            } else {
                if (r.min_hops != 1 || r.max_hops) out += std::to_string(r.min_hops) + "..";
                if (r.max_hops) out += std::to_string(*r.max_hops);
            }
        }
        print_props(out, r.properties);
        out += "]";
    }
    out += r.direction == RelDirection::right ? "->" : "-";
}

int precedence(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::disj: return 1;
        case Expr::Kind::conj: return 2;
        case Expr::Kind::negation: return 3;
        case Expr::Kind::compare: return 4;
        default: return 5;
    }
}

void print_expr(std::string& out, const Expr& e, int parent) {
    const int mine = precedence(e);
    // Operands of a comparison must be atoms; anything weaker is wrapped,
    // as is an equal-precedence child so the tree shape survives re-parsing.
    const bool wrap = mine < parent || (mine == parent && mine < 5 && mine != 3);
    if (wrap) out += "(";
    switch (e.kind) {
        case Expr::Kind::variable: out += quote_name(e.name); break;
        case Expr::Kind::property:
            out += quote_name(e.name) + "." + quote_symbol(e.property);
            break;
        case Expr::Kind::literal: out += literal_text(e.literal); break;
        case Expr::Kind::compare:
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += " " + std::string(to_string(e.ops[i - 1])) + " ";
                print_expr(out, e.children[i], 5);
            }
            break;
        case Expr::Kind::conj:
        case Expr::Kind::disj:
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += e.kind == Expr::Kind::conj ? " AND " : " OR ";
                print_expr(out, e.children[i], mine);
            }
            break;
        case Expr::Kind::negation:
            out += "NOT ";
            print_expr(out, e.children[0], mine);
            break;
    }
    if (wrap) out += ")";
}

}  // namespace

Query parse(std::string_view text) {
    Query q = Parser(text).single();
    check_semantics(q);
    return q;
}

std::vector<Query> parse_script(std::string_view text) {
    auto qs = Parser(text).script();
    for (const auto& q : qs) check_semantics(q);
    return qs;
}

std::string to_text(const Expr& e) {
    std::string out;
    print_expr(out, e, 0);
    return out;
}

std::string to_text(const Query& q) {
    std::string out;
    for (const auto& m : q.matches) {
        if (!out.empty()) out += " ";
        out += "MATCH ";
        for (std::size_t i = 0; i < m.patterns.size(); ++i) {
            if (i) out += ", ";
            const auto& p = m.patterns[i];
            if (p.path_variable) out += quote_name(*p.path_variable) + " = ";
            print_node(out, p.nodes[0]);
            for (std::size_t j = 0; j < p.rels.size(); ++j) {
                print_rel(out, p.rels[j]);
                print_node(out, p.nodes[j + 1]);
            }
        }
    }
    if (q.where) out += " WHERE " + to_text(*q.where);
    out += " RETURN ";
    if (q.distinct) out += "DISTINCT ";
    for (std::size_t i = 0; i < q.returns.size(); ++i) {
        if (i) out += ", ";
        const auto& r = q.returns[i];
        out += r.kind == ReturnItem::Kind::relationships ? "relationships(" + quote_name(r.name) + ")"
                                                         : quote_name(r.name);
    }
    return out;
}

VariableTable variables(const Query& q) {
    VariableTable t;
    auto add = [](std::vector<std::string>& v, const std::string& n) {
        if (std::find(v.begin(), v.end(), n) == v.end()) v.push_back(n);
    };
    for (const auto& m : q.matches)
        for (const auto& p : m.patterns) {
            for (const auto& n : p.nodes)
                if (n.variable) add(t.nodes, *n.variable);
            for (const auto& r : p.rels)
                if (r.variable) add(t.rels, *r.variable);
            if (p.path_variable) add(t.paths, *p.path_variable);
        }
    return t;
}

}  // namespace act::pql
