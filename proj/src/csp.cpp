#include "propsel/csp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace propsel {

bool Constraint::satisfied_by(std::span<const int64_t> values) const {
    switch (kind) {
        case ConstraintKind::AllDifferent:
            for (size_t i = 0; i < values.size(); ++i)
                for (size_t j = i + 1; j < values.size(); ++j)
                    if (values[i] == values[j]) return false;
            return true;
        case ConstraintKind::Disequality:
            return values[0] != values[1];
        case ConstraintKind::Table: {
            bool listed = false;
            for (const auto& t : tuples) {
                if (std::equal(t.begin(), t.end(), values.begin(), values.end())) {
                    listed = true;
                    break;
                }
            }
            return polarity == TablePolarity::Allowed ? listed : !listed;
        }
    }
    return false;
}

int CspInstance::variable_index(std::string_view name) const {
    for (size_t i = 0; i < variables.size(); ++i)
        if (variables[i].name == name) return static_cast<int>(i);
    return -1;
}

void CspInstance::validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& v : variables) {
        if (!seen.insert(v.name).second)
            throw SemanticError("duplicate variable name '" + v.name + "'", -1);
        if (v.domain.empty())
            throw SemanticError("variable '" + v.name + "' has an empty domain", -1);
        std::unordered_set<int64_t> vals;
        for (int64_t x : v.domain)
            if (!vals.insert(x).second)
                throw SemanticError("variable '" + v.name + "' repeats domain value " +
                                        std::to_string(x),
                                    -1);
    }
    for (size_t ci = 0; ci < constraints.size(); ++ci) {
        const auto& c = constraints[ci];
        const int idx = static_cast<int>(ci);
        std::unordered_set<int> scope_seen;
        for (int s : c.scope) {
            if (s < 0 || s >= static_cast<int>(variables.size()))
                throw SemanticError("scope references a variable that does not exist", idx);
            if (!scope_seen.insert(s).second)
                throw SemanticError("variable '" + variables[s].name + "' repeated in scope", idx);
        }
        switch (c.kind) {
            case ConstraintKind::AllDifferent:
                if (c.scope.size() < 2)
                    throw SemanticError("alldiff needs at least 2 variables", idx);
                break;
            case ConstraintKind::Disequality:
                if (c.scope.size() != 2)
                    throw SemanticError("diseq needs exactly 2 variables", idx);
                break;
            case ConstraintKind::Table:
                if (c.scope.empty())
                    throw SemanticError("table needs a non-empty scope", idx);
                for (const auto& t : c.tuples)
                    if (t.size() != c.scope.size())
                        throw SemanticError("tuple arity " + std::to_string(t.size()) +
                                                " does not match scope arity " +
                                                std::to_string(c.scope.size()),
                                            idx);
                break;
        }
    }
}

bool operator==(const Variable& a, const Variable& b) {
    return a.name == b.name && a.domain == b.domain && a.is_auxiliary == b.is_auxiliary;
}

bool operator==(const Constraint& a, const Constraint& b) {
    return a.kind == b.kind && a.scope == b.scope &&
           (a.kind != ConstraintKind::Table || (a.polarity == b.polarity && a.tuples == b.tuples));
}

bool operator==(const CspInstance& a, const CspInstance& b) {
    return a.name == b.name && a.variables == b.variables && a.constraints == b.constraints;
}

namespace {

enum class TokKind { Ident, Int, Punct };

struct Token {
    TokKind kind;
    std::string text;
    int64_t value = 0;  // Int only
    int column = 0;     // 1-based
};

std::vector<Token> tokenize(const std::string& line, int line_no) {
    std::vector<Token> out;
    size_t i = 0;
    const size_t n = line.size();
    while (i < n) {
        char c = line[i];
        if (c == '#') break;  // comment to end of line
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const int col = static_cast<int>(i) + 1;
        if (c == '(' || c == ')' || c == ';' || c == ',' || c == ':') {
            out.push_back({TokKind::Punct, std::string(1, c), 0, col});
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < n && (std::isalnum(static_cast<unsigned char>(line[j])) ||
                             line[j] == '_' || line[j] == '-'))
                ++j;
            out.push_back({TokKind::Ident, line.substr(i, j - i), 0, col});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && i + 1 < n && std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
            size_t j = i + 1;
            while (j < n && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
            int64_t value = 0;
            auto res = std::from_chars(line.data() + i, line.data() + j, value);
            if (res.ec != std::errc{})
                throw ParseError("integer out of range", line_no, col);
            out.push_back({TokKind::Int, line.substr(i, j - i), value, col});
            i = j;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_no, col);
    }
    return out;
}

struct LineParser {
    const std::vector<Token>& toks;
    int line_no;
    size_t pos = 0;

    bool done() const { return pos >= toks.size(); }
    int here_col() const {
        if (done()) return toks.empty() ? 1 : toks.back().column + static_cast<int>(toks.back().text.size());
        return toks[pos].column;
    }
    const Token& expect(TokKind kind, const std::string& what) {
        if (done() || toks[pos].kind != kind)
            throw ParseError("expected " + what, line_no, here_col());
        return toks[pos++];
    }
    bool eat_punct(char c) {
        if (!done() && toks[pos].kind == TokKind::Punct && toks[pos].text[0] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect_punct(char c) {
        if (!eat_punct(c))
            throw ParseError(std::string("expected '") + c + "'", line_no, here_col());
    }
    void expect_end() {
        if (!done())
            throw ParseError("unexpected trailing token '" + toks[pos].text + "'", line_no,
                             here_col());
    }
};

}  // namespace

CspInstance parse_instance(const std::string& text, const std::string& fallback_name) {
    CspInstance inst;
    inst.name = fallback_name;
    bool name_seen = false;
    std::unordered_map<std::string, int> var_index;

    auto lookup_scope = [&](const Token& tok, int constraint_index) {
        auto it = var_index.find(tok.text);
        if (it == var_index.end())
            throw SemanticError("unknown variable '" + tok.text + "' in scope", constraint_index);
        return it->second;
    };

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::vector<Token> toks = tokenize(line, line_no);
        if (toks.empty()) continue;
        LineParser p{toks, line_no};
        const Token& head = p.expect(TokKind::Ident, "a directive");

        if (head.text == "name") {
            const Token& n = p.expect(TokKind::Ident, "an instance name");
            p.expect_end();
            if (name_seen) throw ParseError("duplicate name directive", line_no, head.column);
            inst.name = n.text;
            name_seen = true;
        } else if (head.text == "var") {
            Variable v;
            v.name = p.expect(TokKind::Ident, "a variable name").text;
            if (!p.done() && toks[p.pos].kind == TokKind::Ident && toks[p.pos].text == "aux") {
                v.is_auxiliary = true;
                ++p.pos;
            }
            p.expect_punct(':');
            while (!p.done()) v.domain.push_back(p.expect(TokKind::Int, "a domain value").value);
            if (v.domain.empty())
                throw SemanticError("variable '" + v.name + "' has an empty domain", -1);
            if (var_index.count(v.name))
                throw SemanticError("duplicate variable name '" + v.name + "'", -1);
            var_index[v.name] = static_cast<int>(inst.variables.size());
            inst.variables.push_back(std::move(v));
        } else if (head.text == "alldiff" || head.text == "diseq") {
            Constraint c;
            c.kind = head.text == "alldiff" ? ConstraintKind::AllDifferent
                                            : ConstraintKind::Disequality;
            const int ci = static_cast<int>(inst.constraints.size());
            while (!p.done())
                c.scope.push_back(lookup_scope(p.expect(TokKind::Ident, "a variable name"), ci));
            if (c.kind == ConstraintKind::AllDifferent && c.scope.size() < 2)
                throw SemanticError("alldiff needs at least 2 variables", ci);
            if (c.kind == ConstraintKind::Disequality && c.scope.size() != 2)
                throw SemanticError("diseq needs exactly 2 variables", ci);
            inst.constraints.push_back(std::move(c));
        } else if (head.text == "table") {
            Constraint c;
            c.kind = ConstraintKind::Table;
            const int ci = static_cast<int>(inst.constraints.size());
            const Token& pol = p.expect(TokKind::Ident, "'allowed' or 'disallowed'");
            if (pol.text == "allowed")
                c.polarity = TablePolarity::Allowed;
            else if (pol.text == "disallowed")
                c.polarity = TablePolarity::Disallowed;
            else
                throw ParseError("expected 'allowed' or 'disallowed'", line_no, pol.column);
            p.expect_punct('(');
            while (!p.eat_punct(')'))
                c.scope.push_back(lookup_scope(p.expect(TokKind::Ident, "a variable name"), ci));
            if (c.scope.empty()) throw SemanticError("table needs a non-empty scope", ci);
            while (p.eat_punct(';')) {
                std::vector<int64_t> tuple;
                tuple.push_back(p.expect(TokKind::Int, "a tuple value").value);
                while (p.eat_punct(',')) tuple.push_back(p.expect(TokKind::Int, "a tuple value").value);
                if (tuple.size() != c.scope.size())
                    throw SemanticError("tuple arity " + std::to_string(tuple.size()) +
                                            " does not match scope arity " +
                                            std::to_string(c.scope.size()),
                                        ci);
                c.tuples.push_back(std::move(tuple));
            }
            p.expect_end();
            inst.constraints.push_back(std::move(c));
        } else {
            throw ParseError("unknown directive '" + head.text + "'", line_no, head.column);
        }
    }

    inst.validate();
    return inst;
}

std::string serialize_instance(const CspInstance& inst) {
    std::ostringstream out;
    out << "name " << inst.name << "\n";
    for (const auto& v : inst.variables) {
        out << "var " << v.name;
        if (v.is_auxiliary) out << " aux";
        out << " :";
        for (int64_t x : v.domain) out << ' ' << x;
        out << "\n";
    }
    for (const auto& c : inst.constraints) {
        switch (c.kind) {
            case ConstraintKind::AllDifferent:
                out << "alldiff";
                for (int s : c.scope) out << ' ' << inst.variables[s].name;
                break;
            case ConstraintKind::Disequality:
                out << "diseq " << inst.variables[c.scope[0]].name << ' '
                    << inst.variables[c.scope[1]].name;
                break;
            case ConstraintKind::Table: {
                out << "table "
                    << (c.polarity == TablePolarity::Allowed ? "allowed" : "disallowed") << " (";
                for (size_t i = 0; i < c.scope.size(); ++i)
                    out << (i ? " " : "") << inst.variables[c.scope[i]].name;
                out << ")";
                for (const auto& t : c.tuples) {
                    out << " ;";
                    for (size_t i = 0; i < t.size(); ++i) out << (i ? "," : " ") << t[i];
                }
                break;
            }
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace propsel
