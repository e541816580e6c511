#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace propsel {

// Syntax error in an instance file. Positions are 1-based.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + msg),
          line(line),
          column(column) {}
    int line;
    int column;
};

// Structurally well-formed input that violates a model invariant
// (unknown variable, empty domain, arity mismatch, ...).
// constraint_index is -1 for errors at the variable level.
struct SemanticError : std::runtime_error {
    SemanticError(const std::string& msg, int constraint_index)
        : std::runtime_error(constraint_index >= 0
                                 ? "constraint " + std::to_string(constraint_index) + ": " + msg
                                 : msg),
          constraint_index(constraint_index) {}
    int constraint_index;
};

struct Variable {
    std::string name;
    std::vector<int64_t> domain;  // declared value order, no duplicates
    bool is_auxiliary = false;
};

enum class ConstraintKind { AllDifferent, Disequality, Table };

enum class TablePolarity { Allowed, Disallowed };

struct Constraint {
    ConstraintKind kind = ConstraintKind::AllDifferent;
    std::vector<int> scope;  // variable indices, declared order
    // Table only:
    TablePolarity polarity = TablePolarity::Allowed;
    std::vector<std::vector<int64_t>> tuples;

    // Satisfaction test for a full assignment to the scope
    // (values aligned with scope order).
    bool satisfied_by(std::span<const int64_t> values) const;
};

struct CspInstance {
    std::string name;
    std::vector<Variable> variables;  // declaration order is the search order
    std::vector<Constraint> constraints;

    int variable_index(std::string_view name) const;

    // Throws SemanticError on any violated model invariant.
    void validate() const;

    friend bool operator==(const CspInstance&, const CspInstance&);
};

bool operator==(const Variable&, const Variable&);
bool operator==(const Constraint&, const Constraint&);

// Parses the line-oriented instance format (see README). fallback_name is
// used when the file carries no `name` line.
CspInstance parse_instance(const std::string& text, const std::string& fallback_name = "instance");

// Canonical text form; parse_instance(serialize_instance(x)) == x.
std::string serialize_instance(const CspInstance& instance);

}  // namespace propsel
