#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "propsel/csp.hpp"

namespace propsel {

enum class SccScope { Full, PerComponent };
enum class Trigger { AnyDomainChange, AssignmentOnly };

// One of the 9 alldifferent propagator configurations: the naive pairwise
// decomposition, or generalised arc consistency with three implementation
// knobs. All 8 GAC configurations remove exactly the same values; they
// differ only in the work they do to find them.
struct VariantId {
    bool gac = false;
    // GAC knobs (ignored when gac == false):
    bool incremental_matching = false;
    SccScope scc = SccScope::Full;
    Trigger trigger = Trigger::AnyDomainChange;

    // Total order: naive is 0, GAC knobs lexicographic in
    // (incremental_matching, scc, trigger) give 1..8.
    int index() const {
        if (!gac) return 0;
        return 1 + (incremental_matching ? 4 : 0) + (scc == SccScope::PerComponent ? 2 : 0) +
               (trigger == Trigger::AssignmentOnly ? 1 : 0);
    }

    std::string str() const;

    static VariantId naive() { return VariantId{}; }
    static VariantId from_index(int i);
    static std::optional<VariantId> from_string(std::string_view s);
    static const std::array<VariantId, 9>& all();

    friend bool operator==(const VariantId&, const VariantId&) = default;
};

constexpr int kVariantCount = 9;

// The configuration used when no per-instance selection is made
// (incremental matching, per-component SCCs, any-change trigger).
VariantId default_variant();

enum class SolveStatus { Sat, Unsat, Timeout };

const char* to_string(SolveStatus s);
std::optional<SolveStatus> status_from_string(std::string_view s);

struct SearchLimits {
    double time_limit_s = 3600.0;
    std::optional<uint64_t> node_limit;
    std::optional<uint64_t> op_limit;
};

struct RunRecord {
    std::string instance;
    VariantId variant;
    SolveStatus status = SolveStatus::Timeout;
    double cpu_time_s = 0.0;
    uint64_t nodes = 0;
    uint64_t op_count = 0;
};

struct SolveResult {
    RunRecord record;
    // Aligned with instance.variables when status == Sat, empty otherwise.
    std::vector<int64_t> solution;
};

// Depth-first d-way search in declaration order with propagation to
// fixpoint after every assignment. Each value-assignment attempt counts
// as one node. Stops at the first solution or a proof of unsatisfiability.
SolveResult solve(const CspInstance& instance, const VariantId& variant,
                  const SearchLimits& limits);

enum class PropagateOutcome { Stable, Pruned, Failed };

// Single-constraint entry points over a plain list of scope domains,
// used by unit tests and oracle checks. Domains are mutated in place.
PropagateOutcome propagate_naive_alldiff(std::vector<std::vector<int64_t>>& domains,
                                         uint64_t* op_count = nullptr);
PropagateOutcome propagate_gac_alldiff(std::vector<std::vector<int64_t>>& domains,
                                       const VariantId& knobs, uint64_t* op_count = nullptr);

}  // namespace propsel
