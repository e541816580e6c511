#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "propsel/harness.hpp"
#include "propsel/solver.hpp"

namespace propsel {

// Extra CPU time paid for choosing `chosen` instead of the fastest solved
// variant. Timed-out choices are charged limit minus the fastest time
// (a lower bound); instances nothing solved cost 0 for every choice.
double penalty(int chosen_variant, const std::array<RunRecord, kVariantCount>& cells,
               double time_limit_s);

// Effective time of a cell: cpu_time when solved, the limit on timeout.
double effective_time(const RunRecord& cell, double time_limit_s);

struct PenaltyRow {
    std::string name;
    double total_penalty = 0.0;
    double mean_speedup = 0.0;      // default time / chosen time, overhead excluded
    double mean_speedup_net = 0.0;  // overhead (feature + selection time) included
    std::vector<int> choices;       // per instance, variant index (-1: not applicable)
    std::vector<double> penalties;  // per instance
};

// Chooses a variant index for the instance at the given matrix position.
using Selector = std::function<int(size_t instance_pos)>;

struct OverheadInput {
    std::vector<double> feature_seconds;  // per instance, matrix order
    std::vector<double> select_seconds;
};

PenaltyRow evaluate_selector(const std::string& name, const Selector& selector,
                             const RuntimeMatrix& matrix, const OverheadInput& overhead);

// oracle, anti-oracle, default decision, random decision (seeded), plus the
// exact expectation of the random row (mean over all 9 choices).
std::vector<PenaltyRow> baselines(const RuntimeMatrix& matrix, uint64_t seed);

// Single-variant row: always choose `variant`.
PenaltyRow constant_row(int variant, const RuntimeMatrix& matrix);

std::string format_report(const std::vector<PenaltyRow>& rows, const RuntimeMatrix& matrix,
                          uint64_t random_seed);

// Machine-readable per-instance records for one selector row.
std::string per_instance_csv(const PenaltyRow& row, const RuntimeMatrix& matrix,
                             const OverheadInput& overhead);

}  // namespace propsel
