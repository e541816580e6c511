#include "propsel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "propsel/rng.hpp"
#include "propsel/util.hpp"

namespace propsel {

double effective_time(const RunRecord& cell, double time_limit_s) {
    return cell.status == SolveStatus::Timeout ? time_limit_s : cell.cpu_time_s;
}

double penalty(int chosen_variant, const std::array<RunRecord, kVariantCount>& cells,
               double time_limit_s) {
    double fastest = std::numeric_limits<double>::infinity();
    bool any_solved = false;
    for (const auto& c : cells) {
        if (c.status == SolveStatus::Timeout) continue;
        any_solved = true;
        fastest = std::min(fastest, c.cpu_time_s);
    }
    if (!any_solved) return 0.0;
    const RunRecord& chosen = cells[chosen_variant];
    if (chosen.status == SolveStatus::Timeout) return std::max(0.0, time_limit_s - fastest);
    return std::max(0.0, chosen.cpu_time_s - fastest);
}

namespace {

double ratio_or(double num, double den, double fallback_when_both_zero) {
    if (den > 0.0) return num / den;
    if (num == 0.0) return fallback_when_both_zero;
    return std::numeric_limits<double>::infinity();
}

}  // namespace

PenaltyRow evaluate_selector(const std::string& name, const Selector& selector,
                             const RuntimeMatrix& matrix, const OverheadInput& overhead) {
    PenaltyRow row;
    row.name = name;
    const int def = default_variant().index();
    std::vector<double> speedups, speedups_net;
    for (size_t i = 0; i < matrix.instances.size(); ++i) {
        const int chosen = selector(i);
        row.choices.push_back(chosen);
        const double p = penalty(chosen, matrix.cells[i], matrix.time_limit_s);
        row.penalties.push_back(p);
        row.total_penalty += p;

        const double t_default = effective_time(matrix.cells[i][def], matrix.time_limit_s);
        const double t_chosen = effective_time(matrix.cells[i][chosen], matrix.time_limit_s);
        speedups.push_back(ratio_or(t_default, t_chosen, 1.0));
        const double feat = i < overhead.feature_seconds.size() ? overhead.feature_seconds[i] : 0.0;
        const double sel = i < overhead.select_seconds.size() ? overhead.select_seconds[i] : 0.0;
        speedups_net.push_back(ratio_or(t_default, t_chosen + feat + sel, 1.0));
    }
    row.mean_speedup = mean(speedups);
    row.mean_speedup_net = mean(speedups_net);
    return row;
}

PenaltyRow constant_row(int variant, const RuntimeMatrix& matrix) {
    return evaluate_selector(VariantId::from_index(variant).str(),
                             [variant](size_t) { return variant; }, matrix, {});
}

std::vector<PenaltyRow> baselines(const RuntimeMatrix& matrix, uint64_t seed) {
    std::vector<PenaltyRow> rows;

    auto argbest = [&](size_t i, bool worst) {
        int pick = 0;
        double pick_penalty = penalty(0, matrix.cells[i], matrix.time_limit_s);
        for (int v = 1; v < kVariantCount; ++v) {
            const double p = penalty(v, matrix.cells[i], matrix.time_limit_s);
            if (worst ? p > pick_penalty : p < pick_penalty) {
                pick = v;
                pick_penalty = p;
            }
        }
        return pick;
    };

    rows.push_back(evaluate_selector(
        "oracle", [&](size_t i) { return argbest(i, false); }, matrix, {}));
    rows.push_back(evaluate_selector(
        "anti-oracle", [&](size_t i) { return argbest(i, true); }, matrix, {}));
    rows.push_back(evaluate_selector(
        "default decision", [](size_t) { return default_variant().index(); }, matrix, {}));

    Rng rng(mix_seed(seed, 0));
    std::vector<int> random_choice(matrix.instances.size());
    for (auto& c : random_choice) c = static_cast<int>(rng.below(kVariantCount));
    rows.push_back(evaluate_selector(
        "random decision", [&](size_t i) { return random_choice[i]; }, matrix, {}));

    // Exact expectation of the random row: mean penalty over all 9 choices
    // per instance. Choices are not meaningful here.
    PenaltyRow expect;
    expect.name = "random expectation";
    for (size_t i = 0; i < matrix.instances.size(); ++i) {
        double sum = 0.0;
        for (int v = 0; v < kVariantCount; ++v)
            sum += penalty(v, matrix.cells[i], matrix.time_limit_s);
        const double p = sum / kVariantCount;
        expect.penalties.push_back(p);
        expect.choices.push_back(-1);
        expect.total_penalty += p;
    }
    expect.mean_speedup = 0.0;
    expect.mean_speedup_net = 0.0;
    rows.push_back(std::move(expect));
    return rows;
}

std::string format_report(const std::vector<PenaltyRow>& rows, const RuntimeMatrix& matrix,
                          uint64_t random_seed) {
    std::ostringstream out;
    size_t name_width = 10;
    for (const auto& r : rows) name_width = std::max(name_width, r.name.size());
    out << "instances: " << matrix.instances.size() << "  time limit: " << matrix.time_limit_s
        << " s  cost mode: " << to_string(matrix.mode) << "  random seed: " << random_seed
        << "\n\n";
    char buf[160];
    snprintf(buf, sizeof(buf), "%-*s  %16s  %14s  %18s\n", static_cast<int>(name_width),
             "classifier", "penalty [s]", "mean speedup", "mean speedup (net)");
    out << buf;
    out << std::string(name_width + 2 + 16 + 2 + 14 + 2 + 18, '-') << "\n";
    for (const auto& r : rows) {
        if (r.choices.empty() || r.choices.front() < 0) {
            snprintf(buf, sizeof(buf), "%-*s  %16.3f  %14s  %18s\n",
                     static_cast<int>(name_width), r.name.c_str(), r.total_penalty, "-", "-");
        } else {
            snprintf(buf, sizeof(buf), "%-*s  %16.3f  %14.3f  %18.3f\n",
                     static_cast<int>(name_width), r.name.c_str(), r.total_penalty,
                     r.mean_speedup, r.mean_speedup_net);
        }
        out << buf;
    }
    return out.str();
}

std::string per_instance_csv(const PenaltyRow& row, const RuntimeMatrix& matrix,
                             const OverheadInput& overhead) {
    std::ostringstream out;
    out << "instance,chosen,penalty,speedup,speedup_net,feature_seconds,select_seconds\n";
    const int def = default_variant().index();
    for (size_t i = 0; i < matrix.instances.size(); ++i) {
        const int chosen = row.choices[i];
        const double t_default = effective_time(matrix.cells[i][def], matrix.time_limit_s);
        const double t_chosen = effective_time(matrix.cells[i][chosen], matrix.time_limit_s);
        const double feat = i < overhead.feature_seconds.size() ? overhead.feature_seconds[i] : 0.0;
        const double sel = i < overhead.select_seconds.size() ? overhead.select_seconds[i] : 0.0;
        char buf[256];
        snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 matrix.instances[i].c_str(), VariantId::from_index(chosen).str().c_str(),
                 row.penalties[i], ratio_or(t_default, t_chosen, 1.0),
                 ratio_or(t_default, t_chosen + feat + sel, 1.0), feat, sel);
        out << buf;
    }
    return out.str();
}

}  // namespace propsel
