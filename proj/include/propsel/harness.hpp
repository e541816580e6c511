#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "propsel/csp.hpp"
#include "propsel/features.hpp"
#include "propsel/solver.hpp"

namespace propsel {

enum class CostMode { Wallclock, Deterministic };
const char* to_string(CostMode m);
std::optional<CostMode> cost_mode_from_string(std::string_view s);

// Virtual cost of one deterministic work unit. In Deterministic mode every
// reported cpu_time is op_count * kSecondsPerOp, so the whole pipeline is a
// pure function of (corpus, config).
constexpr double kSecondsPerOp = 1e-4;

struct BenchmarkConfig {
    double time_limit_s = 3600.0;
    int runs_per_cell = 3;  // must be odd; 1 in Deterministic mode
    CostMode mode = CostMode::Wallclock;
    int jobs = 1;
};

struct RuntimeMatrix {
    double time_limit_s = 3600.0;
    int runs_per_cell = 3;
    CostMode mode = CostMode::Wallclock;
    uint64_t raw_runs = 0;
    std::vector<std::string> instances;
    std::vector<std::array<RunRecord, kVariantCount>> cells;  // [instance][variant index]

    int instance_index(const std::string& name) const;
};

// Runs every variant on every instance; aggregates runs_per_cell runs per
// cell (component-wise median, majority status).
RuntimeMatrix benchmark(const std::vector<CspInstance>& corpus, const BenchmarkConfig& config);

RunRecord aggregate_runs(const std::vector<RunRecord>& runs);

struct Label {
    bool dont_know = false;
    VariantId best;  // meaningful when !dont_know
};

struct CostedLabel {
    Label label;
    double cost = 0.0;  // max misclassification penalty, capped at the limit
};

// Naive wins when it solved strictly faster than every other solved
// variant; otherwise the solving GAC variant with the best nodes/second
// (ties to variant order); don't-know when nothing solved.
CostedLabel label_instance(const std::array<RunRecord, kVariantCount>& cells,
                           double time_limit_s);

struct LabelledCorpus {
    double time_limit_s = 3600.0;
    CostMode mode = CostMode::Wallclock;
    std::vector<std::pair<std::string, CostedLabel>> labels;  // matrix instance order
};

LabelledCorpus label_matrix(const RuntimeMatrix& matrix);

nlohmann::json matrix_to_json(const RuntimeMatrix& m);
RuntimeMatrix matrix_from_json(const nlohmann::json& doc);
void save_matrix(const RuntimeMatrix& m, const std::string& path);
RuntimeMatrix load_matrix(const std::string& path);

nlohmann::json labels_to_json(const LabelledCorpus& l);
LabelledCorpus labels_from_json(const nlohmann::json& doc);
void save_labels(const LabelledCorpus& l, const std::string& path);
LabelledCorpus load_labels(const std::string& path);

// Feature corpus file (one record per instance).
struct FeatureCorpus {
    FeatureSet set = FeatureSet::Full;
    uint64_t seed = 0;
    CostMode mode = CostMode::Wallclock;
    std::vector<std::pair<std::string, FeatureVector>> instances;
};

FeatureCorpus extract_corpus(const std::vector<CspInstance>& corpus, FeatureSet set,
                             uint64_t seed, CostMode mode, int jobs = 1);

nlohmann::json features_to_json(const FeatureCorpus& f);
FeatureCorpus features_from_json(const nlohmann::json& doc);
void save_features(const FeatureCorpus& f, const std::string& path);
FeatureCorpus load_features(const std::string& path);
std::string features_to_csv(const FeatureCorpus& f);

}  // namespace propsel
