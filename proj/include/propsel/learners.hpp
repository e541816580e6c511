#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "propsel/features.hpp"
#include "propsel/solver.hpp"

namespace propsel {

struct LabeledExample {
    std::string name;
    std::vector<double> features;
    int label = 0;  // variant index; don't-know instances are filtered upstream
    double cost = 0.0;
};

struct Dataset {
    std::vector<LabeledExample> examples;
    bool duplicated = false;
};

// clamp(1 + ceil(log2(cost)), 1, 13); costs below one second give 1 copy.
int copies_for_cost(double cost);
constexpr int kMaxCopies = 13;

Dataset duplicate_by_cost(const Dataset& raw);

// Fold id per example. Per class, fold sizes differ by at most 1.
// Throws when k < 2 or k > |labels|.
std::vector<int> stratified_kfold(const std::vector<int>& labels, int k, uint64_t seed);

enum class Algorithm { MajorityClass, OneRule, NaiveBayes, KNearest, DecisionTree };
constexpr int kAlgorithmCount = 5;
const char* to_string(Algorithm a);
std::optional<Algorithm> algorithm_from_string(std::string_view s);

constexpr int kOneRuleBins = 10;
constexpr int kKnnNeighbours = 5;
constexpr double kVarianceFloor = 1e-9;
constexpr int kMinLeafSize = 2;

struct MajorityParams {
    int klass = 0;
};

struct OneRuleParams {
    int feature = 0;
    double lo = 0.0, hi = 0.0;  // training range of the chosen feature
    std::vector<int> bin_class;
    int fallback = 0;  // overall majority, used for empty bins
};

struct BayesClassParams {
    int klass = 0;
    double log_prior = 0.0;
    std::vector<double> mean, var;
};
struct BayesParams {
    std::vector<BayesClassParams> classes;
};

struct KnnParams {
    int k = kKnnNeighbours;
    std::vector<double> mins, maxs;              // training min-max per feature
    std::vector<std::vector<double>> points;     // scaled training points
    std::vector<int> labels;
};

struct TreeNode {
    bool leaf = true;
    int klass = 0;
    int feature = -1;
    double threshold = 0.0;
    int left = -1, right = -1;  // x <= threshold goes left
};
struct TreeParams {
    std::vector<TreeNode> nodes;  // node 0 is the root
};

struct BaseModel {
    Algorithm algo = Algorithm::MajorityClass;
    int fold = 0;
    std::variant<MajorityParams, OneRuleParams, BayesParams, KnnParams, TreeParams> params;

    int predict(const std::vector<double>& x) const;
};

// All algorithms are deterministic; internal ties resolve toward the class
// earliest in variant order (the smallest class id).
BaseModel fit(Algorithm algo, const std::vector<const LabeledExample*>& train);

struct EnsembleModel {
    FeatureSet feature_set = FeatureSet::Full;
    int folds = 3;
    uint64_t seed = 0;
    bool cost_duplication = true;
    int default_variant_index = 0;
    bool level2_fallback = false;   // too few GAC examples; level 2 answers the default
    std::vector<BaseModel> level1;  // classes: 0 = naive family, 1 = gac family
    std::vector<BaseModel> level2;  // classes: gac variant indices 1..8
};

struct TrainOptions {
    int folds = 3;
    uint64_t seed = 0;
    FeatureSet feature_set = FeatureSet::Full;
    bool cost_duplication = true;
};

EnsembleModel train_ensemble(const Dataset& raw, const TrainOptions& options);

// Majority over family votes (0 = naive, 1 = gac); ties go to gac.
int family_vote(const std::vector<int>& votes);

// Majority over variant votes; tied top counts go to the default variant
// when it is among them, then to the earliest variant.
int variant_vote(const std::vector<int>& votes, int default_variant_index);

VariantId select_variant(const EnsembleModel& model, const std::vector<double>& features);

nlohmann::json ensemble_to_json(const EnsembleModel& model);
EnsembleModel ensemble_from_json(const nlohmann::json& doc);
void save_ensemble(const EnsembleModel& model, const std::string& path);
EnsembleModel load_ensemble(const std::string& path);

}  // namespace propsel
