#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "propsel/csp.hpp"

namespace propsel {

// Vertex per variable, edge iff two variables share a constraint scope.
struct PrimalGraph {
    int n = 0;
    std::vector<std::vector<int>> adj;  // sorted neighbour lists
    size_t edge_count = 0;

    bool has_edge(int u, int v) const;
    int degree(int v) const { return static_cast<int>(adj[v].size()); }
};

PrimalGraph build_primal_graph(const CspInstance& instance);

// |E| / (|V| choose 2); 0 when |V| < 2.
double edge_density(const PrimalGraph& g);

// Mean local edge density among each vertex's neighbourhood;
// vertices of degree < 2 contribute 0.
double clustering_coefficient(const PrimalGraph& g);

struct DegreeStats {
    double min = 0, max = 0, mean = 0, median = 0, stddev = 0;
};
// Degrees divided by |V|; population standard deviation, also over |V|.
DegreeStats degree_features(const PrimalGraph& g);

// Max over vertices of the number of earlier neighbours, in declaration
// order, divided by |V|.
double width_of_ordering(const PrimalGraph& g);

// Exact minimum width over all orderings (min-degree elimination),
// divided by |V|.
double width_of_graph(const PrimalGraph& g);

struct ScalarStats {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
    bool defined = false;  // false for the empty list (all-zero stats)
};

// Quartiles by inclusive linear interpolation between order statistics.
ScalarStats scalar_stats(const std::vector<double>& values);

// scalar_stats over constraint arities, each value divided by |constraints|.
ScalarStats constraint_arity_stats(const CspInstance& instance);

// Proportion of unordered constraint pairs sharing >= 2 scope variables.
double multiple_shared_variables(const CspInstance& instance);

// Mean constraints per variable, divided by |constraints|.
double norm_mean_constraints_per_variable(const CspInstance& instance);

// |auxiliary| / max(1, |non-auxiliary|).
double aux_ratio(const CspInstance& instance);

// Per constraint, the disallowed fraction of 1000 scope-domain tuples
// drawn with a seeded deterministic PRNG; scalar_stats over constraints.
ScalarStats tightness_stats(const CspInstance& instance, uint64_t seed);
constexpr int kTightnessSamples = 1000;

// Colour-refinement partition of the variables; returns the proportion of
// variable pairs that end up in the same part.
double symmetric_variable_proportion(const CspInstance& instance);
std::vector<int> refine_variable_partition(const CspInstance& instance);

// Per alldifferent constraint, |union of scope domains| / |scope|.
ScalarStats alldiff_stats(const CspInstance& instance);

enum class FeatureSet { Full, Cheap };
const char* to_string(FeatureSet s);

constexpr int kFullFeatureCount = 37;
constexpr int kCheapFeatureCount = 29;

struct FeatureVector {
    FeatureSet set = FeatureSet::Full;
    uint64_t seed = 0;
    double extract_seconds = 0.0;
    std::vector<double> values;  // canonical order, see feature_names()
    bool no_constraints = false;
    bool no_alldiff = false;
    bool single_variable = false;
};

// Canonical feature names for a set, aligned with FeatureVector::values.
const std::vector<std::string>& feature_names(FeatureSet set);

// measure_time=false records extract_seconds = 0 (deterministic pipelines).
FeatureVector extract_features(const CspInstance& instance, FeatureSet set, uint64_t seed,
                               bool measure_time = true);

}  // namespace propsel
