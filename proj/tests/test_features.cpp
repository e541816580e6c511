#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "propsel/features.hpp"
#include "propsel/generate.hpp"
#include "propsel/harness.hpp"
#include "propsel/rng.hpp"

using namespace propsel;

namespace {

CspInstance vars_only(int n, std::vector<int64_t> dom = {1, 2}) {
    CspInstance inst;
    inst.name = "vars";
    for (int i = 0; i < n; ++i)
        inst.variables.push_back({"v" + std::to_string(i), dom, false});
    return inst;
}

void add_diseq(CspInstance& inst, int a, int b) {
    Constraint c;
    c.kind = ConstraintKind::Disequality;
    c.scope = {a, b};
    inst.constraints.push_back(c);
}

void add_alldiff(CspInstance& inst, std::vector<int> scope) {
    Constraint c;
    c.kind = ConstraintKind::AllDifferent;
    c.scope = std::move(scope);
    inst.constraints.push_back(c);
}

// Star with the centre at the given variable index, 3 leaves.
CspInstance star4(int centre) {
    CspInstance inst = vars_only(4);
    for (int i = 0; i < 4; ++i)
        if (i != centre) add_diseq(inst, std::min(centre, i), std::max(centre, i));
    return inst;
}

PrimalGraph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    CspInstance inst = vars_only(n);
    for (auto [a, b] : edges) add_diseq(inst, a, b);
    return build_primal_graph(inst);
}

}  // namespace

TEST_CASE("primal graph construction") {
    CspInstance k3 = vars_only(3);
    add_alldiff(k3, {0, 1, 2});
    const PrimalGraph g = build_primal_graph(k3);
    CHECK(g.n == 3);
    CHECK(g.edge_count == 3);
    CHECK(g.has_edge(0, 2));

    const PrimalGraph isolated = build_primal_graph(vars_only(2));
    CHECK(isolated.edge_count == 0);

    CspInstance path = vars_only(3);
    add_diseq(path, 0, 1);
    add_diseq(path, 1, 2);
    const PrimalGraph pg = build_primal_graph(path);
    CHECK(pg.edge_count == 2);
    CHECK(pg.has_edge(0, 1));
    CHECK(pg.has_edge(1, 2));
    CHECK(!pg.has_edge(0, 2));
}

TEST_CASE("edge density") {
    CspInstance k3 = vars_only(3);
    add_alldiff(k3, {0, 1, 2});
    CHECK(edge_density(build_primal_graph(k3)) == doctest::Approx(1.0));
    CHECK(edge_density(build_primal_graph(vars_only(3))) == doctest::Approx(0.0));
    CHECK(edge_density(graph_from_edges(3, {{0, 1}, {1, 2}})) == doctest::Approx(2.0 / 3.0));
    CHECK(edge_density(build_primal_graph(vars_only(1))) == 0.0);
}

TEST_CASE("clustering coefficient") {
    CHECK(clustering_coefficient(graph_from_edges(3, {{0, 1}, {1, 2}, {0, 2}})) ==
          doctest::Approx(1.0));
    CHECK(clustering_coefficient(build_primal_graph(star4(0))) == doctest::Approx(0.0));
    // K4 minus one edge: local densities 1, 1, 2/3, 2/3.
    const PrimalGraph g =
        graph_from_edges(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    CHECK(clustering_coefficient(g) == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("normalised degree statistics") {
    CspInstance k3 = vars_only(3);
    add_alldiff(k3, {0, 1, 2});
    const DegreeStats s = degree_features(build_primal_graph(k3));
    CHECK(s.min == doctest::Approx(2.0 / 3.0));
    CHECK(s.max == doctest::Approx(2.0 / 3.0));
    CHECK(s.mean == doctest::Approx(2.0 / 3.0));
    CHECK(s.median == doctest::Approx(2.0 / 3.0));
    CHECK(s.stddev == doctest::Approx(0.0));

    const DegreeStats star = degree_features(build_primal_graph(star4(0)));
    CHECK(star.max == doctest::Approx(3.0 / 4.0));
    CHECK(star.min == doctest::Approx(1.0 / 4.0));

    const DegreeStats path = degree_features(graph_from_edges(3, {{0, 1}, {1, 2}}));
    CHECK(path.mean == doctest::Approx(4.0 / 9.0));
}

TEST_CASE("width of the declared ordering") {
    CHECK(width_of_ordering(build_primal_graph(star4(3))) == doctest::Approx(3.0 / 4.0));
    CHECK(width_of_ordering(build_primal_graph(star4(0))) == doctest::Approx(1.0 / 4.0));
    CHECK(width_of_ordering(build_primal_graph(vars_only(4))) == doctest::Approx(0.0));
}

TEST_CASE("width of the graph") {
    // Complete graphs pin the stated size-normalised forms: density and
    // clustering stay 1 while the width scales as (n-1)/n.
    for (int n : {2, 3, 4, 5}) {
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
        const PrimalGraph kn = graph_from_edges(n, edges);
        CHECK(width_of_graph(kn) == doctest::Approx(static_cast<double>(n - 1) / n));
        CHECK(edge_density(kn) == doctest::Approx(1.0));
        if (n >= 3) CHECK(clustering_coefficient(kn) == doctest::Approx(1.0));
    }
    // Trees have width 1.
    CHECK(width_of_graph(graph_from_edges(4, {{0, 1}, {1, 2}, {1, 3}})) ==
          doctest::Approx(1.0 / 4.0));
    CHECK(width_of_graph(graph_from_edges(2, {{0, 1}})) == doctest::Approx(1.0 / 2.0));
    // C5 has width 2 (brute-forced below as well).
    const PrimalGraph c5 = graph_from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
    CHECK(width_of_graph(c5) == doctest::Approx(2.0 / 5.0));
    CHECK(test::width_by_permutations(c5) == 2);
}

TEST_CASE("graph width equals brute force on every graph with up to 5 vertices") {
    for (int n = 1; n <= 5; ++n) {
        std::vector<std::pair<int, int>> all_edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) all_edges.emplace_back(i, j);
        const int m = static_cast<int>(all_edges.size());
        for (uint32_t mask = 0; mask < (1u << m); ++mask) {
            std::vector<std::pair<int, int>> edges;
            for (int e = 0; e < m; ++e)
                if (mask & (1u << e)) edges.push_back(all_edges[e]);
            const PrimalGraph g = graph_from_edges(n, edges);
            const int exact = test::width_by_permutations(g);
            CHECK(width_of_graph(g) == doctest::Approx(static_cast<double>(exact) / n));
            CHECK(test::width_by_subset_dp(g) == exact);
        }
    }
}

TEST_CASE("graph width equals the subset oracle on random graphs with 6 to 8 vertices") {
    Rng rng(0x77aaULL);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 6 + static_cast<int>(rng.below(3));
        std::vector<std::pair<int, int>> edges;
        const double p = 0.15 + 0.7 * rng.unit();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.chance(p)) edges.emplace_back(i, j);
        const PrimalGraph g = graph_from_edges(n, edges);
        CHECK(width_of_graph(g) ==
              doctest::Approx(static_cast<double>(test::width_by_subset_dp(g)) / n));
    }
}

TEST_CASE("scalar statistics use inclusive linear interpolation") {
    const ScalarStats single = scalar_stats({5});
    CHECK(single.min == 5);
    CHECK(single.q1 == 5);
    CHECK(single.median == 5);
    CHECK(single.q3 == 5);
    CHECK(single.max == 5);
    CHECK(single.mean == 5);

    const ScalarStats s = scalar_stats({1, 2, 3, 4});
    CHECK(s.median == doctest::Approx(2.5));
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.q1 == doctest::Approx(1.75));
    CHECK(s.q3 == doctest::Approx(3.25));

    const ScalarStats empty = scalar_stats({});
    CHECK(!empty.defined);
    CHECK(empty.mean == 0.0);
}

TEST_CASE("constraint arity stats are normalised by the constraint count") {
    CspInstance inst = vars_only(4, {1, 2, 3});
    add_alldiff(inst, {0, 1, 2});
    add_diseq(inst, 2, 3);
    const ScalarStats s = constraint_arity_stats(inst);
    CHECK(s.min == doctest::Approx(2.0 / 2.0));
    CHECK(s.max == doctest::Approx(3.0 / 2.0));
    CHECK(s.mean == doctest::Approx(2.5 / 2.0));
}

TEST_CASE("multiple shared variables") {
    CspInstance a = vars_only(3);
    add_alldiff(a, {0, 1, 2});
    Constraint t;
    t.kind = ConstraintKind::Table;
    t.scope = {0, 1};
    t.tuples = {{1, 2}};
    a.constraints.push_back(t);
    CHECK(multiple_shared_variables(a) == doctest::Approx(1.0));

    CspInstance b = vars_only(4);
    add_diseq(b, 0, 1);
    add_diseq(b, 2, 3);
    CHECK(multiple_shared_variables(b) == doctest::Approx(0.0));

    CspInstance c = vars_only(4);
    add_alldiff(c, {0, 1, 2});
    add_alldiff(c, {0, 1, 3});
    add_diseq(c, 2, 3);
    CHECK(multiple_shared_variables(c) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("normalised mean constraints per variable") {
    CspInstance inst = vars_only(2);
    add_diseq(inst, 0, 1);
    CHECK(norm_mean_constraints_per_variable(inst) == doctest::Approx(1.0));
    CHECK(norm_mean_constraints_per_variable(vars_only(3)) == 0.0);
}

TEST_CASE("auxiliary variable ratio") {
    CspInstance a = vars_only(5);
    CHECK(aux_ratio(a) == doctest::Approx(0.0));

    CspInstance b = vars_only(6);
    b.variables[0].is_auxiliary = true;
    b.variables[1].is_auxiliary = true;
    CHECK(aux_ratio(b) == doctest::Approx(0.5));

    CspInstance c = vars_only(3);
    for (auto& v : c.variables) v.is_auxiliary = true;
    CHECK(aux_ratio(c) == doctest::Approx(3.0));
}

TEST_CASE("tightness estimates") {
    CspInstance diseq = vars_only(2);
    add_diseq(diseq, 0, 1);
    const ScalarStats s = tightness_stats(diseq, 17);
    CHECK(s.mean >= 0.45);
    CHECK(s.mean <= 0.55);

    CspInstance empty_allowed = vars_only(2);
    Constraint t;
    t.kind = ConstraintKind::Table;
    t.scope = {0, 1};
    empty_allowed.constraints.push_back(t);
    CHECK(tightness_stats(empty_allowed, 3).mean == doctest::Approx(1.0));

    CspInstance empty_disallowed = vars_only(2);
    t.polarity = TablePolarity::Disallowed;
    empty_disallowed.constraints.push_back(t);
    CHECK(tightness_stats(empty_disallowed, 3).mean == doctest::Approx(0.0));
}

TEST_CASE("tightness estimator concentrates around the exact value") {
    // Disequality over equal domains of size d has tightness exactly 1/d.
    for (int d : {2, 3, 5}) {
        std::vector<int64_t> dom;
        for (int64_t v = 1; v <= d; ++v) dom.push_back(v);
        CspInstance inst = vars_only(2, dom);
        add_diseq(inst, 0, 1);
        const double exact = 1.0 / d;
        const double sigma = std::sqrt(exact * (1 - exact) / kTightnessSamples);
        int hits = 0;
        for (uint64_t seed = 0; seed < 100; ++seed) {
            const double est = tightness_stats(inst, seed).mean;
            if (std::abs(est - exact) <= 3 * sigma) ++hits;
        }
        CHECK(hits >= 99);
    }
}

TEST_CASE("symmetric variable proportion") {
    // Two product tables x1*x2=x3 and x4*x5=x6, symmetric in their first
    // two positions: parts {x1,x2,x4,x5} and {x3,x6} give 7/15.
    CspInstance inst;
    inst.name = "products";
    for (int i : {0, 1}) {
        inst.variables.push_back({"a" + std::to_string(i), {2, 3}, false});
        inst.variables.push_back({"b" + std::to_string(i), {2, 3}, false});
        inst.variables.push_back({"p" + std::to_string(i), {4, 6, 9}, false});
    }
    for (int i : {0, 1}) {
        Constraint t;
        t.kind = ConstraintKind::Table;
        t.scope = {3 * i, 3 * i + 1, 3 * i + 2};
        t.tuples = {{2, 2, 4}, {2, 3, 6}, {3, 2, 6}, {3, 3, 9}};
        inst.constraints.push_back(t);
    }
    CHECK(symmetric_variable_proportion(inst) == doctest::Approx(7.0 / 15.0));

    CspInstance alldiff_inst = vars_only(4, {1, 2, 3, 4});
    add_alldiff(alldiff_inst, {0, 1, 2, 3});
    CHECK(symmetric_variable_proportion(alldiff_inst) == doctest::Approx(1.0));

    CspInstance different;
    different.name = "different";
    different.variables.push_back({"x", {1, 2}, false});
    different.variables.push_back({"y", {3, 4}, false});
    CHECK(symmetric_variable_proportion(different) == doctest::Approx(0.0));
}

TEST_CASE("alldifferent union statistics") {
    CspInstance pigeon = vars_only(4, {1, 2, 3});
    add_alldiff(pigeon, {0, 1, 2, 3});
    CHECK(alldiff_stats(pigeon).mean == doctest::Approx(3.0 / 4.0));

    CspInstance forced;
    forced.name = "forced";
    forced.variables.push_back({"x", {1}, false});
    forced.variables.push_back({"y", {2}, false});
    add_alldiff(forced, {0, 1});
    CHECK(alldiff_stats(forced).mean == doctest::Approx(1.0));

    CspInstance wide = vars_only(2, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    add_alldiff(wide, {0, 1});
    CHECK(alldiff_stats(wide).mean == doctest::Approx(5.0));

    CHECK(!alldiff_stats(vars_only(2)).defined);
}

TEST_CASE("feature vectors have the documented shape") {
    CHECK(feature_names(FeatureSet::Full).size() == kFullFeatureCount);
    CHECK(feature_names(FeatureSet::Cheap).size() == kCheapFeatureCount);

    const CspInstance inst = generate_instance(Family::RandomBinaryDiseq, 8, 3);
    const FeatureVector full = extract_features(inst, FeatureSet::Full, 11);
    const FeatureVector cheap = extract_features(inst, FeatureSet::Cheap, 11);
    CHECK(full.values.size() == kFullFeatureCount);
    CHECK(cheap.values.size() == kCheapFeatureCount);

    // The cheap vector agrees with the full vector on the shared features.
    const auto& full_names = feature_names(FeatureSet::Full);
    const auto& cheap_names = feature_names(FeatureSet::Cheap);
    for (size_t c = 0; c < cheap_names.size(); ++c) {
        const auto it =
            std::find(full_names.begin(), full_names.end(), cheap_names[c]);
        REQUIRE(it != full_names.end());
        CHECK(cheap.values[c] == full.values[it - full_names.begin()]);
    }
    CHECK(cheap_names[0] == "edge_density");
    for (const auto& n : cheap_names) {
        CHECK(n.find("width") == std::string::npos);
        CHECK(n.find("degree") == std::string::npos);
        CHECK(n.find("clustering") == std::string::npos);
    }

    for (double v : full.values) CHECK(std::isfinite(v));
}

TEST_CASE("feature extraction is deterministic bit for bit") {
    const CspInstance inst = generate_instance(Family::RandomTable, 7, 9);
    FeatureCorpus a = extract_corpus({inst}, FeatureSet::Full, 99, CostMode::Deterministic);
    FeatureCorpus b = extract_corpus({inst}, FeatureSet::Full, 99, CostMode::Deterministic);
    CHECK(features_to_json(a).dump(2) == features_to_json(b).dump(2));

    FeatureCorpus c = extract_corpus({inst}, FeatureSet::Full, 100, CostMode::Deterministic);
    CHECK(features_to_json(a).dump(2) != features_to_json(c).dump(2));
}

TEST_CASE("degenerate instances produce flagged zero statistics") {
    const CspInstance inst = vars_only(1);
    const FeatureVector fv = extract_features(inst, FeatureSet::Full, 0);
    CHECK(fv.no_constraints);
    CHECK(fv.no_alldiff);
    CHECK(fv.single_variable);
    const auto& names = feature_names(FeatureSet::Full);
    for (size_t i = 0; i < names.size(); ++i) {
        // Domain-size statistics still see one variable; every constraint-
        // and graph-derived feature is zero-filled.
        if (names[i].rfind("domain_size", 0) == 0) {
            CHECK(fv.values[i] == 2.0);
        } else {
            CHECK(fv.values[i] == 0.0);
        }
    }
}

TEST_CASE("feature corpus serialisation round-trips") {
    std::vector<CspInstance> corpus = {generate_instance(Family::LatinSquare, 3, 1),
                                       generate_instance(Family::RandomTable, 5, 2)};
    const FeatureCorpus fc = extract_corpus(corpus, FeatureSet::Cheap, 7, CostMode::Deterministic);
    const FeatureCorpus back = features_from_json(features_to_json(fc));
    REQUIRE(back.instances.size() == fc.instances.size());
    CHECK(back.set == fc.set);
    CHECK(back.seed == fc.seed);
    for (size_t i = 0; i < fc.instances.size(); ++i) {
        CHECK(back.instances[i].first == fc.instances[i].first);
        CHECK(back.instances[i].second.values == fc.instances[i].second.values);
    }
    const std::string csv = features_to_csv(fc);
    CHECK(csv.find("edge_density") != std::string::npos);
    CHECK(csv.find(corpus[0].name) != std::string::npos);
}
