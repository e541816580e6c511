#include "propsel/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "propsel/rng.hpp"
#include "propsel/util.hpp"

namespace propsel {

bool PrimalGraph::has_edge(int u, int v) const {
    const auto& a = adj[u].size() <= adj[v].size() ? adj[u] : adj[v];
    const int t = adj[u].size() <= adj[v].size() ? v : u;
    return std::binary_search(a.begin(), a.end(), t);
}

PrimalGraph build_primal_graph(const CspInstance& instance) {
    PrimalGraph g;
    g.n = static_cast<int>(instance.variables.size());
    g.adj.assign(g.n, {});
    std::set<std::pair<int, int>> edges;
    for (const auto& c : instance.constraints) {
        for (size_t i = 0; i < c.scope.size(); ++i) {
            for (size_t j = i + 1; j < c.scope.size(); ++j) {
                int u = c.scope[i], v = c.scope[j];
                if (u == v) continue;
                if (u > v) std::swap(u, v);
                edges.emplace(u, v);
            }
        }
    }
    for (auto [u, v] : edges) {
        g.adj[u].push_back(v);
        g.adj[v].push_back(u);
    }
    for (auto& lst : g.adj) std::sort(lst.begin(), lst.end());
    g.edge_count = edges.size();
    return g;
}

double edge_density(const PrimalGraph& g) {
    if (g.n < 2) return 0.0;
    const double pairs = static_cast<double>(g.n) * (g.n - 1) / 2.0;
    return static_cast<double>(g.edge_count) / pairs;
}

double clustering_coefficient(const PrimalGraph& g) {
    if (g.n < 1) return 0.0;
    double total = 0.0;
    for (int v = 0; v < g.n; ++v) {
        const auto& nb = g.adj[v];
        const size_t d = nb.size();
        if (d < 2) continue;
        size_t present = 0;
        for (size_t i = 0; i < d; ++i)
            for (size_t j = i + 1; j < d; ++j)
                if (g.has_edge(nb[i], nb[j])) ++present;
        total += static_cast<double>(present) / (static_cast<double>(d) * (d - 1) / 2.0);
    }
    return total / g.n;
}

DegreeStats degree_features(const PrimalGraph& g) {
    DegreeStats s;
    if (g.n < 1) return s;
    std::vector<double> deg(g.n);
    for (int v = 0; v < g.n; ++v) deg[v] = g.degree(v);
    const double n = g.n;
    ScalarStats raw = scalar_stats(deg);
    s.min = raw.min / n;
    s.max = raw.max / n;
    s.mean = raw.mean / n;
    s.median = raw.median / n;
    double var = 0.0;
    for (double d : deg) var += (d - raw.mean) * (d - raw.mean);
    var /= n;
    s.stddev = std::sqrt(var) / n;
    return s;
}

double width_of_ordering(const PrimalGraph& g) {
    if (g.n < 1) return 0.0;
    int width = 0;
    for (int v = 0; v < g.n; ++v) {
        int parents = 0;
        for (int u : g.adj[v])
            if (u < v) ++parents;
        width = std::max(width, parents);
    }
    return static_cast<double>(width) / g.n;
}

double width_of_graph(const PrimalGraph& g) {
    if (g.n < 1) return 0.0;
    // Repeatedly delete a vertex of minimum remaining degree; the largest
    // degree seen at deletion time is the exact graph width.
    std::vector<int> deg(g.n);
    std::vector<bool> removed(g.n, false);
    for (int v = 0; v < g.n; ++v) deg[v] = g.degree(v);
    int width = 0;
    for (int step = 0; step < g.n; ++step) {
        int best = -1;
        for (int v = 0; v < g.n; ++v)
            if (!removed[v] && (best == -1 || deg[v] < deg[best])) best = v;
        width = std::max(width, deg[best]);
        removed[best] = true;
        for (int u : g.adj[best])
            if (!removed[u]) --deg[u];
    }
    return static_cast<double>(width) / g.n;
}

ScalarStats scalar_stats(const std::vector<double>& values) {
    ScalarStats s;
    if (values.empty()) return s;
    s.defined = true;
    std::vector<double> xs = values;
    std::sort(xs.begin(), xs.end());
    const size_t n = xs.size();
    auto quantile = [&](double p) {
        const double h = p * static_cast<double>(n - 1);
        const size_t lo = static_cast<size_t>(std::floor(h));
        if (lo + 1 >= n) return xs[n - 1];
        const double frac = h - static_cast<double>(lo);
        return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
    };
    s.min = xs.front();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    s.max = xs.back();
    s.mean = mean(xs);
    return s;
}

ScalarStats constraint_arity_stats(const CspInstance& instance) {
    std::vector<double> arities;
    arities.reserve(instance.constraints.size());
    for (const auto& c : instance.constraints) arities.push_back(static_cast<double>(c.scope.size()));
    ScalarStats s = scalar_stats(arities);
    if (!s.defined) return s;
    const double nc = static_cast<double>(instance.constraints.size());
    s.min /= nc;
    s.q1 /= nc;
    s.median /= nc;
    s.q3 /= nc;
    s.max /= nc;
    s.mean /= nc;
    return s;
}

double multiple_shared_variables(const CspInstance& instance) {
    const size_t nc = instance.constraints.size();
    if (nc < 2) return 0.0;
    std::vector<std::vector<int>> scopes;
    scopes.reserve(nc);
    for (const auto& c : instance.constraints) {
        std::vector<int> s = c.scope;
        std::sort(s.begin(), s.end());
        scopes.push_back(std::move(s));
    }
    size_t sharing = 0;
    for (size_t i = 0; i < nc; ++i) {
        for (size_t j = i + 1; j < nc; ++j) {
            size_t shared = 0;
            auto a = scopes[i].begin();
            auto b = scopes[j].begin();
            while (a != scopes[i].end() && b != scopes[j].end() && shared < 2) {
                if (*a < *b)
                    ++a;
                else if (*b < *a)
                    ++b;
                else {
                    ++shared;
                    ++a;
                    ++b;
                }
            }
            if (shared >= 2) ++sharing;
        }
    }
    const double pairs = static_cast<double>(nc) * (nc - 1) / 2.0;
    return static_cast<double>(sharing) / pairs;
}

double norm_mean_constraints_per_variable(const CspInstance& instance) {
    if (instance.constraints.empty() || instance.variables.empty()) return 0.0;
    std::vector<int> count(instance.variables.size(), 0);
    for (const auto& c : instance.constraints)
        for (int v : c.scope) ++count[v];
    double total = 0.0;
    for (int x : count) total += x;
    const double per_var = total / static_cast<double>(instance.variables.size());
    return per_var / static_cast<double>(instance.constraints.size());
}

double aux_ratio(const CspInstance& instance) {
    size_t aux = 0;
    for (const auto& v : instance.variables) aux += v.is_auxiliary ? 1 : 0;
    const size_t other = instance.variables.size() - aux;
    return static_cast<double>(aux) / static_cast<double>(std::max<size_t>(1, other));
}

ScalarStats tightness_stats(const CspInstance& instance, uint64_t seed) {
    std::vector<double> tightness;
    tightness.reserve(instance.constraints.size());
    for (size_t ci = 0; ci < instance.constraints.size(); ++ci) {
        const Constraint& c = instance.constraints[ci];
        Rng rng(mix_seed(seed, ci));
        std::vector<int64_t> tuple(c.scope.size());
        int disallowed = 0;
        for (int s = 0; s < kTightnessSamples; ++s) {
            for (size_t i = 0; i < c.scope.size(); ++i) {
                const auto& dom = instance.variables[c.scope[i]].domain;
                tuple[i] = dom[rng.below(dom.size())];
            }
            if (!c.satisfied_by(tuple)) ++disallowed;
        }
        tightness.push_back(static_cast<double>(disallowed) / kTightnessSamples);
    }
    return scalar_stats(tightness);
}

std::vector<int> refine_variable_partition(const CspInstance& instance) {
    const int n = static_cast<int>(instance.variables.size());
    std::vector<int> colour(n, 0);
    if (n == 0) return colour;

    // Initial colour: (sorted domain, sorted list of constraint kinds).
    {
        std::map<std::pair<std::vector<int64_t>, std::vector<int>>, int> ids;
        for (int v = 0; v < n; ++v) {
            std::vector<int64_t> dom = instance.variables[v].domain;
            std::sort(dom.begin(), dom.end());
            std::vector<int> kinds;
            for (const auto& c : instance.constraints)
                if (std::find(c.scope.begin(), c.scope.end(), v) != c.scope.end())
                    kinds.push_back(static_cast<int>(c.kind));
            std::sort(kinds.begin(), kinds.end());
            auto key = std::make_pair(std::move(dom), std::move(kinds));
            auto [it, inserted] = ids.emplace(std::move(key), static_cast<int>(ids.size()));
            colour[v] = it->second;
        }
    }

    // Split colours by the multiset of (kind, multiset of co-scoped colours)
    // until stable.
    for (int round = 0; round < n; ++round) {
        using Signature = std::pair<int, std::vector<std::pair<int, std::vector<int>>>>;
        std::map<Signature, int> ids;
        std::vector<int> next(n);
        for (int v = 0; v < n; ++v) {
            std::vector<std::pair<int, std::vector<int>>> sig;
            for (const auto& c : instance.constraints) {
                if (std::find(c.scope.begin(), c.scope.end(), v) == c.scope.end()) continue;
                std::vector<int> others;
                for (int u : c.scope)
                    if (u != v) others.push_back(colour[u]);
                std::sort(others.begin(), others.end());
                sig.emplace_back(static_cast<int>(c.kind), std::move(others));
            }
            std::sort(sig.begin(), sig.end());
            Signature key{colour[v], std::move(sig)};
            auto [it, inserted] = ids.emplace(std::move(key), static_cast<int>(ids.size()));
            next[v] = it->second;
        }
        const int before = *std::max_element(colour.begin(), colour.end());
        const int after = *std::max_element(next.begin(), next.end());
        const bool stable = before == after;
        colour = std::move(next);
        if (stable) break;
    }
    return colour;
}

double symmetric_variable_proportion(const CspInstance& instance) {
    const int n = static_cast<int>(instance.variables.size());
    if (n < 2) return 0.0;
    std::vector<int> colour = refine_variable_partition(instance);
    std::map<int, int> sizes;
    for (int c : colour) ++sizes[c];
    double same = 0.0;
    for (auto [c, s] : sizes) same += static_cast<double>(s) * (s - 1) / 2.0;
    const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
    return same / pairs;
}

ScalarStats alldiff_stats(const CspInstance& instance) {
    std::vector<double> ratios;
    for (const auto& c : instance.constraints) {
        if (c.kind != ConstraintKind::AllDifferent) continue;
        std::set<int64_t> uni;
        for (int v : c.scope)
            uni.insert(instance.variables[v].domain.begin(), instance.variables[v].domain.end());
        ratios.push_back(static_cast<double>(uni.size()) / static_cast<double>(c.scope.size()));
    }
    return scalar_stats(ratios);
}

const char* to_string(FeatureSet s) {
    return s == FeatureSet::Full ? "full" : "cheap";
}

namespace {

std::vector<std::string> stat_group(const std::string& prefix) {
    return {prefix + "_min", prefix + "_q1", prefix + "_median",
            prefix + "_q3",  prefix + "_max", prefix + "_mean"};
}

std::vector<std::string> make_full_names() {
    std::vector<std::string> names = {
        "edge_density",  "clustering_coefficient", "degree_min",    "degree_max",
        "degree_mean",   "degree_median",          "degree_stddev", "width_of_ordering",
        "width_of_graph"};
    for (const auto& s : stat_group("domain_size")) names.push_back(s);
    for (const auto& s : stat_group("arity")) names.push_back(s);
    names.push_back("multiple_shared_variables");
    names.push_back("constraints_per_variable");
    names.push_back("aux_ratio");
    for (const auto& s : stat_group("tightness")) names.push_back(s);
    names.push_back("symmetric_variable_proportion");
    for (const auto& s : stat_group("alldiff_union")) names.push_back(s);
    return names;
}

// The cheap subset keeps edge density but drops every other primal-graph
// attribute (clustering, the degree group, both widths).
const std::vector<int>& cheap_indices() {
    static const std::vector<int> idx = [] {
        std::vector<int> v;
        v.push_back(0);
        for (int i = 9; i < kFullFeatureCount; ++i) v.push_back(i);
        return v;
    }();
    return idx;
}

}  // namespace

const std::vector<std::string>& feature_names(FeatureSet set) {
    static const std::vector<std::string> full = make_full_names();
    static const std::vector<std::string> cheap = [] {
        std::vector<std::string> out;
        for (int i : cheap_indices()) out.push_back(full[i]);
        return out;
    }();
    return set == FeatureSet::Full ? full : cheap;
}

FeatureVector extract_features(const CspInstance& instance, FeatureSet set, uint64_t seed,
                               bool measure_time) {
    const double t0 = measure_time ? thread_cpu_seconds() : 0.0;
    FeatureVector fv;
    fv.set = set;
    fv.seed = seed;
    fv.no_constraints = instance.constraints.empty();
    fv.single_variable = instance.variables.size() < 2;
    fv.no_alldiff = true;
    for (const auto& c : instance.constraints)
        if (c.kind == ConstraintKind::AllDifferent) fv.no_alldiff = false;

    std::vector<double> full(kFullFeatureCount, 0.0);
    const bool want_graph = set == FeatureSet::Full;
    PrimalGraph g = build_primal_graph(instance);
    full[0] = edge_density(g);
    if (want_graph) {
        full[1] = clustering_coefficient(g);
        const DegreeStats d = degree_features(g);
        full[2] = d.min;
        full[3] = d.max;
        full[4] = d.mean;
        full[5] = d.median;
        full[6] = d.stddev;
        full[7] = width_of_ordering(g);
        full[8] = width_of_graph(g);
    }

    std::vector<double> dom_sizes;
    dom_sizes.reserve(instance.variables.size());
    for (const auto& v : instance.variables)
        dom_sizes.push_back(static_cast<double>(v.domain.size()));
    auto put_stats = [&](int base, const ScalarStats& s) {
        full[base] = s.min;
        full[base + 1] = s.q1;
        full[base + 2] = s.median;
        full[base + 3] = s.q3;
        full[base + 4] = s.max;
        full[base + 5] = s.mean;
    };
    put_stats(9, scalar_stats(dom_sizes));
    put_stats(15, constraint_arity_stats(instance));
    full[21] = multiple_shared_variables(instance);
    full[22] = norm_mean_constraints_per_variable(instance);
    full[23] = aux_ratio(instance);
    put_stats(24, tightness_stats(instance, seed));
    full[30] = symmetric_variable_proportion(instance);
    put_stats(31, alldiff_stats(instance));

    if (set == FeatureSet::Full) {
        fv.values = std::move(full);
    } else {
        fv.values.reserve(kCheapFeatureCount);
        for (int i : cheap_indices()) fv.values.push_back(full[i]);
    }
    fv.extract_seconds = measure_time ? thread_cpu_seconds() - t0 : 0.0;
    return fv;
}

}  // namespace propsel
