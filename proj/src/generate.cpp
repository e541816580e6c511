#include "propsel/generate.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "propsel/rng.hpp"

namespace propsel {

const char* to_string(Family f) {
    switch (f) {
        case Family::PigeonHole: return "pigeonhole";
        case Family::LatinSquare: return "latinsquare";
        case Family::GraphColouring: return "graphcolouring";
        case Family::RandomBinaryDiseq: return "randombinarydiseq";
        case Family::RandomTable: return "randomtable";
    }
    return "?";
}

std::optional<Family> family_from_string(std::string_view s) {
    if (s == "pigeonhole") return Family::PigeonHole;
    if (s == "latinsquare") return Family::LatinSquare;
    if (s == "graphcolouring") return Family::GraphColouring;
    if (s == "randombinarydiseq") return Family::RandomBinaryDiseq;
    if (s == "randomtable") return Family::RandomTable;
    return std::nullopt;
}

FamilyBounds family_bounds(Family f) {
    switch (f) {
        case Family::PigeonHole: return {1, 12};
        case Family::LatinSquare: return {2, 8};
        case Family::GraphColouring: return {2, 64};
        case Family::RandomBinaryDiseq: return {2, 64};
        case Family::RandomTable: return {2, 64};
    }
    return {0, 0};
}

namespace {

std::string instance_name(Family f, int size, uint64_t seed) {
    return std::string(to_string(f)) + "-n" + std::to_string(size) + "-s" + std::to_string(seed);
}

CspInstance make_pigeonhole(int n, uint64_t seed) {
    CspInstance inst;
    inst.name = instance_name(Family::PigeonHole, n, seed);
    std::vector<int64_t> dom(n);
    std::iota(dom.begin(), dom.end(), 1);
    for (int i = 0; i < n + 1; ++i)
        inst.variables.push_back({"p" + std::to_string(i + 1), dom, false});
    Constraint c;
    c.kind = ConstraintKind::AllDifferent;
    c.scope.resize(n + 1);
    std::iota(c.scope.begin(), c.scope.end(), 0);
    inst.constraints.push_back(std::move(c));
    return inst;
}

CspInstance make_latin_square(int n, uint64_t seed) {
    CspInstance inst;
    inst.name = instance_name(Family::LatinSquare, n, seed);
    // Per-cell value order is shuffled so different seeds explore the
    // search space differently under the static value order.
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            std::vector<int64_t> dom(n);
            std::iota(dom.begin(), dom.end(), 1);
            Rng rng(mix_seed(seed, static_cast<uint64_t>(r) * n + c));
            rng.shuffle(dom);
            inst.variables.push_back(
                {"x_" + std::to_string(r) + "_" + std::to_string(c), std::move(dom), false});
        }
    }
    auto alldiff_over = [&](auto&& cell) {
        Constraint c;
        c.kind = ConstraintKind::AllDifferent;
        for (int i = 0; i < n; ++i) c.scope.push_back(cell(i));
        inst.constraints.push_back(std::move(c));
    };
    for (int r = 0; r < n; ++r) alldiff_over([&](int i) { return r * n + i; });
    for (int c = 0; c < n; ++c) alldiff_over([&](int i) { return i * n + c; });
    return inst;
}

CspInstance make_graph_colouring(int n, uint64_t seed) {
    CspInstance inst;
    inst.name = instance_name(Family::GraphColouring, n, seed);
    Rng rng(mix_seed(seed, 0));
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.chance(0.4)) {
                edges.emplace_back(i, j);
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
        }
    }
    // Greedy colouring in vertex order fixes a colour count that keeps the
    // instance satisfiable.
    std::vector<int> colour(n, 0);
    int k = 1;
    for (int v = 0; v < n; ++v) {
        std::set<int> used;
        for (int u : adj[v])
            if (u < v) used.insert(colour[u]);
        int c = 1;
        while (used.count(c)) ++c;
        colour[v] = c;
        k = std::max(k, c);
    }
    std::vector<int64_t> dom(k);
    std::iota(dom.begin(), dom.end(), 1);
    for (int i = 0; i < n; ++i)
        inst.variables.push_back({"c" + std::to_string(i), dom, false});
    for (auto [a, b] : edges) {
        Constraint c;
        c.kind = ConstraintKind::Disequality;
        c.scope = {a, b};
        inst.constraints.push_back(std::move(c));
    }
    return inst;
}

// Sparse binary disequalities plus one loose alldifferent over a subset;
// the alldifferent rarely prunes, so the cheap decomposition tends to win.
CspInstance make_random_binary_diseq(int n, uint64_t seed) {
    CspInstance inst;
    inst.name = instance_name(Family::RandomBinaryDiseq, n, seed);
    Rng rng(mix_seed(seed, 1));
    const int m = std::max(2, n / 2);        // alldiff scope size
    const int dmax = m + 3;                  // loose: union strictly larger than scope
    std::vector<int64_t> dom(dmax);
    std::iota(dom.begin(), dom.end(), 1);
    for (int i = 0; i < n; ++i)
        inst.variables.push_back({"v" + std::to_string(i), dom, false});

    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    rng.shuffle(ids);
    Constraint ad;
    ad.kind = ConstraintKind::AllDifferent;
    ad.scope.assign(ids.begin(), ids.begin() + m);
    std::sort(ad.scope.begin(), ad.scope.end());
    inst.constraints.push_back(std::move(ad));

    const double p = std::min(0.9, 3.0 / n);
    int diseqs = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.chance(p)) {
                Constraint c;
                c.kind = ConstraintKind::Disequality;
                c.scope = {i, j};
                inst.constraints.push_back(std::move(c));
                ++diseqs;
            }
        }
    }
    if (diseqs == 0) {
        Constraint c;
        c.kind = ConstraintKind::Disequality;
        c.scope = {0, 1};
        inst.constraints.push_back(std::move(c));
    }
    return inst;
}

CspInstance make_random_table(int n, uint64_t seed) {
    CspInstance inst;
    inst.name = instance_name(Family::RandomTable, n, seed);
    Rng rng(mix_seed(seed, 2));
    const int d = 4;
    std::vector<int64_t> dom(d);
    std::iota(dom.begin(), dom.end(), 1);
    for (int i = 0; i < n; ++i)
        inst.variables.push_back({"t" + std::to_string(i), dom, i % 3 == 2});
    // Chain of binary tables, occasionally a negative one.
    for (int i = 0; i + 1 < n; ++i) {
        Constraint c;
        c.kind = ConstraintKind::Table;
        c.scope = {i, static_cast<int>(i + 1 + rng.below(std::min<uint64_t>(2, n - i - 1)))};
        const bool negative = rng.chance(0.25);
        c.polarity = negative ? TablePolarity::Disallowed : TablePolarity::Allowed;
        const double keep = negative ? 0.2 : 0.65;
        for (int64_t a = 1; a <= d; ++a)
            for (int64_t b = 1; b <= d; ++b)
                if (rng.chance(keep)) c.tuples.push_back({a, b});
        if (!negative && c.tuples.empty()) c.tuples.push_back({1, 1});
        inst.constraints.push_back(std::move(c));
    }
    return inst;
}

}  // namespace

CspInstance generate_instance(Family f, int size, uint64_t seed) {
    const FamilyBounds b = family_bounds(f);
    if (size < b.min_size || size > b.max_size)
        throw std::invalid_argument(std::string(to_string(f)) + " size " + std::to_string(size) +
                                    " out of range [" + std::to_string(b.min_size) + ", " +
                                    std::to_string(b.max_size) + "]");
    CspInstance inst;
    switch (f) {
        case Family::PigeonHole: inst = make_pigeonhole(size, seed); break;
        case Family::LatinSquare: inst = make_latin_square(size, seed); break;
        case Family::GraphColouring: inst = make_graph_colouring(size, seed); break;
        case Family::RandomBinaryDiseq: inst = make_random_binary_diseq(size, seed); break;
        case Family::RandomTable: inst = make_random_table(size, seed); break;
    }
    inst.validate();
    return inst;
}

}  // namespace propsel
