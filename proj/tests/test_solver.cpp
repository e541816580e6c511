#include <algorithm>
#include <limits>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "propsel/generate.hpp"
#include "propsel/rng.hpp"
#include "propsel/solver.hpp"

using namespace propsel;

namespace {

using Domains = std::vector<std::vector<int64_t>>;

Domains sorted(Domains d) {
    for (auto& dom : d) std::sort(dom.begin(), dom.end());
    return d;
}

Domains random_state(Rng& rng, int max_vars, int max_value) {
    const int k = 2 + static_cast<int>(rng.below(max_vars - 1));
    Domains domains(k);
    for (auto& dom : domains) {
        for (int64_t v = 1; v <= max_value; ++v)
            if (rng.chance(0.5)) dom.push_back(v);
        if (dom.empty()) dom.push_back(1 + static_cast<int64_t>(rng.below(max_value)));
        rng.shuffle(dom);
    }
    return domains;
}

CspInstance random_instance(Rng& rng) {
    CspInstance inst;
    inst.name = "random";
    const int nvars = 2 + static_cast<int>(rng.below(4));
    for (int i = 0; i < nvars; ++i) {
        Variable v;
        v.name = "v" + std::to_string(i);
        const int d = 1 + static_cast<int>(rng.below(4));
        for (int64_t x = 1; x <= d; ++x) v.domain.push_back(x);
        rng.shuffle(v.domain);
        inst.variables.push_back(std::move(v));
    }
    const int ncons = 1 + static_cast<int>(rng.below(4));
    for (int c = 0; c < ncons; ++c) {
        Constraint con;
        std::vector<int> ids(nvars);
        for (int i = 0; i < nvars; ++i) ids[i] = i;
        rng.shuffle(ids);
        switch (rng.below(3)) {
            case 0: {
                con.kind = ConstraintKind::AllDifferent;
                const int arity = 2 + static_cast<int>(rng.below(nvars - 1));
                con.scope.assign(ids.begin(), ids.begin() + arity);
                break;
            }
            case 1: {
                con.kind = ConstraintKind::Disequality;
                con.scope = {ids[0], ids[1]};
                break;
            }
            default: {
                con.kind = ConstraintKind::Table;
                const int arity = 2 + static_cast<int>(rng.below(std::min(nvars, 3) - 1));
                con.scope.assign(ids.begin(), ids.begin() + arity);
                con.polarity = rng.chance(0.5) ? TablePolarity::Allowed : TablePolarity::Disallowed;
                const double keep = con.polarity == TablePolarity::Allowed ? 0.6 : 0.25;
                std::vector<int64_t> tuple(arity);
                auto fill = [&](auto&& self, int pos) -> void {
                    if (pos == arity) {
                        if (rng.chance(keep)) con.tuples.push_back(tuple);
                        return;
                    }
                    for (int64_t v : inst.variables[con.scope[pos]].domain) {
                        tuple[pos] = v;
                        self(self, pos + 1);
                    }
                };
                fill(fill, 0);
                break;
            }
        }
        inst.constraints.push_back(std::move(con));
    }
    inst.validate();
    return inst;
}

}  // namespace

TEST_CASE("naive propagation removes assigned values from the rest of the scope") {
    Domains d = {{1}, {1, 2}};
    CHECK(propagate_naive_alldiff(d) == PropagateOutcome::Pruned);
    CHECK(d == Domains{{1}, {2}});

    Domains unchanged = {{1, 2}, {1, 2}};
    CHECK(propagate_naive_alldiff(unchanged) == PropagateOutcome::Stable);
    CHECK(unchanged == Domains{{1, 2}, {1, 2}});

    Domains wipe = {{1}, {1}};
    CHECK(propagate_naive_alldiff(wipe) == PropagateOutcome::Failed);
}

TEST_CASE("naive propagation chains through forced assignments") {
    Domains d = {{1}, {1, 2}, {1, 2, 3}};
    CHECK(propagate_naive_alldiff(d) == PropagateOutcome::Pruned);
    CHECK(d == Domains{{1}, {2}, {3}});
}

TEST_CASE("gac propagation matches the worked examples") {
    for (const auto& knobs : VariantId::all()) {
        if (!knobs.gac) continue;

        Domains hall = {{1, 2}, {1, 2}, {1, 2}};
        CHECK(propagate_gac_alldiff(hall, knobs) == PropagateOutcome::Failed);

        Domains prune = {{1, 2}, {1, 2}, {1, 2, 3}};
        CHECK(propagate_gac_alldiff(prune, knobs) == PropagateOutcome::Pruned);
        CHECK(prune == Domains{{1, 2}, {1, 2}, {3}});

        Domains full = {{1, 2, 3}, {1, 2, 3}, {1, 2, 3}};
        CHECK(propagate_gac_alldiff(full, knobs) == PropagateOutcome::Stable);
        CHECK(full == Domains{{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
    }
}

TEST_CASE("gac propagation equals the solution-support oracle on random states") {
    Rng rng(0xfeedULL);
    for (int trial = 0; trial < 300; ++trial) {
        const Domains state = random_state(rng, 6, 6);
        const auto oracle = test::alldiff_support_oracle(state);
        for (const auto& knobs : VariantId::all()) {
            if (!knobs.gac) continue;
            Domains d = state;
            const PropagateOutcome outcome = propagate_gac_alldiff(d, knobs);
            if (!oracle) {
                CHECK(outcome == PropagateOutcome::Failed);
            } else {
                REQUIRE(outcome != PropagateOutcome::Failed);
                CHECK(sorted(d) == *oracle);
            }
        }
    }
}

TEST_CASE("propagators only ever remove values") {
    Rng rng(0xbeefULL);
    for (int trial = 0; trial < 100; ++trial) {
        const Domains state = random_state(rng, 5, 5);
        for (int variant = 0; variant < kVariantCount; ++variant) {
            Domains d = state;
            const auto v = VariantId::from_index(variant);
            const PropagateOutcome outcome =
                v.gac ? propagate_gac_alldiff(d, v) : propagate_naive_alldiff(d);
            if (outcome == PropagateOutcome::Failed) continue;
            for (size_t i = 0; i < d.size(); ++i) {
                std::set<int64_t> before(state[i].begin(), state[i].end());
                for (int64_t x : d[i]) CHECK(before.count(x) == 1);
            }
        }
    }
}

TEST_CASE("single forced assignment costs one node") {
    CspInstance inst;
    inst.name = "one";
    inst.variables.push_back({"x", {5}, false});
    const SolveResult r = solve(inst, default_variant(), {});
    CHECK(r.record.status == SolveStatus::Sat);
    CHECK(r.record.nodes == 1);
    CHECK(r.solution == std::vector<int64_t>{5});
}

TEST_CASE("pigeonhole separates gac from the decomposition") {
    const CspInstance ph = generate_instance(Family::PigeonHole, 3, 0);
    for (const auto& variant : VariantId::all()) {
        const SolveResult r = solve(ph, variant, {});
        CHECK(r.record.status == SolveStatus::Unsat);
        if (variant.gac)
            CHECK(r.record.nodes == 0);
        else
            CHECK(r.record.nodes > 0);
    }
}

TEST_CASE("root propagation feeds the search") {
    // {1,2},{1,2},{1,2,3}: the third variable is pruned to 3 at the root.
    CspInstance inst;
    inst.name = "root";
    inst.variables.push_back({"a", {1, 2}, false});
    inst.variables.push_back({"b", {1, 2}, false});
    inst.variables.push_back({"c", {1, 2, 3}, false});
    Constraint c;
    c.kind = ConstraintKind::AllDifferent;
    c.scope = {0, 1, 2};
    inst.constraints.push_back(c);
    const SolveResult r = solve(inst, default_variant(), {});
    CHECK(r.record.status == SolveStatus::Sat);
    CHECK(r.solution[2] == 3);
}

TEST_CASE("all gac variants search identically; naive agrees on status") {
    std::vector<CspInstance> corpus;
    corpus.push_back(generate_instance(Family::PigeonHole, 4, 0));
    corpus.push_back(generate_instance(Family::LatinSquare, 3, 1));
    corpus.push_back(generate_instance(Family::LatinSquare, 4, 2));
    corpus.push_back(generate_instance(Family::GraphColouring, 10, 3));
    corpus.push_back(generate_instance(Family::RandomBinaryDiseq, 8, 4));
    corpus.push_back(generate_instance(Family::RandomTable, 6, 5));

    for (const auto& inst : corpus) {
        bool has_alldiff = false;
        for (const auto& c : inst.constraints)
            if (c.kind == ConstraintKind::AllDifferent) has_alldiff = true;

        SolveResult reference;
        bool have_reference = false;
        std::set<uint64_t> op_counts;
        for (const auto& variant : VariantId::all()) {
            const SolveResult r = solve(inst, variant, {});
            REQUIRE(r.record.status != SolveStatus::Timeout);
            if (!variant.gac) {
                continue;
            }
            if (!have_reference) {
                reference = r;
                have_reference = true;
            } else {
                CHECK(r.record.status == reference.record.status);
                CHECK(r.record.nodes == reference.record.nodes);
                CHECK(r.solution == reference.solution);
            }
            op_counts.insert(r.record.op_count);
        }
        const SolveResult naive = solve(inst, VariantId::naive(), {});
        CHECK(naive.record.status == reference.record.status);
        // The knobs must show up in the work counter whenever there is an
        // alldifferent to propagate.
        if (has_alldiff) CHECK(op_counts.size() > 1);
    }
}

TEST_CASE("statuses agree with exhaustive enumeration on random instances") {
    Rng rng(0x5eedULL);
    for (int trial = 0; trial < 60; ++trial) {
        const CspInstance inst = random_instance(rng);
        const auto solutions = test::enumerate_solutions(inst, 1);
        for (const auto& variant : VariantId::all()) {
            const SolveResult r = solve(inst, variant, {});
            REQUIRE(r.record.status != SolveStatus::Timeout);
            CHECK((r.record.status == SolveStatus::Sat) == !solutions.empty());
            if (r.record.status == SolveStatus::Sat) {
                for (const auto& c : inst.constraints) {
                    std::vector<int64_t> scoped;
                    for (int s : c.scope) scoped.push_back(r.solution[s]);
                    CHECK(c.satisfied_by(scoped));
                }
            }
        }
    }
}

TEST_CASE("limits produce timeout statuses") {
    const CspInstance ph = generate_instance(Family::PigeonHole, 7, 0);

    SearchLimits node_limits;
    node_limits.node_limit = 10;
    const SolveResult by_nodes = solve(ph, VariantId::naive(), node_limits);
    CHECK(by_nodes.record.status == SolveStatus::Timeout);
    CHECK(by_nodes.record.nodes <= 10);

    SearchLimits op_limits;
    op_limits.time_limit_s = std::numeric_limits<double>::infinity();
    op_limits.op_limit = 5000;
    const SolveResult by_ops = solve(ph, VariantId::naive(), op_limits);
    CHECK(by_ops.record.status == SolveStatus::Timeout);
    CHECK(by_ops.record.op_count >= 5000);

    CHECK_THROWS_AS(solve(ph, VariantId::naive(), SearchLimits{-1.0, {}, {}}),
                    std::invalid_argument);
}

TEST_CASE("solve is deterministic in its work counters") {
    const CspInstance inst = generate_instance(Family::LatinSquare, 4, 3);
    for (const auto& variant : VariantId::all()) {
        const SolveResult a = solve(inst, variant, {});
        const SolveResult b = solve(inst, variant, {});
        CHECK(a.record.nodes == b.record.nodes);
        CHECK(a.record.op_count == b.record.op_count);
        CHECK(a.record.status == b.record.status);
    }
}

TEST_CASE("variant ids enumerate, print and round-trip") {
    CHECK(VariantId::all().size() == 9);
    std::set<std::string> names;
    std::set<int> indices;
    for (const auto& v : VariantId::all()) {
        names.insert(v.str());
        indices.insert(v.index());
        CHECK(VariantId::from_index(v.index()) == v);
        CHECK(VariantId::from_string(v.str()) == v);
    }
    CHECK(names.size() == 9);
    CHECK(*indices.begin() == 0);
    CHECK(*indices.rbegin() == 8);
    CHECK(VariantId::naive().index() == 0);
    CHECK(VariantId::naive().str() == "naive");
    CHECK(default_variant().gac);
    CHECK(default_variant().str() == "gac-incr-comp-any");
    CHECK(!VariantId::from_string("gac-warp-drive"));
}
