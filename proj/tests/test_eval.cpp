#include "doctest.h"
#include "propsel/eval.hpp"
#include "propsel/generate.hpp"
#include "propsel/harness.hpp"

using namespace propsel;

namespace {

RunRecord cell(SolveStatus status, double cpu, uint64_t nodes = 10) {
    RunRecord r;
    r.status = status;
    r.cpu_time_s = cpu;
    r.nodes = nodes;
    r.op_count = static_cast<uint64_t>(cpu * 1000);
    return r;
}

std::array<RunRecord, kVariantCount> cells_with_times(const std::array<double, 9>& times) {
    std::array<RunRecord, kVariantCount> out;
    for (int v = 0; v < kVariantCount; ++v) out[v] = cell(SolveStatus::Sat, times[v]);
    return out;
}

RuntimeMatrix tiny_matrix() {
    RuntimeMatrix m;
    m.time_limit_s = 3600.0;
    m.runs_per_cell = 1;
    m.mode = CostMode::Deterministic;
    m.instances = {"i0", "i1", "i2"};
    m.cells.push_back(cells_with_times({1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0}));
    m.cells.push_back(cells_with_times({9.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0}));
    auto with_timeout = cells_with_times({100.0, 40.0, 40.0, 40.0, 40.0, 40.0, 40.0, 40.0, 40.0});
    with_timeout[8] = cell(SolveStatus::Timeout, 3600.0);
    m.cells.push_back(with_timeout);
    return m;
}

}  // namespace

TEST_CASE("penalty of single choices") {
    auto cells = cells_with_times({10.0, 12.0, 15.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0});
    CHECK(penalty(0, cells, 3600.0) == doctest::Approx(0.0));
    CHECK(penalty(1, cells, 3600.0) == doctest::Approx(2.0));

    cells[2] = cell(SolveStatus::Timeout, 3600.0);
    cells[0] = cell(SolveStatus::Sat, 100.0);
    cells[1] = cell(SolveStatus::Sat, 100.0);
    // fastest solved is 20.0 at index 3
    CHECK(penalty(2, cells, 3600.0) == doctest::Approx(3580.0));

    std::array<RunRecord, kVariantCount> nothing;
    for (auto& c : nothing) c = cell(SolveStatus::Timeout, 3600.0);
    for (int v = 0; v < kVariantCount; ++v) CHECK(penalty(v, nothing, 3600.0) == 0.0);
}

TEST_CASE("timeout substitution reproduces the limit-minus-fastest rule") {
    auto cells = cells_with_times({100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0, 800.0, 900.0});
    cells[4] = cell(SolveStatus::Timeout, 3600.0);
    CHECK(penalty(4, cells, 3600.0) == doctest::Approx(3500.0));
}

TEST_CASE("baseline rows have the documented structure") {
    const RuntimeMatrix m = tiny_matrix();
    const auto rows = baselines(m, 7);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].name == "oracle");
    CHECK(rows[0].total_penalty == doctest::Approx(0.0));

    // The anti-oracle dominates every other row and every constant row.
    const double anti = rows[1].total_penalty;
    for (const auto& r : rows) CHECK(anti >= r.total_penalty);
    for (int v = 0; v < kVariantCount; ++v)
        CHECK(anti >= constant_row(v, m).total_penalty);

    // Per-instance sandwich: oracle <= row <= anti-oracle.
    for (const auto& r : rows)
        for (size_t i = 0; i < m.instances.size(); ++i) {
            CHECK(r.penalties[i] >= rows[0].penalties[i]);
            CHECK(r.penalties[i] <= rows[1].penalties[i]);
        }
}

TEST_CASE("default decision row is zero when the default is fastest everywhere") {
    RuntimeMatrix m;
    m.time_limit_s = 3600.0;
    m.instances = {"a"};
    std::array<double, 9> times;
    times.fill(5.0);
    times[default_variant().index()] = 1.0;
    m.cells.push_back(cells_with_times(times));
    const auto rows = baselines(m, 1);
    CHECK(rows[2].name == "default decision");
    CHECK(rows[2].total_penalty == doctest::Approx(0.0));
}

TEST_CASE("random expectation equals the mean of the constant-variant rows") {
    const RuntimeMatrix m = tiny_matrix();
    const auto rows = baselines(m, 3);
    const PenaltyRow& expectation = rows[4];
    CHECK(expectation.name == "random expectation");
    double total = 0.0;
    for (int v = 0; v < kVariantCount; ++v) total += constant_row(v, m).total_penalty;
    CHECK(expectation.total_penalty ==
          doctest::Approx(total / kVariantCount).epsilon(1e-9));

    // Two variants {1, 3} on one instance: expectation (0 + 2) / 2 = 1.
    std::array<RunRecord, kVariantCount> pair_cells = cells_with_times({1, 3, 1, 3, 1, 3, 1, 3, 1});
    double sum = 0.0;
    for (int v = 0; v < kVariantCount; ++v) sum += penalty(v, pair_cells, 3600.0);
    CHECK(sum / kVariantCount == doctest::Approx(1.0 * 4 / 9 * 2));
}

TEST_CASE("penalties scale linearly with the cell times") {
    const RuntimeMatrix m = tiny_matrix();
    RuntimeMatrix scaled = m;
    for (auto& row : scaled.cells)
        for (auto& c : row) c.cpu_time_s *= 4.0;
    scaled.time_limit_s *= 4.0;
    for (int v = 0; v < kVariantCount; ++v) {
        const double base = constant_row(v, m).total_penalty;
        const double big = constant_row(v, scaled).total_penalty;
        CHECK(big == doctest::Approx(4.0 * base));
    }
}

TEST_CASE("report formatting includes every row") {
    const RuntimeMatrix m = tiny_matrix();
    auto rows = baselines(m, 5);
    const std::string report = format_report(rows, m, 5);
    for (const auto& r : rows) CHECK(report.find(r.name) != std::string::npos);
    CHECK(report.find("penalty") != std::string::npos);
    CHECK(report.find("random seed: 5") != std::string::npos);
}

TEST_CASE("per-instance csv lists one line per instance") {
    const RuntimeMatrix m = tiny_matrix();
    const PenaltyRow row = constant_row(0, m);
    OverheadInput overhead;
    overhead.feature_seconds = {0.5, 0.5, 0.5};
    overhead.select_seconds = {0.1, 0.1, 0.1};
    const std::string csv = per_instance_csv(row, m, overhead);
    size_t lines = 0;
    for (char c : csv) lines += c == '\n' ? 1 : 0;
    CHECK(lines == 1 + m.instances.size());
    CHECK(csv.find("i0") != std::string::npos);
    CHECK(csv.find("naive") != std::string::npos);
}

TEST_CASE("speedup columns respond to overhead") {
    RuntimeMatrix m;
    m.time_limit_s = 100.0;
    m.instances = {"a"};
    std::array<double, 9> times;
    times.fill(10.0);
    times[0] = 2.0;
    m.cells.push_back(cells_with_times(times));
    OverheadInput overhead;
    overhead.feature_seconds = {3.0};
    overhead.select_seconds = {1.0};
    const PenaltyRow row = evaluate_selector(
        "always naive", [](size_t) { return 0; }, m, overhead);
    CHECK(row.mean_speedup == doctest::Approx(10.0 / 2.0));
    CHECK(row.mean_speedup_net == doctest::Approx(10.0 / 6.0));
}
