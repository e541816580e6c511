#include "propsel/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "propsel/eval.hpp"
#include "propsel/io.hpp"
#include "propsel/util.hpp"

namespace propsel {

const char* to_string(CostMode m) {
    return m == CostMode::Wallclock ? "wallclock" : "deterministic";
}

std::optional<CostMode> cost_mode_from_string(std::string_view s) {
    if (s == "wallclock") return CostMode::Wallclock;
    if (s == "deterministic") return CostMode::Deterministic;
    return std::nullopt;
}

int RuntimeMatrix::instance_index(const std::string& name) const {
    for (size_t i = 0; i < instances.size(); ++i)
        if (instances[i] == name) return static_cast<int>(i);
    return -1;
}

RunRecord aggregate_runs(const std::vector<RunRecord>& runs) {
    RunRecord out = runs.front();
    std::vector<double> times, nodes, ops;
    int status_count[3] = {0, 0, 0};
    for (const auto& r : runs) {
        times.push_back(r.cpu_time_s);
        nodes.push_back(static_cast<double>(r.nodes));
        ops.push_back(static_cast<double>(r.op_count));
        ++status_count[static_cast<int>(r.status)];
    }
    out.cpu_time_s = median(times);
    out.nodes = static_cast<uint64_t>(std::llround(median(nodes)));
    out.op_count = static_cast<uint64_t>(std::llround(median(ops)));
    int best = 0;
    for (int s = 1; s < 3; ++s)
        if (status_count[s] > status_count[best]) best = s;
    out.status = static_cast<SolveStatus>(best);
    return out;
}

static void run_parallel(size_t task_count, int jobs, const std::function<void(size_t)>& task) {
    if (jobs <= 1 || task_count <= 1) {
        for (size_t i = 0; i < task_count; ++i) task(i);
        return;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= task_count) return;
            task(i);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(jobs, static_cast<int>(task_count));
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

RuntimeMatrix benchmark(const std::vector<CspInstance>& corpus, const BenchmarkConfig& config) {
    if (config.runs_per_cell < 1 || config.runs_per_cell % 2 == 0)
        throw std::invalid_argument("runs_per_cell must be odd and positive");
    if (config.mode == CostMode::Deterministic && config.runs_per_cell != 1)
        throw std::invalid_argument("Deterministic mode requires runs_per_cell = 1");
    if (config.time_limit_s <= 0) throw std::invalid_argument("time limit must be positive");

    RuntimeMatrix m;
    m.time_limit_s = config.time_limit_s;
    m.runs_per_cell = config.runs_per_cell;
    m.mode = config.mode;
    m.instances.reserve(corpus.size());
    for (const auto& inst : corpus) m.instances.push_back(inst.name);
    m.cells.resize(corpus.size());

    SearchLimits limits;
    if (config.mode == CostMode::Deterministic) {
        limits.time_limit_s = std::numeric_limits<double>::infinity();
        limits.op_limit = static_cast<uint64_t>(std::ceil(config.time_limit_s / kSecondsPerOp));
    } else {
        limits.time_limit_s = config.time_limit_s;
    }

    const int r = config.runs_per_cell;
    const size_t tasks = corpus.size() * kVariantCount * static_cast<size_t>(r);
    std::vector<RunRecord> raw(tasks);
    run_parallel(tasks, config.jobs, [&](size_t t) {
        const size_t inst_idx = t / (kVariantCount * r);
        const int variant = static_cast<int>(t / r % kVariantCount);
        raw[t] = solve(corpus[inst_idx], VariantId::from_index(variant), limits).record;
        if (config.mode == CostMode::Deterministic)
            raw[t].cpu_time_s = static_cast<double>(raw[t].op_count) * kSecondsPerOp;
    });
    m.raw_runs = tasks;

    for (size_t i = 0; i < corpus.size(); ++i) {
        for (int v = 0; v < kVariantCount; ++v) {
            std::vector<RunRecord> runs(raw.begin() + (i * kVariantCount + v) * r,
                                        raw.begin() + (i * kVariantCount + v) * r + r);
            m.cells[i][v] = aggregate_runs(runs);
        }
    }
    return m;
}

CostedLabel label_instance(const std::array<RunRecord, kVariantCount>& cells,
                           double time_limit_s) {
    CostedLabel out;
    bool any_solved = false;
    double best_solved = std::numeric_limits<double>::infinity();
    for (const auto& c : cells) {
        if (c.status != SolveStatus::Timeout) {
            any_solved = true;
            best_solved = std::min(best_solved, c.cpu_time_s);
        }
    }
    if (!any_solved) {
        out.label.dont_know = true;
        out.cost = 0.0;
        return out;
    }

    const RunRecord& naive = cells[0];
    bool naive_strictly_fastest = naive.status != SolveStatus::Timeout;
    if (naive_strictly_fastest) {
        for (int v = 1; v < kVariantCount; ++v) {
            if (cells[v].status == SolveStatus::Timeout) continue;
            if (!(naive.cpu_time_s < cells[v].cpu_time_s)) {
                naive_strictly_fastest = false;
                break;
            }
        }
    }
    if (naive_strictly_fastest) {
        out.label.best = VariantId::naive();
    } else {
        // Best nodes per second among solving GAC variants, compared by
        // cross-multiplication so zero times need no special case.
        int best = -1;
        for (int v = 1; v < kVariantCount; ++v) {
            if (cells[v].status == SolveStatus::Timeout) continue;
            if (best == -1) {
                best = v;
                continue;
            }
            const double lhs = static_cast<double>(cells[v].nodes) * cells[best].cpu_time_s;
            const double rhs = static_cast<double>(cells[best].nodes) * cells[v].cpu_time_s;
            if (lhs > rhs) best = v;
        }
        // No GAC variant solved implies naive solved alone, which the
        // strictly-fastest branch already covered.
        out.label.best = VariantId::from_index(best);
    }

    double max_penalty = 0.0;
    for (int v = 0; v < kVariantCount; ++v)
        max_penalty = std::max(max_penalty, penalty(v, cells, time_limit_s));
    out.cost = std::min(max_penalty, time_limit_s);
    return out;
}

LabelledCorpus label_matrix(const RuntimeMatrix& matrix) {
    LabelledCorpus out;
    out.time_limit_s = matrix.time_limit_s;
    out.mode = matrix.mode;
    out.labels.reserve(matrix.instances.size());
    for (size_t i = 0; i < matrix.instances.size(); ++i)
        out.labels.emplace_back(matrix.instances[i],
                                label_instance(matrix.cells[i], matrix.time_limit_s));
    return out;
}

nlohmann::json matrix_to_json(const RuntimeMatrix& m) {
    nlohmann::json doc = make_document("runtime_matrix");
    doc["meta"] = {{"time_limit_s", m.time_limit_s},
                   {"runs_per_cell", m.runs_per_cell},
                   {"cost_mode", to_string(m.mode)},
                   {"seconds_per_op", kSecondsPerOp},
                   {"raw_runs", m.raw_runs}};
    nlohmann::json cells = nlohmann::json::array();
    for (size_t i = 0; i < m.instances.size(); ++i) {
        for (int v = 0; v < kVariantCount; ++v) {
            const RunRecord& r = m.cells[i][v];
            cells.push_back({{"instance", m.instances[i]},
                             {"variant", VariantId::from_index(v).str()},
                             {"status", to_string(r.status)},
                             {"cpu_time_s", r.cpu_time_s},
                             {"nodes", r.nodes},
                             {"op_count", r.op_count}});
        }
    }
    doc["cells"] = std::move(cells);
    nlohmann::json order = nlohmann::json::array();
    for (const auto& name : m.instances) order.push_back(name);
    doc["instances"] = std::move(order);
    return doc;
}

RuntimeMatrix matrix_from_json(const nlohmann::json& doc) {
    RuntimeMatrix m;
    const auto& meta = doc.at("meta");
    m.time_limit_s = meta.at("time_limit_s").get<double>();
    m.runs_per_cell = meta.at("runs_per_cell").get<int>();
    auto mode = cost_mode_from_string(meta.at("cost_mode").get<std::string>());
    if (!mode) throw InputError("unknown cost mode in matrix file");
    m.mode = *mode;
    m.raw_runs = meta.value("raw_runs", uint64_t{0});

    for (const auto& name : doc.at("instances")) m.instances.push_back(name.get<std::string>());
    m.cells.resize(m.instances.size());
    std::vector<std::array<bool, kVariantCount>> filled(m.instances.size());
    for (auto& f : filled) f.fill(false);

    for (const auto& cell : doc.at("cells")) {
        const std::string inst = cell.at("instance").get<std::string>();
        const int i = m.instance_index(inst);
        if (i < 0) throw InputError("matrix cell references unknown instance " + inst);
        auto variant = VariantId::from_string(cell.at("variant").get<std::string>());
        if (!variant) throw InputError("unknown variant in matrix file");
        auto status = status_from_string(cell.at("status").get<std::string>());
        if (!status) throw InputError("unknown status in matrix file");
        RunRecord r;
        r.instance = inst;
        r.variant = *variant;
        r.status = *status;
        r.cpu_time_s = cell.at("cpu_time_s").get<double>();
        r.nodes = cell.at("nodes").get<uint64_t>();
        r.op_count = cell.at("op_count").get<uint64_t>();
        m.cells[i][variant->index()] = r;
        filled[i][variant->index()] = true;
    }
    for (size_t i = 0; i < filled.size(); ++i)
        for (int v = 0; v < kVariantCount; ++v)
            if (!filled[i][v])
                throw InputError("matrix is missing cell (" + m.instances[i] + ", " +
                                 VariantId::from_index(v).str() + ")");
    return m;
}

void save_matrix(const RuntimeMatrix& m, const std::string& path) {
    write_file(path, matrix_to_json(m).dump(2) + "\n");
}

RuntimeMatrix load_matrix(const std::string& path) {
    return matrix_from_json(load_document(path, "runtime_matrix"));
}

nlohmann::json labels_to_json(const LabelledCorpus& l) {
    nlohmann::json doc = make_document("labels");
    doc["meta"] = {{"time_limit_s", l.time_limit_s}, {"cost_mode", to_string(l.mode)}};
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& [name, cl] : l.labels) {
        nlohmann::json entry = {{"instance", name}, {"cost", cl.cost}};
        entry["label"] = cl.label.dont_know ? "dont_know" : cl.label.best.str();
        labels.push_back(std::move(entry));
    }
    doc["labels"] = std::move(labels);
    return doc;
}

LabelledCorpus labels_from_json(const nlohmann::json& doc) {
    LabelledCorpus out;
    const auto& meta = doc.at("meta");
    out.time_limit_s = meta.at("time_limit_s").get<double>();
    auto mode = cost_mode_from_string(meta.at("cost_mode").get<std::string>());
    if (!mode) throw InputError("unknown cost mode in labels file");
    out.mode = *mode;
    for (const auto& entry : doc.at("labels")) {
        CostedLabel cl;
        const std::string label = entry.at("label").get<std::string>();
        if (label == "dont_know") {
            cl.label.dont_know = true;
        } else {
            auto variant = VariantId::from_string(label);
            if (!variant) throw InputError("unknown label '" + label + "' in labels file");
            cl.label.best = *variant;
        }
        cl.cost = entry.at("cost").get<double>();
        out.labels.emplace_back(entry.at("instance").get<std::string>(), cl);
    }
    return out;
}

void save_labels(const LabelledCorpus& l, const std::string& path) {
    write_file(path, labels_to_json(l).dump(2) + "\n");
}

LabelledCorpus load_labels(const std::string& path) {
    return labels_from_json(load_document(path, "labels"));
}

FeatureCorpus extract_corpus(const std::vector<CspInstance>& corpus, FeatureSet set,
                             uint64_t seed, CostMode mode, int jobs) {
    FeatureCorpus out;
    out.set = set;
    out.seed = seed;
    out.mode = mode;
    out.instances.resize(corpus.size());
    run_parallel(corpus.size(), jobs, [&](size_t i) {
        out.instances[i] = {corpus[i].name,
                            extract_features(corpus[i], set, seed,
                                             mode == CostMode::Wallclock)};
    });
    return out;
}

nlohmann::json features_to_json(const FeatureCorpus& f) {
    nlohmann::json doc = make_document("features");
    doc["meta"] = {{"feature_set", to_string(f.set)},
                   {"seed", f.seed},
                   {"cost_mode", to_string(f.mode)}};
    const auto& names = feature_names(f.set);
    nlohmann::json instances = nlohmann::json::array();
    for (const auto& [name, fv] : f.instances) {
        nlohmann::json values;
        for (size_t i = 0; i < names.size(); ++i) values[names[i]] = fv.values[i];
        instances.push_back({{"instance", name},
                             {"features", std::move(values)},
                             {"extract_seconds", fv.extract_seconds},
                             {"flags",
                              {{"no_constraints", fv.no_constraints},
                               {"no_alldiff", fv.no_alldiff},
                               {"single_variable", fv.single_variable}}}});
    }
    doc["instances"] = std::move(instances);
    return doc;
}

FeatureCorpus features_from_json(const nlohmann::json& doc) {
    FeatureCorpus out;
    const auto& meta = doc.at("meta");
    const std::string set = meta.at("feature_set").get<std::string>();
    if (set == "full")
        out.set = FeatureSet::Full;
    else if (set == "cheap")
        out.set = FeatureSet::Cheap;
    else
        throw InputError("unknown feature set '" + set + "'");
    out.seed = meta.at("seed").get<uint64_t>();
    auto mode = cost_mode_from_string(meta.at("cost_mode").get<std::string>());
    if (!mode) throw InputError("unknown cost mode in features file");
    out.mode = *mode;

    const auto& names = feature_names(out.set);
    for (const auto& entry : doc.at("instances")) {
        FeatureVector fv;
        fv.set = out.set;
        fv.seed = out.seed;
        fv.extract_seconds = entry.at("extract_seconds").get<double>();
        const auto& values = entry.at("features");
        fv.values.reserve(names.size());
        for (const auto& n : names) {
            if (!values.contains(n)) throw InputError("features file is missing feature " + n);
            fv.values.push_back(values.at(n).get<double>());
        }
        const auto& flags = entry.at("flags");
        fv.no_constraints = flags.at("no_constraints").get<bool>();
        fv.no_alldiff = flags.at("no_alldiff").get<bool>();
        fv.single_variable = flags.at("single_variable").get<bool>();
        out.instances.emplace_back(entry.at("instance").get<std::string>(), std::move(fv));
    }
    return out;
}

void save_features(const FeatureCorpus& f, const std::string& path) {
    write_file(path, features_to_json(f).dump(2) + "\n");
}

FeatureCorpus load_features(const std::string& path) {
    return features_from_json(load_document(path, "features"));
}

std::string features_to_csv(const FeatureCorpus& f) {
    std::string out = "instance";
    for (const auto& n : feature_names(f.set)) out += "," + n;
    out += "\n";
    for (const auto& [name, fv] : f.instances) {
        out += name;
        for (double v : fv.values) {
            char buf[32];
            snprintf(buf, sizeof(buf), "%.17g", v);
            out += ",";
            out += buf;
        }
        out += "\n";
    }
    return out;
}

}  // namespace propsel
