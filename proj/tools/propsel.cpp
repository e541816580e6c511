#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "propsel/csp.hpp"
#include "propsel/eval.hpp"
#include "propsel/generate.hpp"
#include "propsel/harness.hpp"
#include "propsel/io.hpp"
#include "propsel/learners.hpp"
#include "propsel/util.hpp"

namespace fs = std::filesystem;
using namespace propsel;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitInternal = 4;

std::vector<CspInstance> load_corpus(const std::string& dir) {
    if (!fs::is_directory(dir)) throw InputError("corpus directory not found: " + dir);
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csp")
            paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw InputError("no .csp files in " + dir);
    std::vector<CspInstance> corpus;
    corpus.reserve(paths.size());
    for (const auto& p : paths) {
        try {
            corpus.push_back(parse_instance(read_file(p), fs::path(p).stem().string()));
        } catch (const ParseError& e) {
            throw InputError(p + ": " + e.what());
        } catch (const SemanticError& e) {
            throw InputError(p + ": " + e.what());
        }
    }
    return corpus;
}

CostMode parse_mode(const std::string& s) {
    auto mode = cost_mode_from_string(s);
    if (!mode) throw InputError("unknown cost mode '" + s + "'");
    return *mode;
}

FeatureSet parse_feature_set(const std::string& s) {
    if (s == "full") return FeatureSet::Full;
    if (s == "cheap") return FeatureSet::Cheap;
    throw InputError("unknown feature set '" + s + "'");
}

// Features joined to the matrix instance order.
struct JoinedFeatures {
    std::vector<const FeatureVector*> rows;
    OverheadInput overhead;
};

JoinedFeatures join_features(const FeatureCorpus& features, const RuntimeMatrix& matrix) {
    std::map<std::string, const FeatureVector*> by_name;
    for (const auto& [name, fv] : features.instances) by_name[name] = &fv;
    JoinedFeatures out;
    for (const auto& name : matrix.instances) {
        auto it = by_name.find(name);
        if (it == by_name.end())
            throw InputError("features file is missing instance '" + name + "'");
        out.rows.push_back(it->second);
        out.overhead.feature_seconds.push_back(it->second->extract_seconds);
        out.overhead.select_seconds.push_back(0.0);
    }
    return out;
}

int cmd_generate(const std::string& family_str, int size, int count, uint64_t seed,
                 const std::string& out_dir) {
    auto family = family_from_string(family_str);
    if (!family) throw InputError("unknown family '" + family_str + "'");
    fs::create_directories(out_dir);
    for (int i = 0; i < count; ++i) {
        CspInstance inst = generate_instance(*family, size, seed + static_cast<uint64_t>(i));
        write_file((fs::path(out_dir) / (inst.name + ".csp")).string(),
                   serialize_instance(inst));
    }
    std::cout << "generated " << count << " instance(s) in " << out_dir << "\n";
    return 0;
}

int cmd_extract(const std::string& corpus_dir, const std::string& set_str, uint64_t seed,
                const std::string& mode_str, int jobs, const std::string& out,
                const std::string& csv_out) {
    const auto corpus = load_corpus(corpus_dir);
    const FeatureCorpus fc =
        extract_corpus(corpus, parse_feature_set(set_str), seed, parse_mode(mode_str), jobs);
    save_features(fc, out);
    if (!csv_out.empty()) write_file(csv_out, features_to_csv(fc));
    std::cout << "extracted features for " << fc.instances.size() << " instance(s) -> " << out
              << "\n";
    return 0;
}

int cmd_bench(const std::string& corpus_dir, double time_limit, int runs,
              const std::string& mode_str, int jobs, const std::string& out) {
    const auto corpus = load_corpus(corpus_dir);
    BenchmarkConfig config;
    config.time_limit_s = time_limit;
    config.runs_per_cell = runs;
    config.mode = parse_mode(mode_str);
    config.jobs = jobs;
    const RuntimeMatrix m = benchmark(corpus, config);
    save_matrix(m, out);
    std::cout << "benchmarked " << m.instances.size() << " instance(s), " << m.raw_runs
              << " raw runs -> " << out << "\n";
    return 0;
}

int cmd_label(const std::string& matrix_path, const std::string& out) {
    const RuntimeMatrix m = load_matrix(matrix_path);
    const LabelledCorpus labels = label_matrix(m);
    save_labels(labels, out);
    size_t dont_know = 0;
    for (const auto& [name, cl] : labels.labels) dont_know += cl.label.dont_know ? 1 : 0;
    std::cout << "labelled " << labels.labels.size() << " instance(s) (" << dont_know
              << " don't-know) -> " << out << "\n";
    return 0;
}

Dataset build_dataset(const FeatureCorpus& features, const LabelledCorpus& labels) {
    std::map<std::string, const FeatureVector*> by_name;
    for (const auto& [name, fv] : features.instances) by_name[name] = &fv;
    Dataset data;
    for (const auto& [name, cl] : labels.labels) {
        if (cl.label.dont_know) continue;
        auto it = by_name.find(name);
        if (it == by_name.end())
            throw InputError("features file is missing instance '" + name + "'");
        LabeledExample e;
        e.name = name;
        e.features = it->second->values;
        e.label = cl.label.best.index();
        e.cost = cl.cost;
        data.examples.push_back(std::move(e));
    }
    return data;
}

int cmd_train(const std::string& features_path, const std::string& labels_path, int folds,
              uint64_t seed, bool no_duplication, const std::string& out) {
    const FeatureCorpus features = load_features(features_path);
    const LabelledCorpus labels = load_labels(labels_path);
    const Dataset data = build_dataset(features, labels);
    if (data.examples.empty()) throw InputError("no usable training examples (all don't-know?)");
    TrainOptions options;
    options.folds = folds;
    options.seed = seed;
    options.feature_set = features.set;
    options.cost_duplication = !no_duplication;
    const EnsembleModel model = train_ensemble(data, options);
    save_ensemble(model, out);
    std::cout << "trained ensemble on " << data.examples.size() << " example(s) -> " << out
              << "\n";
    return 0;
}

int cmd_select(const std::string& model_path, const std::string& features_path,
               const std::string& out) {
    const EnsembleModel model = load_ensemble(model_path);
    const FeatureCorpus features = load_features(features_path);
    if (features.set != model.feature_set)
        throw InputError("feature set of the features file does not match the model");
    std::string csv = "instance,variant\n";
    for (const auto& [name, fv] : features.instances)
        csv += name + "," + select_variant(model, fv.values).str() + "\n";
    if (out.empty())
        std::cout << csv;
    else {
        write_file(out, csv);
        std::cout << "selected variants for " << features.instances.size() << " instance(s) -> "
                  << out << "\n";
    }
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& features_path,
                 const std::string& matrix_path, uint64_t seed, const std::string& out,
                 const std::string& per_instance_out) {
    const EnsembleModel model = load_ensemble(model_path);
    const FeatureCorpus features = load_features(features_path);
    const RuntimeMatrix matrix = load_matrix(matrix_path);
    if (features.set != model.feature_set)
        throw InputError("feature set of the features file does not match the model");
    const JoinedFeatures joined = join_features(features, matrix);

    // Selection overhead is only measurable in wallclock mode; deterministic
    // runs record zero so re-runs are byte-identical.
    OverheadInput overhead = joined.overhead;
    std::vector<int> meta_choice(matrix.instances.size());
    for (size_t i = 0; i < matrix.instances.size(); ++i) {
        const double t0 = thread_cpu_seconds();
        meta_choice[i] = select_variant(model, joined.rows[i]->values).index();
        if (matrix.mode == CostMode::Wallclock)
            overhead.select_seconds[i] = thread_cpu_seconds() - t0;
    }

    std::vector<PenaltyRow> rows = baselines(matrix, seed);

    // Individual classifiers: one two-level selector per (algorithm, fold).
    std::vector<PenaltyRow> individual;
    if (!model.level1.empty()) {
        for (size_t m = 0; m < model.level1.size(); ++m) {
            const BaseModel& l1 = model.level1[m];
            const BaseModel* l2 = m < model.level2.size() ? &model.level2[m] : nullptr;
            auto selector = [&, l2](size_t i) {
                if (l1.predict(joined.rows[i]->values) == 0) return 0;
                if (!l2) return model.default_variant_index;
                return l2->predict(joined.rows[i]->values);
            };
            individual.push_back(evaluate_selector(
                std::string(to_string(l1.algo)) + "/fold" + std::to_string(l1.fold), selector,
                matrix, overhead));
        }
        const auto best = std::min_element(individual.begin(), individual.end(),
                                           [](const PenaltyRow& a, const PenaltyRow& b) {
                                               return a.total_penalty < b.total_penalty;
                                           });
        const auto worst = std::max_element(individual.begin(), individual.end(),
                                            [](const PenaltyRow& a, const PenaltyRow& b) {
                                                return a.total_penalty < b.total_penalty;
                                            });
        PenaltyRow best_row = *best;
        best_row.name = "best classifier (" + best->name + ")";
        PenaltyRow worst_row = *worst;
        worst_row.name = "worst classifier (" + worst->name + ")";
        rows.push_back(std::move(best_row));
        rows.push_back(std::move(worst_row));
    }

    PenaltyRow meta = evaluate_selector(
        "meta-classifier", [&](size_t i) { return meta_choice[i]; }, matrix, overhead);
    rows.push_back(meta);

    const std::string report = format_report(rows, matrix, seed);
    if (out.empty())
        std::cout << report;
    else {
        write_file(out, report);
        std::cout << "report -> " << out << "\n";
    }
    if (!per_instance_out.empty()) {
        write_file(per_instance_out, per_instance_csv(meta, matrix, overhead));
        std::cout << "per-instance data -> " << per_instance_out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"per-instance alldifferent propagator selection pipeline"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate a synthetic instance corpus");
    std::string gen_family = "pigeonhole";
    int gen_size = 4, gen_count = 1;
    uint64_t gen_seed = 0;
    std::string gen_out_dir = "corpus";
    gen->add_option("--family", gen_family,
                    "pigeonhole|latinsquare|graphcolouring|randombinarydiseq|randomtable");
    gen->add_option("--size", gen_size, "family size parameter");
    gen->add_option("--count", gen_count, "number of instances (seeds seed..seed+count-1)");
    gen->add_option("--seed", gen_seed, "base seed");
    gen->add_option("--out-dir", gen_out_dir, "output directory");

    // extract
    auto* ext = app.add_subcommand("extract", "extract instance features");
    std::string ext_corpus = "corpus", ext_set = "full", ext_mode = "wallclock";
    std::string ext_out = "features.json", ext_csv;
    uint64_t ext_seed = 0;
    int ext_jobs = 1;
    ext->add_option("--corpus", ext_corpus, "corpus directory");
    ext->add_option("--feature-set", ext_set, "full|cheap");
    ext->add_option("--seed", ext_seed, "sampling seed");
    ext->add_option("--mode", ext_mode, "wallclock|deterministic");
    ext->add_option("--jobs", ext_jobs, "worker threads");
    ext->add_option("--out", ext_out, "output features file");
    ext->add_option("--csv", ext_csv, "also write a CSV table");

    // bench
    auto* bench = app.add_subcommand("bench", "run all 9 variants over a corpus");
    std::string bench_corpus = "corpus", bench_mode = "wallclock", bench_out = "matrix.json";
    double bench_limit = 3600.0;
    int bench_runs = 3, bench_jobs = 1;
    bench->add_option("--corpus", bench_corpus, "corpus directory");
    bench->add_option("--time-limit", bench_limit, "per-run time limit in seconds");
    bench->add_option("--runs", bench_runs, "runs per cell (odd; 1 in deterministic mode)");
    bench->add_option("--mode", bench_mode, "wallclock|deterministic");
    bench->add_option("--jobs", bench_jobs, "worker threads");
    bench->add_option("--out", bench_out, "output matrix file");

    // label
    auto* label = app.add_subcommand("label", "derive best-variant labels and costs");
    std::string label_matrix_path = "matrix.json", label_out = "labels.json";
    label->add_option("--matrix", label_matrix_path, "runtime matrix file");
    label->add_option("--out", label_out, "output labels file");

    // train
    auto* train = app.add_subcommand("train", "train the two-level ensemble");
    std::string train_features = "features.json", train_labels = "labels.json";
    std::string train_out = "model.json";
    int train_folds = 3;
    uint64_t train_seed = 0;
    bool train_no_dup = false;
    train->add_option("--features", train_features, "features file");
    train->add_option("--labels", train_labels, "labels file");
    train->add_option("--folds", train_folds, "cross-validation folds");
    train->add_option("--seed", train_seed, "fold-split seed");
    train->add_flag("--no-cost-duplication", train_no_dup, "train without cost duplication");
    train->add_option("--out", train_out, "output model file");

    // select
    auto* sel = app.add_subcommand("select", "choose a variant per instance");
    std::string sel_model = "model.json", sel_features = "features.json", sel_out;
    sel->add_option("--model", sel_model, "model file");
    sel->add_option("--features", sel_features, "features file");
    sel->add_option("--out", sel_out, "output CSV (stdout when omitted)");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "misclassification-penalty report");
    std::string eval_model = "model.json", eval_features = "features.json";
    std::string eval_matrix = "matrix.json", eval_out, eval_per_instance;
    uint64_t eval_seed = 0;
    eval->add_option("--model", eval_model, "model file");
    eval->add_option("--features", eval_features, "features file");
    eval->add_option("--matrix", eval_matrix, "runtime matrix file");
    eval->add_option("--seed", eval_seed, "random-baseline seed");
    eval->add_option("--out", eval_out, "report file (stdout when omitted)");
    eval->add_option("--per-instance", eval_per_instance, "per-instance CSV");

    // Flags override config-file values.
    for (auto* sub : app.get_subcommands(nullptr)) sub->set_config("--config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (gen->parsed())
            return cmd_generate(gen_family, gen_size, gen_count, gen_seed, gen_out_dir);
        if (ext->parsed())
            return cmd_extract(ext_corpus, ext_set, ext_seed, ext_mode, ext_jobs, ext_out,
                               ext_csv);
        if (bench->parsed())
            return cmd_bench(bench_corpus, bench_limit, bench_runs, bench_mode, bench_jobs,
                             bench_out);
        if (label->parsed()) return cmd_label(label_matrix_path, label_out);
        if (train->parsed())
            return cmd_train(train_features, train_labels, train_folds, train_seed, train_no_dup,
                             train_out);
        if (sel->parsed()) return cmd_select(sel_model, sel_features, sel_out);
        if (eval->parsed())
            return cmd_evaluate(eval_model, eval_features, eval_matrix, eval_seed, eval_out,
                                eval_per_instance);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const SemanticError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
