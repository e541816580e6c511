#include "propsel/learners.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "propsel/io.hpp"
#include "propsel/rng.hpp"

namespace propsel {

int copies_for_cost(double cost) {
    if (!(cost > 0.0)) return 1;
    const int copies = 1 + static_cast<int>(std::ceil(std::log2(cost)));
    return std::clamp(copies, 1, kMaxCopies);
}

Dataset duplicate_by_cost(const Dataset& raw) {
    Dataset out;
    out.duplicated = true;
    for (const auto& e : raw.examples) {
        const int copies = copies_for_cost(e.cost);
        for (int c = 0; c < copies; ++c) out.examples.push_back(e);
    }
    return out;
}

std::vector<int> stratified_kfold(const std::vector<int>& labels, int k, uint64_t seed) {
    if (k < 2) throw std::invalid_argument("fold count must be at least 2");
    if (static_cast<size_t>(k) > labels.size())
        throw std::invalid_argument("fold count exceeds dataset size");

    std::map<int, std::vector<int>> by_class;
    for (size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(static_cast<int>(i));

    std::vector<int> fold(labels.size(), 0);
    int start = 0;
    for (auto& [klass, idxs] : by_class) {
        Rng rng(mix_seed(seed, static_cast<uint64_t>(klass) + 0x5f0e1d2cULL));
        rng.shuffle(idxs);
        for (size_t j = 0; j < idxs.size(); ++j)
            fold[idxs[j]] = (start + static_cast<int>(j)) % k;
        start = (start + static_cast<int>(idxs.size())) % k;
    }
    return fold;
}

const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::MajorityClass: return "majority_class";
        case Algorithm::OneRule: return "one_rule";
        case Algorithm::NaiveBayes: return "naive_bayes";
        case Algorithm::KNearest: return "k_nearest";
        case Algorithm::DecisionTree: return "decision_tree";
    }
    return "?";
}

std::optional<Algorithm> algorithm_from_string(std::string_view s) {
    if (s == "majority_class") return Algorithm::MajorityClass;
    if (s == "one_rule") return Algorithm::OneRule;
    if (s == "naive_bayes") return Algorithm::NaiveBayes;
    if (s == "k_nearest") return Algorithm::KNearest;
    if (s == "decision_tree") return Algorithm::DecisionTree;
    return std::nullopt;
}

namespace {

int majority_class(const std::map<int, int>& counts) {
    int best = -1, best_count = -1;
    for (auto [klass, count] : counts) {
        if (count > best_count) {
            best = klass;
            best_count = count;
        }
    }
    return best;
}

MajorityParams fit_majority(const std::vector<const LabeledExample*>& train) {
    std::map<int, int> counts;
    for (const auto* e : train) ++counts[e->label];
    return {majority_class(counts)};
}

int one_rule_bin(double x, double lo, double hi) {
    if (hi <= lo) return 0;
    double clamped = std::clamp(x, lo, hi);
    const int b = static_cast<int>(std::floor((clamped - lo) / (hi - lo) * kOneRuleBins));
    return std::clamp(b, 0, kOneRuleBins - 1);
}

OneRuleParams fit_one_rule(const std::vector<const LabeledExample*>& train) {
    const size_t dim = train.front()->features.size();
    std::map<int, int> overall;
    for (const auto* e : train) ++overall[e->label];
    const int fallback = majority_class(overall);

    OneRuleParams best;
    int best_errors = -1;
    for (size_t f = 0; f < dim; ++f) {
        double lo = train.front()->features[f], hi = lo;
        for (const auto* e : train) {
            lo = std::min(lo, e->features[f]);
            hi = std::max(hi, e->features[f]);
        }
        std::vector<std::map<int, int>> bins(kOneRuleBins);
        for (const auto* e : train) ++bins[one_rule_bin(e->features[f], lo, hi)][e->label];
        int errors = 0;
        std::vector<int> bin_class(kOneRuleBins, fallback);
        for (int b = 0; b < kOneRuleBins; ++b) {
            if (bins[b].empty()) continue;
            bin_class[b] = majority_class(bins[b]);
            int total = 0;
            for (auto [klass, count] : bins[b]) total += count;
            errors += total - bins[b][bin_class[b]];
        }
        if (best_errors < 0 || errors < best_errors) {
            best_errors = errors;
            best.feature = static_cast<int>(f);
            best.lo = lo;
            best.hi = hi;
            best.bin_class = std::move(bin_class);
            best.fallback = fallback;
        }
    }
    return best;
}

BayesParams fit_bayes(const std::vector<const LabeledExample*>& train) {
    const size_t dim = train.front()->features.size();
    std::map<int, std::vector<const LabeledExample*>> by_class;
    for (const auto* e : train) by_class[e->label].push_back(e);

    BayesParams out;
    const double total = static_cast<double>(train.size());
    for (auto& [klass, rows] : by_class) {
        BayesClassParams c;
        c.klass = klass;
        c.log_prior = std::log(static_cast<double>(rows.size()) / total);
        c.mean.assign(dim, 0.0);
        c.var.assign(dim, 0.0);
        for (const auto* e : rows)
            for (size_t f = 0; f < dim; ++f) c.mean[f] += e->features[f];
        for (size_t f = 0; f < dim; ++f) c.mean[f] /= static_cast<double>(rows.size());
        for (const auto* e : rows)
            for (size_t f = 0; f < dim; ++f) {
                const double d = e->features[f] - c.mean[f];
                c.var[f] += d * d;
            }
        for (size_t f = 0; f < dim; ++f)
            c.var[f] = std::max(c.var[f] / static_cast<double>(rows.size()), kVarianceFloor);
        out.classes.push_back(std::move(c));
    }
    return out;
}

KnnParams fit_knn(const std::vector<const LabeledExample*>& train) {
    const size_t dim = train.front()->features.size();
    KnnParams out;
    out.k = std::min<int>(kKnnNeighbours, static_cast<int>(train.size()));
    out.mins.assign(dim, 0.0);
    out.maxs.assign(dim, 0.0);
    for (size_t f = 0; f < dim; ++f) {
        double lo = train.front()->features[f], hi = lo;
        for (const auto* e : train) {
            lo = std::min(lo, e->features[f]);
            hi = std::max(hi, e->features[f]);
        }
        out.mins[f] = lo;
        out.maxs[f] = hi;
    }
    auto scale = [&](double x, size_t f) {
        const double range = out.maxs[f] - out.mins[f];
        return range > 0.0 ? (x - out.mins[f]) / range : 0.0;
    };
    for (const auto* e : train) {
        std::vector<double> p(dim);
        for (size_t f = 0; f < dim; ++f) p[f] = scale(e->features[f], f);
        out.points.push_back(std::move(p));
        out.labels.push_back(e->label);
    }
    return out;
}

double entropy(const std::map<int, int>& counts, int total) {
    double h = 0.0;
    for (auto [klass, count] : counts) {
        if (count == 0) continue;
        const double p = static_cast<double>(count) / total;
        h -= p * std::log2(p);
    }
    return h;
}

int build_tree(TreeParams& tree, const std::vector<const LabeledExample*>& rows) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    std::map<int, int> counts;
    for (const auto* e : rows) ++counts[e->label];
    const int total = static_cast<int>(rows.size());
    const int majority = majority_class(counts);

    if (counts.size() <= 1 || total < 2 * kMinLeafSize) {
        tree.nodes[node_id].klass = majority;
        return node_id;
    }

    const double parent_entropy = entropy(counts, total);
    const size_t dim = rows.front()->features.size();
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<int> order(rows.size());
    for (size_t f = 0; f < dim; ++f) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double xa = rows[a]->features[f], xb = rows[b]->features[f];
            if (xa != xb) return xa < xb;
            return a < b;
        });
        std::map<int, int> left_counts;
        std::map<int, int> right_counts = counts;
        for (int i = 1; i < total; ++i) {
            const int moved = rows[order[i - 1]]->label;
            ++left_counts[moved];
            if (--right_counts[moved] == 0) right_counts.erase(moved);
            const double prev = rows[order[i - 1]]->features[f];
            const double next = rows[order[i]]->features[f];
            if (!(prev < next)) continue;
            if (i < kMinLeafSize || total - i < kMinLeafSize) continue;
            const double gain =
                parent_entropy -
                (static_cast<double>(i) / total) * entropy(left_counts, i) -
                (static_cast<double>(total - i) / total) * entropy(right_counts, total - i);
            if (gain > best_gain + 1e-12) {
                best_gain = gain;
                best_feature = static_cast<int>(f);
                best_threshold = 0.5 * (prev + next);
            }
        }
    }

    if (best_feature < 0) {
        tree.nodes[node_id].klass = majority;
        return node_id;
    }

    std::vector<const LabeledExample*> left, right;
    for (const auto* e : rows)
        (e->features[best_feature] <= best_threshold ? left : right).push_back(e);

    tree.nodes[node_id].leaf = false;
    tree.nodes[node_id].feature = best_feature;
    tree.nodes[node_id].threshold = best_threshold;
    tree.nodes[node_id].klass = majority;
    const int l = build_tree(tree, left);
    const int r = build_tree(tree, right);
    tree.nodes[node_id].left = l;
    tree.nodes[node_id].right = r;
    return node_id;
}

TreeParams fit_tree(const std::vector<const LabeledExample*>& train) {
    TreeParams out;
    build_tree(out, train);
    return out;
}

}  // namespace

int BaseModel::predict(const std::vector<double>& x) const {
    switch (algo) {
        case Algorithm::MajorityClass:
            return std::get<MajorityParams>(params).klass;
        case Algorithm::OneRule: {
            const auto& p = std::get<OneRuleParams>(params);
            if (p.feature >= static_cast<int>(x.size()))
                throw std::invalid_argument("feature vector dimension mismatch");
            return p.bin_class[one_rule_bin(x[p.feature], p.lo, p.hi)];
        }
        case Algorithm::NaiveBayes: {
            const auto& p = std::get<BayesParams>(params);
            int best = -1;
            double best_score = 0.0;
            for (const auto& c : p.classes) {
                if (c.mean.size() != x.size())
                    throw std::invalid_argument("feature vector dimension mismatch");
                double score = c.log_prior;
                for (size_t f = 0; f < x.size(); ++f) {
                    const double d = x[f] - c.mean[f];
                    score += -0.5 * std::log(2.0 * M_PI * c.var[f]) - d * d / (2.0 * c.var[f]);
                }
                if (best < 0 || score > best_score) {
                    best = c.klass;
                    best_score = score;
                }
            }
            return best;
        }
        case Algorithm::KNearest: {
            const auto& p = std::get<KnnParams>(params);
            if (p.mins.size() != x.size())
                throw std::invalid_argument("feature vector dimension mismatch");
            std::vector<double> q(x.size());
            for (size_t f = 0; f < x.size(); ++f) {
                const double range = p.maxs[f] - p.mins[f];
                q[f] = range > 0.0 ? std::clamp((x[f] - p.mins[f]) / range, 0.0, 1.0) : 0.0;
            }
            std::vector<std::pair<double, int>> dist;
            dist.reserve(p.points.size());
            for (size_t i = 0; i < p.points.size(); ++i) {
                double d2 = 0.0;
                for (size_t f = 0; f < q.size(); ++f) {
                    const double d = q[f] - p.points[i][f];
                    d2 += d * d;
                }
                dist.emplace_back(d2, static_cast<int>(i));
            }
            std::sort(dist.begin(), dist.end());
            std::map<int, int> votes;
            for (int i = 0; i < p.k; ++i) ++votes[p.labels[dist[i].second]];
            return majority_class(votes);
        }
        case Algorithm::DecisionTree: {
            const auto& p = std::get<TreeParams>(params);
            int node = 0;
            while (!p.nodes[node].leaf) {
                const TreeNode& n = p.nodes[node];
                if (n.feature >= static_cast<int>(x.size()))
                    throw std::invalid_argument("feature vector dimension mismatch");
                node = x[n.feature] <= n.threshold ? n.left : n.right;
            }
            return p.nodes[node].klass;
        }
    }
    return 0;
}

BaseModel fit(Algorithm algo, const std::vector<const LabeledExample*>& train) {
    if (train.empty()) throw std::invalid_argument("training set is empty");
    BaseModel m;
    m.algo = algo;
    switch (algo) {
        case Algorithm::MajorityClass: m.params = fit_majority(train); break;
        case Algorithm::OneRule: m.params = fit_one_rule(train); break;
        case Algorithm::NaiveBayes: m.params = fit_bayes(train); break;
        case Algorithm::KNearest: m.params = fit_knn(train); break;
        case Algorithm::DecisionTree: m.params = fit_tree(train); break;
    }
    return m;
}

namespace {

std::vector<BaseModel> train_level(const std::vector<LabeledExample>& examples, int k,
                                   uint64_t seed) {
    std::vector<int> labels;
    labels.reserve(examples.size());
    for (const auto& e : examples) labels.push_back(e.label);
    const std::vector<int> fold = stratified_kfold(labels, k, seed);

    std::vector<BaseModel> models;
    for (int a = 0; a < kAlgorithmCount; ++a) {
        for (int f = 0; f < k; ++f) {
            std::vector<const LabeledExample*> train_rows;
            for (size_t i = 0; i < examples.size(); ++i)
                if (fold[i] != f) train_rows.push_back(&examples[i]);
            BaseModel m = fit(static_cast<Algorithm>(a), train_rows);
            m.fold = f;
            models.push_back(std::move(m));
        }
    }
    return models;
}

}  // namespace

EnsembleModel train_ensemble(const Dataset& raw, const TrainOptions& options) {
    if (raw.examples.empty()) throw std::invalid_argument("training set is empty");
    const size_t dim = options.feature_set == FeatureSet::Full ? kFullFeatureCount
                                                               : kCheapFeatureCount;
    for (const auto& e : raw.examples) {
        if (e.features.size() != dim)
            throw std::invalid_argument("example '" + e.name +
                                        "' does not match the feature set dimension");
        if (e.label < 0 || e.label >= kVariantCount)
            throw std::invalid_argument("example '" + e.name + "' has an invalid label");
    }

    EnsembleModel model;
    model.feature_set = options.feature_set;
    model.folds = options.folds;
    model.seed = options.seed;
    model.cost_duplication = options.cost_duplication;
    model.default_variant_index = default_variant().index();

    const Dataset data = options.cost_duplication ? duplicate_by_cost(raw) : raw;

    std::vector<LabeledExample> level1 = data.examples;
    for (auto& e : level1) e.label = e.label == 0 ? 0 : 1;
    std::vector<LabeledExample> level2;
    for (const auto& e : data.examples)
        if (e.label != 0) level2.push_back(e);

    model.level1 = train_level(level1, options.folds, mix_seed(options.seed, 1));
    if (level2.size() >= static_cast<size_t>(options.folds)) {
        model.level2 = train_level(level2, options.folds, mix_seed(options.seed, 2));
    } else {
        model.level2_fallback = true;
    }
    return model;
}

int family_vote(const std::vector<int>& votes) {
    int naive = 0, gac = 0;
    for (int v : votes) (v == 0 ? naive : gac)++;
    return naive > gac ? 0 : 1;
}

int variant_vote(const std::vector<int>& votes, int default_variant_index) {
    std::map<int, int> counts;
    for (int v : votes) ++counts[v];
    int top = 0;
    for (auto [variant, count] : counts) top = std::max(top, count);
    if (counts.count(default_variant_index) && counts[default_variant_index] == top)
        return default_variant_index;
    for (auto [variant, count] : counts)
        if (count == top) return variant;
    return default_variant_index;
}

VariantId select_variant(const EnsembleModel& model, const std::vector<double>& features) {
    const size_t dim =
        model.feature_set == FeatureSet::Full ? kFullFeatureCount : kCheapFeatureCount;
    if (features.size() != dim)
        throw std::invalid_argument("feature vector does not match the model's feature set");

    std::vector<int> votes1;
    votes1.reserve(model.level1.size());
    for (const auto& m : model.level1) votes1.push_back(m.predict(features));
    if (family_vote(votes1) == 0) return VariantId::naive();

    if (model.level2_fallback || model.level2.empty())
        return VariantId::from_index(model.default_variant_index);
    std::vector<int> votes2;
    votes2.reserve(model.level2.size());
    for (const auto& m : model.level2) votes2.push_back(m.predict(features));
    return VariantId::from_index(variant_vote(votes2, model.default_variant_index));
}

namespace {

nlohmann::json model_to_json(const BaseModel& m) {
    nlohmann::json j;
    j["algorithm"] = to_string(m.algo);
    j["fold"] = m.fold;
    switch (m.algo) {
        case Algorithm::MajorityClass:
            j["class"] = std::get<MajorityParams>(m.params).klass;
            break;
        case Algorithm::OneRule: {
            const auto& p = std::get<OneRuleParams>(m.params);
            j["feature"] = p.feature;
            j["lo"] = p.lo;
            j["hi"] = p.hi;
            j["bin_class"] = p.bin_class;
            j["fallback"] = p.fallback;
            break;
        }
        case Algorithm::NaiveBayes: {
            const auto& p = std::get<BayesParams>(m.params);
            nlohmann::json classes = nlohmann::json::array();
            for (const auto& c : p.classes)
                classes.push_back({{"class", c.klass},
                                   {"log_prior", c.log_prior},
                                   {"mean", c.mean},
                                   {"var", c.var}});
            j["classes"] = std::move(classes);
            break;
        }
        case Algorithm::KNearest: {
            const auto& p = std::get<KnnParams>(m.params);
            j["k"] = p.k;
            j["mins"] = p.mins;
            j["maxs"] = p.maxs;
            j["points"] = p.points;
            j["labels"] = p.labels;
            break;
        }
        case Algorithm::DecisionTree: {
            const auto& p = std::get<TreeParams>(m.params);
            nlohmann::json nodes = nlohmann::json::array();
            for (const auto& n : p.nodes)
                nodes.push_back({{"leaf", n.leaf},
                                 {"class", n.klass},
                                 {"feature", n.feature},
                                 {"threshold", n.threshold},
                                 {"left", n.left},
                                 {"right", n.right}});
            j["nodes"] = std::move(nodes);
            break;
        }
    }
    return j;
}

BaseModel model_from_json(const nlohmann::json& j) {
    BaseModel m;
    auto algo = algorithm_from_string(j.at("algorithm").get<std::string>());
    if (!algo) throw InputError("unknown algorithm in model file");
    m.algo = *algo;
    m.fold = j.at("fold").get<int>();
    switch (m.algo) {
        case Algorithm::MajorityClass: {
            MajorityParams p;
            p.klass = j.at("class").get<int>();
            m.params = p;
            break;
        }
        case Algorithm::OneRule: {
            OneRuleParams p;
            p.feature = j.at("feature").get<int>();
            p.lo = j.at("lo").get<double>();
            p.hi = j.at("hi").get<double>();
            p.bin_class = j.at("bin_class").get<std::vector<int>>();
            p.fallback = j.at("fallback").get<int>();
            m.params = std::move(p);
            break;
        }
        case Algorithm::NaiveBayes: {
            BayesParams p;
            for (const auto& c : j.at("classes")) {
                BayesClassParams cc;
                cc.klass = c.at("class").get<int>();
                cc.log_prior = c.at("log_prior").get<double>();
                cc.mean = c.at("mean").get<std::vector<double>>();
                cc.var = c.at("var").get<std::vector<double>>();
                p.classes.push_back(std::move(cc));
            }
            m.params = std::move(p);
            break;
        }
        case Algorithm::KNearest: {
            KnnParams p;
            p.k = j.at("k").get<int>();
            p.mins = j.at("mins").get<std::vector<double>>();
            p.maxs = j.at("maxs").get<std::vector<double>>();
            p.points = j.at("points").get<std::vector<std::vector<double>>>();
            p.labels = j.at("labels").get<std::vector<int>>();
            m.params = std::move(p);
            break;
        }
        case Algorithm::DecisionTree: {
            TreeParams p;
            for (const auto& n : j.at("nodes")) {
                TreeNode t;
                t.leaf = n.at("leaf").get<bool>();
                t.klass = n.at("class").get<int>();
                t.feature = n.at("feature").get<int>();
                t.threshold = n.at("threshold").get<double>();
                t.left = n.at("left").get<int>();
                t.right = n.at("right").get<int>();
                p.nodes.push_back(t);
            }
            m.params = std::move(p);
            break;
        }
    }
    return m;
}

}  // namespace

nlohmann::json ensemble_to_json(const EnsembleModel& model) {
    nlohmann::json doc = make_document("ensemble");
    doc["meta"] = {{"feature_set", to_string(model.feature_set)},
                   {"folds", model.folds},
                   {"seed", model.seed},
                   {"cost_duplication", model.cost_duplication},
                   {"default_variant", VariantId::from_index(model.default_variant_index).str()},
                   {"level2_fallback", model.level2_fallback}};
    nlohmann::json l1 = nlohmann::json::array(), l2 = nlohmann::json::array();
    for (const auto& m : model.level1) l1.push_back(model_to_json(m));
    for (const auto& m : model.level2) l2.push_back(model_to_json(m));
    doc["level1"] = std::move(l1);
    doc["level2"] = std::move(l2);
    return doc;
}

EnsembleModel ensemble_from_json(const nlohmann::json& doc) {
    EnsembleModel model;
    const auto& meta = doc.at("meta");
    const std::string set = meta.at("feature_set").get<std::string>();
    if (set == "full")
        model.feature_set = FeatureSet::Full;
    else if (set == "cheap")
        model.feature_set = FeatureSet::Cheap;
    else
        throw InputError("unknown feature set in model file");
    model.folds = meta.at("folds").get<int>();
    model.seed = meta.at("seed").get<uint64_t>();
    model.cost_duplication = meta.at("cost_duplication").get<bool>();
    auto variant = VariantId::from_string(meta.at("default_variant").get<std::string>());
    if (!variant) throw InputError("unknown default variant in model file");
    model.default_variant_index = variant->index();
    model.level2_fallback = meta.at("level2_fallback").get<bool>();
    for (const auto& j : doc.at("level1")) model.level1.push_back(model_from_json(j));
    for (const auto& j : doc.at("level2")) model.level2.push_back(model_from_json(j));
    return model;
}

void save_ensemble(const EnsembleModel& model, const std::string& path) {
    write_file(path, ensemble_to_json(model).dump(2) + "\n");
}

EnsembleModel load_ensemble(const std::string& path) {
    return ensemble_from_json(load_document(path, "ensemble"));
}

}  // namespace propsel
