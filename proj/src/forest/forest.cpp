#include "specnet/forest.hpp"

#include "specnet/checkpoint.hpp"
#include "specnet/rng.hpp"
#include "util/binary_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace specnet::forest {

FeatureMatrix FeatureMatrix::from_samples(std::span<const Sample> samples, std::size_t classes)
{
    FeatureMatrix m;
    m.rows = samples.size();
    m.cols = samples.empty() ? 0 : samples.front().spectrum.size();
    m.classes = classes;
    m.values.reserve(m.rows * m.cols);
    m.labels = label_indices(samples);
    for (const Sample& s : samples) {
        if (s.spectrum.size() != m.cols) {
            throw ShapeError("sample '" + s.id + "' has " + std::to_string(s.spectrum.size()) +
                             " features, expected " + std::to_string(m.cols));
        }
        m.values.insert(m.values.end(), s.spectrum.values().begin(), s.spectrum.values().end());
    }
    return m;
}

double gini(std::span<const std::uint32_t> counts)
{
    double total = 0.0;
    for (std::uint32_t c : counts) {
        total += c;
    }
    if (total == 0.0) {
        return 0.0;
    }
    double sum_sq = 0.0;
    for (std::uint32_t c : counts) {
        const double p = c / total;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

const TreeNode& DecisionTree::leaf(std::span<const double> features) const
{
    if (nodes.empty()) {
        throw Error("decision tree has no nodes");
    }
    std::size_t index = 0;
    while (!nodes[index].is_leaf()) {
        const TreeNode& n = nodes[index];
        index = static_cast<std::size_t>(
            features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[index];
}

std::size_t DecisionTree::predict(std::span<const double> features) const
{
    const auto& hist = leaf(features).histogram;
    return static_cast<std::size_t>(std::max_element(hist.begin(), hist.end()) - hist.begin());
}

std::size_t DecisionTree::depth() const
{
    std::size_t deepest = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [index, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        const TreeNode& n = nodes[index];
        if (!n.is_leaf()) {
            stack.emplace_back(static_cast<std::size_t>(n.left), d + 1);
            stack.emplace_back(static_cast<std::size_t>(n.right), d + 1);
        }
    }
    return deepest;
}

namespace {

constexpr double min_impurity_decrease = 1e-12;

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity = 0.0;
    bool found = false;
};

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& data, const TreeOptions& options, std::uint64_t seed)
        : data_(data), options_(options), rng_(seed), features_(data.cols)
    {
        std::iota(features_.begin(), features_.end(), std::size_t{0});
        tried_ = options.max_features == 0 ? data.cols
                                           : std::min(options.max_features, data.cols);
        min_leaf_ = std::max<std::size_t>(1, options.min_samples_leaf);
    }

    DecisionTree build(std::vector<std::size_t> rows)
    {
        DecisionTree tree;
        tree.nodes.emplace_back();
        std::vector<std::pair<std::size_t, std::vector<std::size_t>>> pending;
        pending.emplace_back(0, std::move(rows));
        while (!pending.empty()) {
            auto [node, members] = std::move(pending.back());
            pending.pop_back();

            const std::vector<std::uint32_t> counts = histogram(members);
            const double impurity = gini(counts);
            Split split;
            if (impurity > 0.0 && members.size() >= 2 * min_leaf_) {
                split = best_split(members);
            }
            if (!split.found || impurity - split.impurity <= min_impurity_decrease) {
                tree.nodes[node].histogram = counts;
                continue;
            }

            std::vector<std::size_t> left;
            std::vector<std::size_t> right;
            for (std::size_t r : members) {
                (data_.row(r)[split.feature] <= split.threshold ? left : right).push_back(r);
            }
            const auto left_index = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            TreeNode& n = tree.nodes[node];
            n.feature = static_cast<std::int32_t>(split.feature);
            n.threshold = split.threshold;
            n.left = left_index;
            n.right = left_index + 1;
            pending.emplace_back(static_cast<std::size_t>(left_index + 1), std::move(right));
            pending.emplace_back(static_cast<std::size_t>(left_index), std::move(left));
        }
        return tree;
    }

private:
    std::vector<std::uint32_t> histogram(const std::vector<std::size_t>& members) const
    {
        std::vector<std::uint32_t> counts(data_.classes, 0);
        for (std::size_t r : members) {
            counts[data_.labels[r]] += 1;
        }
        return counts;
    }

    Split best_split(const std::vector<std::size_t>& members)
    {
        // Partial Fisher-Yates draws `tried_` distinct features.
        for (std::size_t i = 0; i < tried_; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng_.below(features_.size() - i));
            std::swap(features_[i], features_[j]);
        }

        Split best;
        const auto n = static_cast<double>(members.size());
        std::vector<std::pair<double, std::size_t>> column(members.size());
        std::vector<std::uint32_t> left(data_.classes);
        std::vector<std::uint32_t> right(data_.classes);
        const std::vector<std::uint32_t> total = histogram(members);

        for (std::size_t f = 0; f < tried_; ++f) {
            const std::size_t feature = features_[f];
            for (std::size_t i = 0; i < members.size(); ++i) {
                column[i] = {data_.row(members[i])[feature], data_.labels[members[i]]};
            }
            std::sort(column.begin(), column.end());
            std::fill(left.begin(), left.end(), 0);
            right = total;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                left[column[i].second] += 1;
                right[column[i].second] -= 1;
                const std::size_t n_left = i + 1;
                const std::size_t n_right = column.size() - n_left;
                if (column[i].first == column[i + 1].first || n_left < min_leaf_ ||
                    n_right < min_leaf_) {
                    continue;
                }
                const double impurity = (static_cast<double>(n_left) * gini(left) +
                                         static_cast<double>(n_right) * gini(right)) /
                                        n;
                if (!best.found || impurity < best.impurity) {
                    const double lo = column[i].first;
                    const double hi = column[i + 1].first;
                    double threshold = lo + (hi - lo) / 2.0;
                    if (!(threshold >= lo && threshold < hi)) {
                        threshold = lo;
                    }
                    best = {feature, threshold, impurity, true};
                }
            }
        }
        return best;
    }

    const FeatureMatrix& data_;
    TreeOptions options_;
    Rng rng_;
    std::vector<std::size_t> features_;
    std::size_t tried_ = 0;
    std::size_t min_leaf_ = 1;
};

std::size_t argmax_votes(std::span<const std::uint32_t> votes)
{
    return static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

} // namespace

DecisionTree fit_tree(const FeatureMatrix& data, std::span<const std::size_t> rows,
                      const TreeOptions& options, std::uint64_t seed)
{
    if (rows.empty()) {
        throw Error("fit_tree needs at least one sample");
    }
    if (data.classes == 0 || data.cols == 0) {
        throw Error("fit_tree needs at least one class and one feature");
    }
    for (std::size_t r : rows) {
        if (r >= data.rows) {
            throw Error("fit_tree: row " + std::to_string(r) + " out of range");
        }
        if (data.labels[r] >= data.classes) {
            throw Error("fit_tree: label " + std::to_string(data.labels[r]) + " out of range");
        }
    }
    TreeBuilder builder(data, options, seed);
    return builder.build(std::vector<std::size_t>(rows.begin(), rows.end()));
}

std::vector<std::size_t> tree_bootstrap(std::uint64_t seed, std::size_t tree, std::size_t rows)
{
    Rng rng(derive_seed(seed, 2 * tree));
    std::vector<std::size_t> drawn(rows);
    for (std::size_t& r : drawn) {
        r = static_cast<std::size_t>(rng.below(rows));
    }
    return drawn;
}

Forest::Forest(std::vector<DecisionTree> trees, std::size_t features, std::size_t classes)
    : trees_(std::move(trees)), features_(features), classes_(classes)
{
}

std::vector<std::uint32_t> Forest::votes(std::span<const double> features) const
{
    if (features.size() != features_) {
        throw ShapeError("forest expects " + std::to_string(features_) + " features, got " +
                         std::to_string(features.size()));
    }
    std::vector<std::uint32_t> counts(classes_, 0);
    for (const DecisionTree& tree : trees_) {
        counts[tree.predict(features)] += 1;
    }
    return counts;
}

std::size_t Forest::predict(std::span<const double> features) const
{
    return argmax_votes(votes(features));
}

std::vector<std::size_t> Forest::predict(const FeatureMatrix& data) const
{
    std::vector<std::size_t> out(data.rows);
    for (std::size_t i = 0; i < data.rows; ++i) {
        out[i] = predict(data.row(i));
    }
    return out;
}

std::vector<std::size_t> Forest::predict(std::span<const Sample> samples) const
{
    std::vector<std::size_t> out;
    out.reserve(samples.size());
    for (const Sample& s : samples) {
        out.push_back(predict(s.spectrum.values()));
    }
    return out;
}

Forest fit_forest(const FeatureMatrix& data, const ForestConfig& config)
{
    if (config.n_estimators < 1) {
        throw Error("random forest needs at least one estimator");
    }
    std::vector<bool> present(data.classes, false);
    std::size_t distinct = 0;
    for (std::size_t label : data.labels) {
        if (label >= data.classes) {
            throw Error("random forest: label " + std::to_string(label) + " out of range");
        }
        if (!present[label]) {
            present[label] = true;
            ++distinct;
        }
    }
    if (distinct < 2) {
        throw Error("random forest needs at least two classes in the training data");
    }

    TreeOptions options;
    options.max_features =
        config.max_features != 0
            ? config.max_features
            : std::max<std::size_t>(1, static_cast<std::size_t>(
                                           std::floor(std::sqrt(static_cast<double>(data.cols)))));
    options.min_samples_leaf = config.min_samples_leaf;

    std::vector<DecisionTree> trees;
    trees.reserve(config.n_estimators);
    for (std::size_t t = 0; t < config.n_estimators; ++t) {
        const std::vector<std::size_t> rows = tree_bootstrap(config.seed, t, data.rows);
        trees.push_back(fit_tree(data, rows, options, derive_seed(config.seed, 2 * t + 1)));
    }
    return Forest(std::move(trees), data.cols, data.classes);
}

std::string serialize_forest(const Forest& forest)
{
    binary::Writer w;
    binary::write_header(w, CheckpointKind::forest);
    w.str(forest.run_id);
    w.u64(forest.features());
    w.u64(forest.classes());
    w.u64(forest.trees().size());
    for (const DecisionTree& tree : forest.trees()) {
        w.u64(tree.nodes.size());
        for (const TreeNode& n : tree.nodes) {
            w.u32(static_cast<std::uint32_t>(n.feature));
            w.f64(n.threshold);
            w.u32(static_cast<std::uint32_t>(n.left));
            w.u32(static_cast<std::uint32_t>(n.right));
            for (std::size_t k = 0; k < forest.classes(); ++k) {
                w.u32(n.histogram.empty() ? 0 : n.histogram[k]);
            }
        }
    }
    return w.finish();
}

Forest deserialize_forest(std::string_view bytes, const std::string& source)
{
    binary::Reader r(bytes, source);
    if (binary::read_header(r) != CheckpointKind::forest) {
        r.fail("checkpoint holds a network, not a random forest");
    }
    std::string run_id = r.str();
    const std::uint64_t features = r.u64();
    const std::uint64_t classes = r.u64();
    const std::uint64_t tree_count = r.u64();
    if (classes == 0 || features == 0) {
        r.fail("forest has no classes or features");
    }
    std::vector<DecisionTree> trees(tree_count);
    for (DecisionTree& tree : trees) {
        const std::uint64_t node_count = r.u64();
        if (node_count == 0) {
            r.fail("tree without nodes");
        }
        tree.nodes.resize(node_count);
        for (std::size_t i = 0; i < node_count; ++i) {
            TreeNode& n = tree.nodes[i];
            n.feature = static_cast<std::int32_t>(r.u32());
            n.threshold = r.f64();
            n.left = static_cast<std::int32_t>(r.u32());
            n.right = static_cast<std::int32_t>(r.u32());
            std::vector<std::uint32_t> hist(classes);
            for (std::uint32_t& c : hist) {
                c = r.u32();
            }
            if (n.is_leaf()) {
                n.histogram = std::move(hist);
                if (std::accumulate(n.histogram.begin(), n.histogram.end(), std::uint64_t{0}) ==
                    0) {
                    r.fail("leaf with an empty histogram");
                }
                continue;
            }
            const auto in_range = [&](std::int32_t child) {
                return child > static_cast<std::int32_t>(i) &&
                       static_cast<std::uint64_t>(child) < node_count;
            };
            if (static_cast<std::uint64_t>(n.feature) >= features || !in_range(n.left) ||
                !in_range(n.right)) {
                r.fail("malformed internal node " + std::to_string(i));
            }
        }
    }
    r.expect_end();
    Forest forest(std::move(trees), features, classes);
    forest.run_id = std::move(run_id);
    return forest;
}

void save_forest(const Forest& forest, const std::filesystem::path& path)
{
    binary::write_file(path, serialize_forest(forest));
}

Forest load_forest(const std::filesystem::path& path)
{
    return deserialize_forest(binary::read_file(path), path.string());
}

} // namespace specnet::forest
