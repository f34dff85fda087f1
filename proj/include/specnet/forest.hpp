#pragma once

#include "specnet/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace specnet::forest {

/// Row-major feature table with class labels.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t classes = 0;
    std::vector<double> values;
    std::vector<std::size_t> labels;

    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }

    /// Spectra as rows; unlabeled samples are rejected.
    static FeatureMatrix from_samples(std::span<const Sample> samples,
                                      std::size_t classes = soil_class_count);
};

struct ForestConfig {
    /// Desk-scale default. `full_scale_estimators` gives the 10000-tree forest.
    std::size_t n_estimators = 200;
    /// Features tried per split; 0 selects floor(sqrt(feature count)).
    std::size_t max_features = 0;
    std::size_t min_samples_leaf = 1;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t full_scale_estimators = 10000;

struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    /// Class counts of the training rows that reached a leaf.
    std::vector<std::uint32_t> histogram;

    bool is_leaf() const noexcept { return feature < 0; }

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// CART tree; rows with value <= threshold go left. nodes[0] is the root.
struct DecisionTree {
    std::vector<TreeNode> nodes;

    const TreeNode& leaf(std::span<const double> features) const;
    /// Majority class of the reached leaf, ties to the lowest index.
    std::size_t predict(std::span<const double> features) const;
    std::size_t depth() const;

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct TreeOptions {
    /// 0 = all features.
    std::size_t max_features = 0;
    std::size_t min_samples_leaf = 1;
};

/// Grows an unpruned tree on `rows` (repeats allowed) by greedy Gini
/// decrease over a fresh random feature subset at every node. A node
/// becomes a leaf when it is pure, too small to give both children
/// `min_samples_leaf` rows, or no tried split lowers its impurity.
/// Thresholds are midpoints between adjacent distinct sorted values.
DecisionTree fit_tree(const FeatureMatrix& data, std::span<const std::size_t> rows,
                      const TreeOptions& options, std::uint64_t seed);

double gini(std::span<const std::uint32_t> counts);

/// Bootstrap rows drawn for tree `tree` of a forest seeded with `seed`.
std::vector<std::size_t> tree_bootstrap(std::uint64_t seed, std::size_t tree, std::size_t rows);

class Forest {
public:
    Forest() = default;
    Forest(std::vector<DecisionTree> trees, std::size_t features, std::size_t classes);

    std::span<const DecisionTree> trees() const noexcept { return trees_; }
    std::size_t features() const noexcept { return features_; }
    std::size_t classes() const noexcept { return classes_; }

    /// Per-class vote counts; they sum to the number of trees.
    std::vector<std::uint32_t> votes(std::span<const double> features) const;
    /// Unweighted majority vote, ties to the lowest class index.
    std::size_t predict(std::span<const double> features) const;
    std::vector<std::size_t> predict(const FeatureMatrix& data) const;
    std::vector<std::size_t> predict(std::span<const Sample> samples) const;

    std::string run_id;

    friend bool operator==(const Forest&, const Forest&) = default;

private:
    std::vector<DecisionTree> trees_;
    std::size_t features_ = 0;
    std::size_t classes_ = 0;
};

/// Each tree sees its own bootstrap resample and split-feature stream,
/// both derived from `config.seed` and the tree index.
Forest fit_forest(const FeatureMatrix& data, const ForestConfig& config);

// Forest checkpoint: same magic/version/kind header and trailing checksum
// as network checkpoints (kind 2), then run_id, u64 features, u64 classes,
// u64 tree count and per tree a u64 node count followed by, per node,
// i32 feature, f64 threshold, i32 left, i32 right, u32 histogram[classes].
std::string serialize_forest(const Forest& forest);
Forest deserialize_forest(std::string_view bytes, const std::string& source = "<memory>");
void save_forest(const Forest& forest, const std::filesystem::path& path);
Forest load_forest(const std::filesystem::path& path);

} // namespace specnet::forest
