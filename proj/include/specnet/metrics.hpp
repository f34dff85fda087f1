#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "specnet/tensor.hpp"

namespace specnet::metrics {

/// K x K counts; rows are true classes, columns predicted classes.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t classes);
    ConfusionMatrix(std::size_t classes, std::vector<std::uint64_t> counts);

    std::size_t classes() const noexcept { return classes_; }
    std::uint64_t at(std::size_t truth, std::size_t predicted) const
    {
        return counts_[truth * classes_ + predicted];
    }
    std::uint64_t& at(std::size_t truth, std::size_t predicted)
    {
        return counts_[truth * classes_ + predicted];
    }
    std::span<const std::uint64_t> counts() const noexcept { return counts_; }

    std::uint64_t total() const noexcept;
    std::uint64_t trace() const noexcept;
    std::uint64_t row_sum(std::size_t truth) const;
    std::uint64_t column_sum(std::size_t predicted) const;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::size_t classes_;
    std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion(std::span<const std::size_t> truth,
                          std::span<const std::size_t> predicted, std::size_t classes);

/// trace / total.
double overall_accuracy(const ConfusionMatrix& cm);

struct AverageAccuracy {
    double value = 0.0;
    /// Classes without true instances, left out of the mean.
    std::vector<std::size_t> excluded_classes;
};

/// Mean per-class recall over classes that have true instances.
AverageAccuracy average_accuracy_detail(const ConfusionMatrix& cm);

/// As above; writes a warning to stderr when a class is excluded.
double average_accuracy(const ConfusionMatrix& cm);

/// Chance agreement sum_k row_k * col_k / total^2.
double chance_agreement(const ConfusionMatrix& cm);

/// Cohen's kappa, (OA - theta) / (1 - theta). Evaluated as the single
/// ratio (N * trace - S) / (N^2 - S), S = sum_k row_k * col_k, so the
/// result is the correctly rounded value of the exact rational for
/// fewer than 2^26 samples.
double kappa(const ConfusionMatrix& cm);

/// Rows divided by their sums; all-zero rows stay zero.
std::vector<std::vector<double>> normalize_rows(const ConfusionMatrix& cm);

struct Summary {
    double overall_accuracy;
    double average_accuracy;
    double kappa;
};

/// OA/AA/kappa, with NaN for any metric that is undefined on `cm`.
Summary summarize(const ConfusionMatrix& cm);

struct ReportRow {
    std::string model;
    Summary summary;
};

/// `model,OA,AA,kappa`; shortest round-trip decimals, `nan` when undefined.
void write_report_csv(std::ostream& out, std::span<const ReportRow> rows);

/// `true\predicted` header followed by one normalized row per class.
void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm,
                         std::span<const std::string> class_names);

} // namespace specnet::metrics
