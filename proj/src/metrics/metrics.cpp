#include "specnet/metrics.hpp"

#include "util/text.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace specnet::metrics {

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * classes, 0)
{
    if (classes == 0) {
        throw Error("confusion matrix needs at least one class");
    }
}

ConfusionMatrix::ConfusionMatrix(std::size_t classes, std::vector<std::uint64_t> counts)
    : classes_(classes), counts_(std::move(counts))
{
    if (classes == 0 || counts_.size() != classes * classes) {
        throw Error("confusion matrix of " + std::to_string(classes) + " classes needs " +
                    std::to_string(classes * classes) + " counts, got " +
                    std::to_string(counts_.size()));
    }
}

std::uint64_t ConfusionMatrix::total() const noexcept
{
    std::uint64_t sum = 0;
    for (std::uint64_t c : counts_) {
        sum += c;
    }
    return sum;
}

std::uint64_t ConfusionMatrix::trace() const noexcept
{
    std::uint64_t sum = 0;
    for (std::size_t k = 0; k < classes_; ++k) {
        sum += at(k, k);
    }
    return sum;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const
{
    std::uint64_t sum = 0;
    for (std::size_t j = 0; j < classes_; ++j) {
        sum += at(truth, j);
    }
    return sum;
}

std::uint64_t ConfusionMatrix::column_sum(std::size_t predicted) const
{
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < classes_; ++i) {
        sum += at(i, predicted);
    }
    return sum;
}

ConfusionMatrix confusion(std::span<const std::size_t> truth,
                          std::span<const std::size_t> predicted, std::size_t classes)
{
    if (truth.size() != predicted.size()) {
        throw Error("confusion: " + std::to_string(truth.size()) + " true labels vs " +
                    std::to_string(predicted.size()) + " predictions");
    }
    ConfusionMatrix cm(classes);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= classes || predicted[i] >= classes) {
            throw Error("confusion: label out of range at index " + std::to_string(i) +
                        " (true " + std::to_string(truth[i]) + ", predicted " +
                        std::to_string(predicted[i]) + ", classes " + std::to_string(classes) +
                        ")");
        }
        cm.at(truth[i], predicted[i]) += 1;
    }
    return cm;
}

double overall_accuracy(const ConfusionMatrix& cm)
{
    const std::uint64_t total = cm.total();
    if (total == 0) {
        throw Error("overall accuracy of an empty confusion matrix is undefined");
    }
    return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

namespace {

__extension__ typedef unsigned __int128 uint128;

// Sum of recall fractions kept as an exact reduced fraction while it fits.
class RecallSum {
public:
    void add(std::uint64_t hits, std::uint64_t row)
    {
        approx_ += static_cast<double>(hits) / static_cast<double>(row);
        if (!exact_) {
            return;
        }
        const std::uint64_t g = std::gcd(hits, row);
        const uint128 n = hits / g;
        const uint128 d = row / g;
        // Guard the products below against overflow.
        if (den_ > (uint128{1} << 62) || d > (uint128{1} << 62)) {
            exact_ = false;
            return;
        }
        num_ = num_ * d + n * den_;
        den_ = den_ * d;
        const uint128 r = gcd128(num_, den_);
        num_ /= r;
        den_ /= r;
    }

    /// Correctly rounded (sum / count) whenever the exact fraction fits.
    double mean(std::size_t count) const
    {
        if (exact_ && den_ < (uint128{1} << 100) && count < (std::size_t{1} << 20)) {
            uint128 n = num_;
            uint128 d = den_ * count;
            const uint128 r = gcd128(n, d);
            n /= r;
            d /= r;
            constexpr uint128 limit = uint128{1} << 53;
            if (n <= limit && d <= limit) {
                return static_cast<double>(static_cast<std::uint64_t>(n)) /
                       static_cast<double>(static_cast<std::uint64_t>(d));
            }
        }
        return approx_ / static_cast<double>(count);
    }

private:
    static uint128 gcd128(uint128 a, uint128 b)
    {
        while (b != 0) {
            const uint128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    uint128 num_ = 0;
    uint128 den_ = 1;
    bool exact_ = true;
    double approx_ = 0.0;
};

} // namespace

AverageAccuracy average_accuracy_detail(const ConfusionMatrix& cm)
{
    AverageAccuracy result;
    RecallSum recall_sum;
    std::size_t present = 0;
    for (std::size_t k = 0; k < cm.classes(); ++k) {
        const std::uint64_t row = cm.row_sum(k);
        if (row == 0) {
            result.excluded_classes.push_back(k);
            continue;
        }
        recall_sum.add(cm.at(k, k), row);
        ++present;
    }
    if (present == 0) {
        throw Error("average accuracy of an empty confusion matrix is undefined");
    }
    result.value = recall_sum.mean(present);
    return result;
}

double average_accuracy(const ConfusionMatrix& cm)
{
    AverageAccuracy aa = average_accuracy_detail(cm);
    if (!aa.excluded_classes.empty()) {
        std::cerr << "warning: average accuracy excludes class(es) without true instances:";
        for (std::size_t k : aa.excluded_classes) {
            std::cerr << ' ' << k;
        }
        std::cerr << '\n';
    }
    return aa.value;
}

namespace {

struct KappaTerms {
    std::uint64_t total;
    std::uint64_t trace;
    // sum_k row_k * col_k
    long double marginal_products;
    bool exact;
    std::uint64_t marginal_products_exact;
};

KappaTerms kappa_terms(const ConfusionMatrix& cm)
{
    KappaTerms t{cm.total(), cm.trace(), 0.0L, true, 0};
    if (t.total == 0) {
        throw Error("kappa of an empty confusion matrix is undefined");
    }
    // N^2 < 2^52 keeps every integer term exactly representable as a double.
    constexpr std::uint64_t limit = std::uint64_t{1} << 26;
    t.exact = t.total < limit;
    for (std::size_t k = 0; k < cm.classes(); ++k) {
        const std::uint64_t r = cm.row_sum(k);
        const std::uint64_t c = cm.column_sum(k);
        t.marginal_products += static_cast<long double>(r) * static_cast<long double>(c);
        if (t.exact) {
            t.marginal_products_exact += r * c;
        }
    }
    return t;
}

} // namespace

double chance_agreement(const ConfusionMatrix& cm)
{
    const KappaTerms t = kappa_terms(cm);
    if (t.exact) {
        return static_cast<double>(t.marginal_products_exact) /
               static_cast<double>(t.total * t.total);
    }
    const auto n = static_cast<long double>(t.total);
    return static_cast<double>(t.marginal_products / (n * n));
}

double kappa(const ConfusionMatrix& cm)
{
    const KappaTerms t = kappa_terms(cm);
    if (t.exact) {
        const std::uint64_t n2 = t.total * t.total;
        if (t.marginal_products_exact == n2) {
            throw Error("kappa undefined: chance agreement is 1 (all mass in one class)");
        }
        const auto numerator = static_cast<std::int64_t>(t.total * t.trace) -
                               static_cast<std::int64_t>(t.marginal_products_exact);
        const std::uint64_t denominator = n2 - t.marginal_products_exact;
        return static_cast<double>(numerator) / static_cast<double>(denominator);
    }
    const auto n = static_cast<long double>(t.total);
    const long double denominator = n * n - t.marginal_products;
    if (denominator == 0.0L) {
        throw Error("kappa undefined: chance agreement is 1 (all mass in one class)");
    }
    return static_cast<double>((n * static_cast<long double>(t.trace) - t.marginal_products) /
                               denominator);
}

std::vector<std::vector<double>> normalize_rows(const ConfusionMatrix& cm)
{
    std::vector<std::vector<double>> rows(cm.classes(), std::vector<double>(cm.classes(), 0.0));
    for (std::size_t i = 0; i < cm.classes(); ++i) {
        const std::uint64_t sum = cm.row_sum(i);
        if (sum == 0) {
            continue;
        }
        for (std::size_t j = 0; j < cm.classes(); ++j) {
            rows[i][j] = static_cast<double>(cm.at(i, j)) / static_cast<double>(sum);
        }
    }
    return rows;
}

Summary summarize(const ConfusionMatrix& cm)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    Summary s{nan, nan, nan};
    if (cm.total() == 0) {
        return s;
    }
    s.overall_accuracy = overall_accuracy(cm);
    s.average_accuracy = average_accuracy_detail(cm).value;
    try {
        s.kappa = kappa(cm);
    } catch (const Error&) {
        s.kappa = nan;
    }
    return s;
}

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows)
{
    out << "model,OA,AA,kappa\n";
    for (const ReportRow& row : rows) {
        out << row.model << ',' << text::format_double(row.summary.overall_accuracy) << ','
            << text::format_double(row.summary.average_accuracy) << ','
            << text::format_double(row.summary.kappa) << '\n';
    }
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm,
                         std::span<const std::string> class_names)
{
    if (class_names.size() != cm.classes()) {
        throw Error("confusion CSV: " + std::to_string(class_names.size()) +
                    " class names for " + std::to_string(cm.classes()) + " classes");
    }
    const auto rows = normalize_rows(cm);
    out << "true\\predicted";
    for (const std::string& name : class_names) {
        out << ',' << name;
    }
    out << '\n';
    for (std::size_t i = 0; i < cm.classes(); ++i) {
        out << class_names[i];
        for (double v : rows[i]) {
            out << ',' << text::format_double(v);
        }
        out << '\n';
    }
}

} // namespace specnet::metrics
