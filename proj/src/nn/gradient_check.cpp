#include "specnet/gradient_check.hpp"

#include "specnet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace specnet {

GradientCheckReport gradient_check(const Network& network, const Tensor& input, std::size_t label,
                                   const GradientCheckOptions& options)
{
    if (!(options.epsilon >= 1e-7 && options.epsilon <= 1e-3)) {
        throw Error("gradient_check: epsilon " + std::to_string(options.epsilon) +
                    " outside [1e-7, 1e-3]");
    }
    for (const Tensor& p : network.parameters()) {
        if (!p.all_finite()) {
            throw Error("gradient_check: network parameters are not finite");
        }
    }

    std::vector<Tensor> analytic = network.zero_gradients();
    ForwardCache base_cache;
    const Tensor logits = network.forward(input, base_cache);
    network.backward(softmax_crossentropy(logits, label).grad_logits, base_cache, analytic);
    const std::uint64_t base_signature = base_cache.branch_signature(network.spec());

    Network probe = network;
    Rng rng(options.seed);
    GradientCheckReport report;

    auto evaluate = [&](double& slot, double value, bool& same_branch) {
        slot = value;
        ForwardCache cache;
        const double loss = softmax_crossentropy(probe.forward(input, cache), label).loss;
        same_branch = same_branch && cache.branch_signature(probe.spec()) == base_signature;
        return loss;
    };

    for (std::size_t t = 0; t < probe.parameters().size(); ++t) {
        Tensor& param = probe.parameters()[t];
        std::vector<std::size_t> entries(param.size());
        std::iota(entries.begin(), entries.end(), std::size_t{0});
        if (options.samples_per_tensor > 0 && options.samples_per_tensor < entries.size()) {
            rng.shuffle(std::span<std::size_t>(entries));
            entries.resize(options.samples_per_tensor);
            std::sort(entries.begin(), entries.end());
        }

        for (std::size_t idx : entries) {
            double& slot = param[idx];
            const double original = slot;
            bool same_branch = true;
            const double plus = evaluate(slot, original + options.epsilon, same_branch);
            const double minus = evaluate(slot, original - options.epsilon, same_branch);
            slot = original;
            if (!same_branch) {
                ++report.skipped;
                continue;
            }

            const double numeric = (plus - minus) / (2.0 * options.epsilon);
            const double exact = analytic[t][idx];
            const double denom =
                std::max({std::abs(exact), std::abs(numeric), options.denominator_floor});
            const double error = std::abs(exact - numeric) / denom;
            ++report.checked;
            if (error > report.max_relative_error || report.checked == 1) {
                report.max_relative_error = std::max(error, report.max_relative_error);
                report.worst_tensor = t;
                report.worst_index = idx;
                report.worst_analytic = exact;
                report.worst_numeric = numeric;
            }
        }
    }
    return report;
}

} // namespace specnet
