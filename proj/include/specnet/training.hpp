#pragma once

#include "specnet/adam.hpp"
#include "specnet/dataset.hpp"
#include "specnet/metrics.hpp"
#include "specnet/network.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace specnet {

struct TrainConfig {
    std::string architecture;
    std::size_t epochs = 1;
    std::size_t batch_size = 1;
    std::uint64_t seed = 0;
    AdamConfig adam;
    /// Per-band z-scores fitted on the training subset.
    bool normalize = false;

    /// Reference epochs and batch size of `architecture`.
    static TrainConfig defaults_for(std::string_view architecture, std::uint64_t seed = 0);
    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;
    /// Mean cross-entropy over the epoch's training samples.
    double train_loss = 0.0;
    /// Accuracy of the pre-update predictions seen during the epoch.
    double train_accuracy = 0.0;
    metrics::Summary validation{};
};

using TrainHistory = std::vector<EpochRecord>;

struct TrainResult {
    Network network;
    TrainHistory history;
};

/// Raised when the loss becomes non-finite.
class TrainingError : public Error {
public:
    using Error::Error;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch training with softmax cross-entropy and Adam.
///
/// Each epoch shuffles the training set with a seed derived from
/// (config.seed, epoch), walks it in batches of `batch_size` (the last one
/// may be shorter), averages the batch gradient and takes one Adam step.
/// Runs exactly `config.epochs` epochs and returns the final weights.
/// The validation set is only measured, never used for updates.
TrainResult train(const NetworkSpec& spec, std::span<const Sample> train_set,
                  std::span<const Sample> validation_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// One Adam step on the mean gradient of the given batch; returns the
/// batch's mean loss before the step.
double train_step(Network& network, AdamState& state, std::span<const Tensor> inputs,
                  std::span<const std::size_t> labels);

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

struct Prediction {
    /// One probability vector per spectrum.
    std::vector<Tensor> probabilities;
    std::vector<std::size_t> labels;
};

Prediction predict(const Network& network, std::span<const Tensor> spectra);
Prediction predict(const Network& network, std::span<const Sample> samples);

metrics::ConfusionMatrix evaluate(const Network& network, std::span<const Sample> samples);

/// `epoch,train_loss,train_OA,val_OA,val_AA,val_kappa`.
void write_history_csv(std::ostream& out, const TrainHistory& history);

} // namespace specnet
