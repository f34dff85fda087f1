#include "specnet/training.hpp"

#include "specnet/models.hpp"
#include "specnet/rng.hpp"
#include "util/text.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

namespace specnet {

namespace {

// Streams of derive_seed(config.seed, .)
constexpr std::uint64_t init_stream = 1;
constexpr std::uint64_t shuffle_stream = 1000;

void check_samples(const NetworkSpec& spec, std::span<const Sample> samples, const char* what)
{
    const std::size_t expected = spec.input_channels * spec.input_length;
    for (const Sample& s : samples) {
        if (!s.label) {
            throw Error(std::string(what) + " sample '" + s.id + "' has no label");
        }
        if (s.spectrum.size() != expected) {
            throw ShapeError(std::string(what) + " sample '" + s.id + "' has " +
                             std::to_string(s.spectrum.size()) + " bands, network '" +
                             spec.name + "' expects " + std::to_string(expected));
        }
    }
}

} // namespace

TrainConfig TrainConfig::defaults_for(std::string_view architecture, std::uint64_t seed)
{
    const models::TrainingDefaults d = models::training_defaults(architecture);
    TrainConfig config;
    config.architecture = std::string(architecture);
    config.epochs = d.epochs;
    config.batch_size = d.batch_size;
    config.seed = seed;
    return config;
}

void TrainConfig::validate() const
{
    if (epochs < 1) {
        throw Error("training config: epochs must be at least 1");
    }
    if (batch_size < 1) {
        throw Error("training config: batch size must be at least 1");
    }
    if (!(adam.learning_rate > 0.0) || !(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
        !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) || !(adam.epsilon > 0.0)) {
        throw Error("training config: invalid Adam hyperparameters");
    }
}

double train_step(Network& network, AdamState& state, std::span<const Tensor> inputs,
                  std::span<const std::size_t> labels)
{
    if (inputs.size() != labels.size() || inputs.empty()) {
        throw Error("train_step: batch needs matching, non-empty inputs and labels");
    }
    std::vector<Tensor> grads = network.zero_gradients();
    double loss = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        loss += network.accumulate_gradients(inputs[i], labels[i], grads);
    }
    const double scale = 1.0 / static_cast<double>(inputs.size());
    for (Tensor& g : grads) {
        for (double& v : g.values()) {
            v *= scale;
        }
    }
    adam_step(network.parameters(), grads, state);
    return loss * scale;
}

TrainResult train(const NetworkSpec& spec, std::span<const Sample> train_set,
                  std::span<const Sample> validation_set, const TrainConfig& config,
                  const EpochCallback& on_epoch)
{
    config.validate();
    if (train_set.empty()) {
        throw Error("training set is empty");
    }
    check_samples(spec, train_set, "training");
    check_samples(spec, validation_set, "validation");

    TrainResult result{Network(spec), {}};
    Network& network = result.network;
    network.initialize(derive_seed(config.seed, init_stream));
    if (config.normalize) {
        network.scaling = fit_standardization(train_set);
    }
    AdamState state(network.parameters(), config.adam);

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        Rng rng(derive_seed(config.seed, shuffle_stream + epoch));
        rng.shuffle(std::span<std::size_t>(order));

        double loss_sum = 0.0;
        std::size_t correct = 0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            std::vector<Tensor> grads = network.zero_gradients();
            double batch_loss = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const Sample& s = train_set[order[k]];
                const std::size_t label = class_index(*s.label);
                ForwardCache cache;
                const Tensor logits = network.forward(s.spectrum, cache);
                const SoftmaxCrossEntropy ce = softmax_crossentropy(logits, label);
                network.backward(ce.grad_logits, cache, grads);
                batch_loss += ce.loss;
                if (argmax(logits.values()) == label) {
                    ++correct;
                }
            }
            if (!std::isfinite(batch_loss)) {
                throw TrainingError("non-finite loss in epoch " + std::to_string(epoch) +
                                    ", batch " + std::to_string(batch_index));
            }
            const double scale = 1.0 / static_cast<double>(end - start);
            for (Tensor& g : grads) {
                for (double& v : g.values()) {
                    v *= scale;
                }
            }
            try {
                adam_step(network.parameters(), grads, state);
            } catch (const Error& e) {
                throw TrainingError("epoch " + std::to_string(epoch) + ", batch " +
                                    std::to_string(batch_index) + ": " + e.what());
            }
            loss_sum += batch_loss;
        }

        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = loss_sum / static_cast<double>(train_set.size());
        record.train_accuracy =
            static_cast<double>(correct) / static_cast<double>(train_set.size());
        record.validation = metrics::summarize(
            validation_set.empty() ? metrics::ConfusionMatrix(spec.n_classes)
                                   : evaluate(network, validation_set));
        result.history.push_back(record);
        if (on_epoch) {
            on_epoch(record);
        }
    }
    return result;
}

std::size_t argmax(std::span<const double> values)
{
    if (values.empty()) {
        throw Error("argmax of an empty vector");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

Prediction predict(const Network& network, std::span<const Tensor> spectra)
{
    Prediction out;
    out.probabilities.reserve(spectra.size());
    out.labels.reserve(spectra.size());
    for (const Tensor& spectrum : spectra) {
        Tensor probs = softmax(network.forward(spectrum));
        out.labels.push_back(argmax(probs.values()));
        out.probabilities.push_back(std::move(probs));
    }
    return out;
}

Prediction predict(const Network& network, std::span<const Sample> samples)
{
    std::vector<Tensor> spectra;
    spectra.reserve(samples.size());
    for (const Sample& s : samples) {
        spectra.push_back(s.spectrum);
    }
    return predict(network, spectra);
}

metrics::ConfusionMatrix evaluate(const Network& network, std::span<const Sample> samples)
{
    const std::vector<std::size_t> truth = label_indices(samples);
    const Prediction p = predict(network, samples);
    return metrics::confusion(truth, p.labels, network.spec().n_classes);
}

void write_history_csv(std::ostream& out, const TrainHistory& history)
{
    out << "epoch,train_loss,train_OA,val_OA,val_AA,val_kappa\n";
    for (const EpochRecord& r : history) {
        out << r.epoch << ',' << text::format_double(r.train_loss) << ','
            << text::format_double(r.train_accuracy) << ','
            << text::format_double(r.validation.overall_accuracy) << ','
            << text::format_double(r.validation.average_accuracy) << ','
            << text::format_double(r.validation.kappa) << '\n';
    }
}

} // namespace specnet
