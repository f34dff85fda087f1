#pragma once

#include "specnet/layers.hpp"
#include "specnet/tensor.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace specnet {

enum class LayerKind {
    conv1d,
    maxpool1d,
    dense,
    activation,
    flatten,
    coord_channel,
    identity_concat,
    softmax_output,
};

std::string_view to_string(LayerKind kind);

/// Declarative description of one layer; only the fields relevant to
/// `kind` are meaningful.
struct LayerSpec {
    LayerKind kind = LayerKind::flatten;
    std::size_t units = 0;       // conv filters, dense units, softmax classes
    std::size_t kernel_size = 0; // conv1d
    std::size_t pool_size = 0;   // maxpool1d
    Padding padding = Padding::valid;
    Activation activation = Activation::relu;
    double coord_low = -1.0;
    double coord_high = 1.0;

    static LayerSpec conv1d(std::size_t filters, std::size_t kernel_size, Padding padding);
    static LayerSpec maxpool1d(std::size_t pool_size);
    static LayerSpec dense(std::size_t units);
    static LayerSpec activation_layer(Activation kind);
    static LayerSpec flatten();
    static LayerSpec coord_channel(double low = -1.0, double high = 1.0);
    /// Concatenates the flattened network input after the current flat activation.
    static LayerSpec identity_concat();
    static LayerSpec softmax_output(std::size_t classes);

    bool has_parameters() const noexcept
    {
        return kind == LayerKind::conv1d || kind == LayerKind::dense;
    }
    std::string describe() const;

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct NetworkSpec {
    std::string name;
    std::size_t input_channels = 1;
    std::size_t input_length = 256;
    std::size_t n_classes = 4;
    std::vector<LayerSpec> layers;

    Shape input_shape() const { return {input_channels, input_length}; }

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

struct LayerShape {
    std::size_t index;
    std::string layer;
    Shape output;
};

/// Output shape after every layer. Throws ShapeError naming the first
/// layer whose shape rule cannot be applied.
std::vector<LayerShape> trace_shapes(const NetworkSpec& spec);

/// Kernel/weight and bias shapes of every parameterised layer, in layer order.
std::vector<Shape> parameter_shapes(const NetworkSpec& spec);

std::size_t param_count(const NetworkSpec& spec);

/// Per-band affine input transform, (x - offset) / scale; empty = identity.
struct InputScaling {
    std::vector<double> offset;
    std::vector<double> scale;

    bool empty() const noexcept { return offset.empty(); }
    Tensor apply(const Tensor& input) const;

    friend bool operator==(const InputScaling&, const InputScaling&) = default;
};

/// Intermediate values kept by a forward pass for the backward pass.
struct ForwardCache {
    /// layer_inputs[i] is the input of layer i; the last entry is the output.
    std::vector<Tensor> layer_inputs;
    std::vector<std::vector<std::size_t>> argmax;

    /// Hash of every piecewise-linear branch decision (relu masks, pool argmax).
    std::uint64_t branch_signature(const NetworkSpec& spec) const;
};

/// A NetworkSpec with instantiated parameters.
class Network {
public:
    explicit Network(NetworkSpec spec);

    const NetworkSpec& spec() const noexcept { return spec_; }

    /// He-uniform weights for layers feeding a relu, Glorot-uniform
    /// otherwise, zero biases.
    void initialize(std::uint64_t seed);

    std::span<Tensor> parameters() noexcept { return params_; }
    std::span<const Tensor> parameters() const noexcept { return params_; }
    std::vector<Tensor> zero_gradients() const;
    std::size_t parameter_count() const noexcept;

    /// Logits for one spectrum, (C x L) or flat (L) when C = 1.
    Tensor forward(const Tensor& input) const;
    Tensor forward(const Tensor& input, ForwardCache& cache) const;

    /// Adds parameter gradients into `gradients`; returns the gradient
    /// with respect to the (scaled) network input.
    Tensor backward(const Tensor& grad_logits, const ForwardCache& cache,
                    std::span<Tensor> gradients) const;

    /// Forward + softmax cross-entropy + backward; returns the loss.
    double accumulate_gradients(const Tensor& input, std::size_t label,
                                std::span<Tensor> gradients) const;

    /// Cross-entropy loss only.
    double loss(const Tensor& input, std::size_t label) const;

    InputScaling scaling;
    /// Identifies the data split a trained network belongs to.
    std::string run_id;

private:
    Tensor prepare_input(const Tensor& input) const;

    NetworkSpec spec_;
    std::vector<Tensor> params_;
    std::vector<std::size_t> first_param_; // per layer; meaningful for parameterised layers
};

} // namespace specnet
