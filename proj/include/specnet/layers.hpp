#pragma once

// Forward and analytic backward kernels for the layer types used by the
// spectral networks. All functions are pure: they read their inputs and
// return fresh tensors, so they can run concurrently on disjoint data.

#include "specnet/tensor.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace specnet {

enum class Padding { valid, same };
enum class Activation { relu, tanh };

std::string_view to_string(Padding padding);
std::string_view to_string(Activation activation);
Padding parse_padding(std::string_view name);
Activation parse_activation(std::string_view name);

// ---------------------------------------------------------------- conv1d

/// Output length of a stride-1 convolution.
///
/// `same` keeps the length; the total padding k-1 is split with the odd
/// zero on the right, i.e. left = (k-1)/2, right = k-1-left.
std::size_t conv1d_output_length(std::size_t length, std::size_t kernel_size, Padding padding);

/// Left zero padding applied by `same` convolutions.
constexpr std::size_t conv1d_left_pad(std::size_t kernel_size, Padding padding) noexcept
{
    return padding == Padding::same ? (kernel_size - 1) / 2 : 0;
}

/// input (C_in x L), kernel (C_out x C_in x K), bias (C_out) -> (C_out x L').
Tensor conv1d_forward(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                      Padding padding);

struct Conv1DGradients {
    Tensor input;
    Tensor kernel;
    Tensor bias;
};

Conv1DGradients conv1d_backward(const Tensor& grad_output, const Tensor& input,
                                const Tensor& kernel, Padding padding);

// ---------------------------------------------------------------- maxpool

struct MaxPoolResult {
    Tensor output;
    /// Flat index into the input for every output element.
    std::vector<std::size_t> argmax;
};

/// Non-overlapping windows, stride = pool size, trailing remainder dropped.
/// Ties resolve to the lowest index in the window.
MaxPoolResult maxpool1d_forward(const Tensor& input, std::size_t pool_size);

Tensor maxpool1d_backward(const Tensor& grad_output, std::span<const std::size_t> argmax,
                          const Shape& input_shape);

// ---------------------------------------------------------------- dense

/// weight (m x n), bias (m), input (n) -> W * input + b.
Tensor dense_forward(const Tensor& input, const Tensor& weight, const Tensor& bias);

struct DenseGradients {
    Tensor input;
    Tensor weight;
    Tensor bias;
};

DenseGradients dense_backward(const Tensor& grad_output, const Tensor& input,
                              const Tensor& weight);

// ---------------------------------------------------------------- activations

Tensor activation_forward(const Tensor& input, Activation kind);

/// Uses the forward *output*: relu'(x) = [y > 0] (so relu'(0) = 0),
/// tanh'(x) = 1 - y^2.
Tensor activation_backward(const Tensor& grad_output, const Tensor& output, Activation kind);

// ---------------------------------------------------------------- softmax

/// Max-subtracted softmax.
Tensor softmax(const Tensor& logits);

struct SoftmaxCrossEntropy {
    double loss = 0.0;
    Tensor probabilities;
    Tensor grad_logits;
};

/// Fused softmax + categorical cross-entropy; grad = probs - onehot.
SoftmaxCrossEntropy softmax_crossentropy(const Tensor& logits, const Tensor& onehot);
SoftmaxCrossEntropy softmax_crossentropy(const Tensor& logits, std::size_t target);

Tensor one_hot(std::size_t index, std::size_t classes);

// ---------------------------------------------------------------- coordinates

/// (1 x length) channel of evenly spaced values from `low` to `high`.
Tensor coord_channel(std::size_t length, double low = -1.0, double high = 1.0);

/// Stacks `extra` under `input` along the channel axis.
Tensor concat_channels(const Tensor& input, const Tensor& extra);

} // namespace specnet
