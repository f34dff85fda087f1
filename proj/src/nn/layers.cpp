#include "specnet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace specnet {

std::string_view to_string(Padding padding)
{
    return padding == Padding::same ? "same" : "valid";
}

std::string_view to_string(Activation activation)
{
    return activation == Activation::tanh ? "tanh" : "relu";
}

Padding parse_padding(std::string_view name)
{
    if (name == "valid") {
        return Padding::valid;
    }
    if (name == "same") {
        return Padding::same;
    }
    throw Error("unknown padding mode '" + std::string(name) + "'");
}

Activation parse_activation(std::string_view name)
{
    if (name == "relu") {
        return Activation::relu;
    }
    if (name == "tanh") {
        return Activation::tanh;
    }
    throw Error("unknown activation '" + std::string(name) + "'");
}

namespace {

struct ConvGeometry {
    std::size_t in_channels;
    std::size_t in_length;
    std::size_t out_channels;
    std::size_t kernel_size;
    std::size_t out_length;
    std::size_t left_pad;
};

ConvGeometry conv_geometry(const Tensor& input, const Tensor& kernel, Padding padding)
{
    if (input.rank() != 2) {
        throw ShapeError("conv1d: input must be (channels x length), got " +
                         to_string(input.shape()));
    }
    if (kernel.rank() != 3) {
        throw ShapeError("conv1d: kernel must be (out x in x size), got " +
                         to_string(kernel.shape()));
    }
    if (kernel.dim(1) != input.dim(0)) {
        throw ShapeError("conv1d: kernel expects " + std::to_string(kernel.dim(1)) +
                         " input channels, input " + to_string(input.shape()) + " has " +
                         std::to_string(input.dim(0)));
    }
    ConvGeometry g{};
    g.in_channels = input.dim(0);
    g.in_length = input.dim(1);
    g.out_channels = kernel.dim(0);
    g.kernel_size = kernel.dim(2);
    g.out_length = conv1d_output_length(g.in_length, g.kernel_size, padding);
    g.left_pad = conv1d_left_pad(g.kernel_size, padding);
    return g;
}

std::ptrdiff_t tap_shift(const ConvGeometry& g, std::size_t tap)
{
    return static_cast<std::ptrdiff_t>(tap) - static_cast<std::ptrdiff_t>(g.left_pad);
}

// Output positions [first, last) for which input index i + k - pad is in range.
std::pair<std::size_t, std::size_t> tap_range(const ConvGeometry& g, std::size_t tap)
{
    const std::ptrdiff_t shift = tap_shift(g, tap);
    const std::ptrdiff_t first = std::max<std::ptrdiff_t>(0, -shift);
    const std::ptrdiff_t last = std::min<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(g.out_length),
        static_cast<std::ptrdiff_t>(g.in_length) - shift);
    if (last <= first) {
        return {0, 0};
    }
    return {static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
}

} // namespace

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel_size, Padding padding)
{
    if (kernel_size == 0) {
        throw ShapeError("conv1d: kernel size must be positive");
    }
    if (padding == Padding::same) {
        return length;
    }
    if (kernel_size > length) {
        throw ShapeError("conv1d: kernel size " + std::to_string(kernel_size) +
                         " exceeds input length " + std::to_string(length) +
                         " under valid padding");
    }
    return length - kernel_size + 1;
}

Tensor conv1d_forward(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                      Padding padding)
{
    const ConvGeometry g = conv_geometry(input, kernel, padding);
    require_shape(bias, {g.out_channels}, "conv1d bias");

    Tensor output({g.out_channels, g.out_length});
    for (std::size_t c = 0; c < g.out_channels; ++c) {
        double* out = output.data() + c * g.out_length;
        std::fill(out, out + g.out_length, bias[c]);
        for (std::size_t j = 0; j < g.in_channels; ++j) {
            const double* in = input.data() + j * g.in_length;
            const double* w = kernel.data() + (c * g.in_channels + j) * g.kernel_size;
            for (std::size_t k = 0; k < g.kernel_size; ++k) {
                const auto [first, last] = tap_range(g, k);
                const double weight = w[k];
                const std::ptrdiff_t shift = tap_shift(g, k);
                for (std::size_t i = first; i < last; ++i) {
                    out[i] += weight * in[static_cast<std::ptrdiff_t>(i) + shift];
                }
            }
        }
    }
    return output;
}

Conv1DGradients conv1d_backward(const Tensor& grad_output, const Tensor& input,
                                const Tensor& kernel, Padding padding)
{
    const ConvGeometry g = conv_geometry(input, kernel, padding);
    require_shape(grad_output, {g.out_channels, g.out_length}, "conv1d grad_output");

    Conv1DGradients grads{Tensor(input.shape()), Tensor(kernel.shape()),
                          Tensor({g.out_channels})};
    for (std::size_t c = 0; c < g.out_channels; ++c) {
        const double* gout = grad_output.data() + c * g.out_length;
        double bias_sum = 0.0;
        for (std::size_t i = 0; i < g.out_length; ++i) {
            bias_sum += gout[i];
        }
        grads.bias[c] = bias_sum;

        for (std::size_t j = 0; j < g.in_channels; ++j) {
            const double* in = input.data() + j * g.in_length;
            double* gin = grads.input.data() + j * g.in_length;
            const std::size_t w_offset = (c * g.in_channels + j) * g.kernel_size;
            for (std::size_t k = 0; k < g.kernel_size; ++k) {
                const auto [first, last] = tap_range(g, k);
                const double weight = kernel[w_offset + k];
                const std::ptrdiff_t shift = tap_shift(g, k);
                double acc = 0.0;
                for (std::size_t i = first; i < last; ++i) {
                    const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(i) + shift;
                    acc += gout[i] * in[src];
                    gin[src] += weight * gout[i];
                }
                grads.kernel[w_offset + k] = acc;
            }
        }
    }
    return grads;
}

MaxPoolResult maxpool1d_forward(const Tensor& input, std::size_t pool_size)
{
    if (pool_size == 0) {
        throw ShapeError("maxpool1d: pool size must be at least 1");
    }
    if (input.rank() != 2) {
        throw ShapeError("maxpool1d: input must be (channels x length), got " +
                         to_string(input.shape()));
    }
    const std::size_t channels = input.dim(0);
    const std::size_t length = input.dim(1);
    if (pool_size > length) {
        throw ShapeError("maxpool1d: pool size " + std::to_string(pool_size) +
                         " exceeds input length " + std::to_string(length));
    }
    const std::size_t out_length = length / pool_size;

    MaxPoolResult result{Tensor({channels, out_length}), {}};
    result.argmax.resize(channels * out_length);
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t o = 0; o < out_length; ++o) {
            std::size_t best = c * length + o * pool_size;
            for (std::size_t p = 1; p < pool_size; ++p) {
                const std::size_t idx = c * length + o * pool_size + p;
                if (input[idx] > input[best]) {
                    best = idx;
                }
            }
            result.output[c * out_length + o] = input[best];
            result.argmax[c * out_length + o] = best;
        }
    }
    return result;
}

Tensor maxpool1d_backward(const Tensor& grad_output, std::span<const std::size_t> argmax,
                          const Shape& input_shape)
{
    if (argmax.size() != grad_output.size()) {
        throw ShapeError("maxpool1d backward: " + std::to_string(argmax.size()) +
                         " argmax indices for gradient of shape " +
                         to_string(grad_output.shape()));
    }
    Tensor grad_input(input_shape);
    for (std::size_t i = 0; i < argmax.size(); ++i) {
        if (argmax[i] >= grad_input.size()) {
            throw ShapeError("maxpool1d backward: argmax index " + std::to_string(argmax[i]) +
                             " out of range for input shape " + to_string(input_shape));
        }
        grad_input[argmax[i]] += grad_output[i];
    }
    return grad_input;
}

Tensor dense_forward(const Tensor& input, const Tensor& weight, const Tensor& bias)
{
    if (weight.rank() != 2) {
        throw ShapeError("dense: weight must be (out x in), got " + to_string(weight.shape()));
    }
    const std::size_t m = weight.dim(0);
    const std::size_t n = weight.dim(1);
    if (input.rank() != 1 || input.size() != n) {
        throw ShapeError("dense: weight " + to_string(weight.shape()) +
                         " cannot be applied to input " + to_string(input.shape()));
    }
    require_shape(bias, {m}, "dense bias");

    Tensor output({m});
    for (std::size_t r = 0; r < m; ++r) {
        const double* w = weight.data() + r * n;
        double acc = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            acc += w[c] * input[c];
        }
        output[r] = acc + bias[r];
    }
    return output;
}

DenseGradients dense_backward(const Tensor& grad_output, const Tensor& input,
                              const Tensor& weight)
{
    if (weight.rank() != 2) {
        throw ShapeError("dense: weight must be (out x in), got " + to_string(weight.shape()));
    }
    const std::size_t m = weight.dim(0);
    const std::size_t n = weight.dim(1);
    require_shape(input, {n}, "dense input");
    require_shape(grad_output, {m}, "dense grad_output");

    DenseGradients grads{Tensor({n}), Tensor({m, n}), grad_output};
    for (std::size_t r = 0; r < m; ++r) {
        const double g = grad_output[r];
        const double* w = weight.data() + r * n;
        double* gw = grads.weight.data() + r * n;
        for (std::size_t c = 0; c < n; ++c) {
            gw[c] = g * input[c];
            grads.input[c] += g * w[c];
        }
    }
    return grads;
}

Tensor activation_forward(const Tensor& input, Activation kind)
{
    Tensor output = input;
    switch (kind) {
    case Activation::relu:
        for (double& v : output.values()) {
            v = v > 0.0 ? v : 0.0;
        }
        return output;
    case Activation::tanh:
        for (double& v : output.values()) {
            v = std::tanh(v);
        }
        return output;
    }
    throw Error("activation: unknown kind " + std::to_string(static_cast<int>(kind)));
}

Tensor activation_backward(const Tensor& grad_output, const Tensor& output, Activation kind)
{
    if (grad_output.shape() != output.shape()) {
        throw ShapeError("activation backward: gradient " + to_string(grad_output.shape()) +
                         " vs output " + to_string(output.shape()));
    }
    Tensor grad_input = grad_output;
    switch (kind) {
    case Activation::relu:
        for (std::size_t i = 0; i < grad_input.size(); ++i) {
            if (!(output[i] > 0.0)) {
                grad_input[i] = 0.0;
            }
        }
        return grad_input;
    case Activation::tanh:
        for (std::size_t i = 0; i < grad_input.size(); ++i) {
            grad_input[i] *= 1.0 - output[i] * output[i];
        }
        return grad_input;
    }
    throw Error("activation: unknown kind " + std::to_string(static_cast<int>(kind)));
}

Tensor softmax(const Tensor& logits)
{
    if (logits.empty()) {
        throw ShapeError("softmax: empty logits");
    }
    const double peak = *std::max_element(logits.values().begin(), logits.values().end());
    Tensor probs(Shape{logits.size()});
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - peak);
        total += probs[i];
    }
    for (double& p : probs.values()) {
        p /= total;
    }
    return probs;
}

SoftmaxCrossEntropy softmax_crossentropy(const Tensor& logits, const Tensor& onehot)
{
    if (onehot.size() != logits.size()) {
        throw ShapeError("softmax_crossentropy: target " + to_string(onehot.shape()) +
                         " does not match logits " + to_string(logits.shape()));
    }
    std::size_t target = onehot.size();
    for (std::size_t i = 0; i < onehot.size(); ++i) {
        if (onehot[i] == 1.0 && target == onehot.size()) {
            target = i;
        } else if (onehot[i] != 0.0) {
            throw Error("softmax_crossentropy: target is not one-hot");
        }
    }
    if (target == onehot.size()) {
        throw Error("softmax_crossentropy: target is not one-hot");
    }
    return softmax_crossentropy(logits, target);
}

SoftmaxCrossEntropy softmax_crossentropy(const Tensor& logits, std::size_t target)
{
    if (target >= logits.size()) {
        throw Error("softmax_crossentropy: class " + std::to_string(target) +
                    " out of range for " + std::to_string(logits.size()) + " logits");
    }
    const double peak = *std::max_element(logits.values().begin(), logits.values().end());
    double total = 0.0;
    for (double v : logits.values()) {
        total += std::exp(v - peak);
    }
    const double log_total = std::log(total);

    SoftmaxCrossEntropy result;
    result.loss = -(logits[target] - peak - log_total);
    result.probabilities = Tensor(Shape{logits.size()});
    for (std::size_t i = 0; i < logits.size(); ++i) {
        result.probabilities[i] = std::exp(logits[i] - peak - log_total);
    }
    result.grad_logits = result.probabilities;
    result.grad_logits[target] -= 1.0;
    return result;
}

Tensor one_hot(std::size_t index, std::size_t classes)
{
    if (index >= classes) {
        throw Error("one_hot: index " + std::to_string(index) + " out of range for " +
                    std::to_string(classes) + " classes");
    }
    Tensor out(Shape{classes});
    out[index] = 1.0;
    return out;
}

Tensor coord_channel(std::size_t length, double low, double high)
{
    if (length < 2) {
        throw Error("coord_channel: length must be at least 2, got " + std::to_string(length));
    }
    Tensor out({1, length});
    const double span = high - low;
    const auto last = static_cast<double>(length - 1);
    for (std::size_t i = 0; i < length; ++i) {
        out[i] = low + span * (static_cast<double>(i) / last);
    }
    out[length - 1] = high;
    return out;
}

Tensor concat_channels(const Tensor& input, const Tensor& extra)
{
    if (input.rank() != 2 || extra.rank() != 2 || input.dim(1) != extra.dim(1)) {
        throw ShapeError("concat_channels: cannot stack " + to_string(extra.shape()) +
                         " under " + to_string(input.shape()));
    }
    std::vector<double> values(input.values().begin(), input.values().end());
    values.insert(values.end(), extra.values().begin(), extra.values().end());
    return Tensor({input.dim(0) + extra.dim(0), input.dim(1)}, std::move(values));
}

} // namespace specnet
