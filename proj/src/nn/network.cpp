#include "specnet/network.hpp"

#include "specnet/rng.hpp"

#include <cmath>
#include <sstream>

namespace specnet {

std::string_view to_string(LayerKind kind)
{
    switch (kind) {
    case LayerKind::conv1d:
        return "conv1d";
    case LayerKind::maxpool1d:
        return "maxpool1d";
    case LayerKind::dense:
        return "dense";
    case LayerKind::activation:
        return "activation";
    case LayerKind::flatten:
        return "flatten";
    case LayerKind::coord_channel:
        return "coord_channel";
    case LayerKind::identity_concat:
        return "identity_concat";
    case LayerKind::softmax_output:
        return "softmax_output";
    }
    return "unknown";
}

LayerSpec LayerSpec::conv1d(std::size_t filters, std::size_t kernel_size, Padding padding)
{
    LayerSpec s;
    s.kind = LayerKind::conv1d;
    s.units = filters;
    s.kernel_size = kernel_size;
    s.padding = padding;
    return s;
}

LayerSpec LayerSpec::maxpool1d(std::size_t pool_size)
{
    LayerSpec s;
    s.kind = LayerKind::maxpool1d;
    s.pool_size = pool_size;
    return s;
}

LayerSpec LayerSpec::dense(std::size_t units)
{
    LayerSpec s;
    s.kind = LayerKind::dense;
    s.units = units;
    return s;
}

LayerSpec LayerSpec::activation_layer(Activation kind)
{
    LayerSpec s;
    s.kind = LayerKind::activation;
    s.activation = kind;
    return s;
}

LayerSpec LayerSpec::flatten()
{
    return LayerSpec{};
}

LayerSpec LayerSpec::coord_channel(double low, double high)
{
    LayerSpec s;
    s.kind = LayerKind::coord_channel;
    s.coord_low = low;
    s.coord_high = high;
    return s;
}

LayerSpec LayerSpec::identity_concat()
{
    LayerSpec s;
    s.kind = LayerKind::identity_concat;
    return s;
}

LayerSpec LayerSpec::softmax_output(std::size_t classes)
{
    LayerSpec s;
    s.kind = LayerKind::softmax_output;
    s.units = classes;
    return s;
}

std::string LayerSpec::describe() const
{
    std::ostringstream out;
    out << to_string(kind);
    switch (kind) {
    case LayerKind::conv1d:
        out << "(filters=" << units << ", kernel=" << kernel_size
            << ", padding=" << to_string(padding) << ")";
        break;
    case LayerKind::maxpool1d:
        out << "(pool=" << pool_size << ")";
        break;
    case LayerKind::dense:
        out << "(units=" << units << ")";
        break;
    case LayerKind::activation:
        out << "(" << to_string(activation) << ")";
        break;
    case LayerKind::coord_channel:
        out << "(" << coord_low << ".." << coord_high << ")";
        break;
    case LayerKind::softmax_output:
        out << "(classes=" << units << ")";
        break;
    case LayerKind::flatten:
    case LayerKind::identity_concat:
        break;
    }
    return out.str();
}

namespace {

[[noreturn]] void layer_error(std::size_t index, const LayerSpec& layer, const Shape& input,
                              const std::string& why)
{
    throw ShapeError("layer " + std::to_string(index) + " " + layer.describe() + " on input " +
                     to_string(input) + ": " + why);
}

Shape output_shape(const NetworkSpec& spec, std::size_t index, const Shape& in)
{
    const LayerSpec& layer = spec.layers[index];
    switch (layer.kind) {
    case LayerKind::conv1d: {
        if (in.size() != 2) {
            layer_error(index, layer, in, "expects (channels x length)");
        }
        if (layer.units == 0 || layer.kernel_size == 0) {
            layer_error(index, layer, in, "filters and kernel size must be positive");
        }
        if (layer.padding == Padding::valid && layer.kernel_size > in[1]) {
            layer_error(index, layer, in, "kernel longer than input under valid padding");
        }
        return {layer.units, conv1d_output_length(in[1], layer.kernel_size, layer.padding)};
    }
    case LayerKind::maxpool1d:
        if (in.size() != 2) {
            layer_error(index, layer, in, "expects (channels x length)");
        }
        if (layer.pool_size == 0 || layer.pool_size > in[1]) {
            layer_error(index, layer, in, "pool size must be in [1, length]");
        }
        return {in[0], in[1] / layer.pool_size};
    case LayerKind::dense:
        if (in.size() != 1) {
            layer_error(index, layer, in, "expects a flat input");
        }
        if (layer.units == 0) {
            layer_error(index, layer, in, "units must be positive");
        }
        return {layer.units};
    case LayerKind::activation:
        return in;
    case LayerKind::flatten:
        return {element_count(in)};
    case LayerKind::coord_channel:
        if (in.size() != 2 || in[1] < 2) {
            layer_error(index, layer, in, "expects (channels x length) with length >= 2");
        }
        return {in[0] + 1, in[1]};
    case LayerKind::identity_concat:
        if (in.size() != 1) {
            layer_error(index, layer, in, "expects a flat input");
        }
        return {in[0] + spec.input_channels * spec.input_length};
    case LayerKind::softmax_output:
        if (in.size() != 1 || in[0] != layer.units) {
            layer_error(index, layer, in,
                        "expects " + std::to_string(layer.units) + " logits");
        }
        return in;
    }
    layer_error(index, layer, in, "unknown layer kind");
}

Shape first_input_shape(const NetworkSpec& spec)
{
    if (spec.input_channels == 0 || spec.input_length == 0) {
        throw ShapeError("network '" + spec.name + "': input shape " +
                         to_string(spec.input_shape()) + " must be positive");
    }
    return spec.input_shape();
}

} // namespace

std::vector<LayerShape> trace_shapes(const NetworkSpec& spec)
{
    std::vector<LayerShape> trace;
    Shape shape = first_input_shape(spec);
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        shape = output_shape(spec, i, shape);
        trace.push_back({i, spec.layers[i].describe(), shape});
    }
    return trace;
}

std::vector<Shape> parameter_shapes(const NetworkSpec& spec)
{
    std::vector<Shape> shapes;
    Shape shape = first_input_shape(spec);
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& layer = spec.layers[i];
        const Shape out = output_shape(spec, i, shape);
        if (layer.kind == LayerKind::conv1d) {
            shapes.push_back({layer.units, shape[0], layer.kernel_size});
            shapes.push_back({layer.units});
        } else if (layer.kind == LayerKind::dense) {
            shapes.push_back({layer.units, shape[0]});
            shapes.push_back({layer.units});
        }
        shape = out;
    }
    return shapes;
}

std::size_t param_count(const NetworkSpec& spec)
{
    std::size_t total = 0;
    for (const Shape& s : parameter_shapes(spec)) {
        total += element_count(s);
    }
    return total;
}

Tensor InputScaling::apply(const Tensor& input) const
{
    if (empty()) {
        return input;
    }
    if (offset.size() != input.size() || scale.size() != input.size()) {
        throw ShapeError("input scaling fitted for " + std::to_string(offset.size()) +
                         " values applied to " + to_string(input.shape()));
    }
    Tensor out = input;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (out[i] - offset[i]) / scale[i];
    }
    return out;
}

std::uint64_t ForwardCache::branch_signature(const NetworkSpec& spec) const
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto mix = [&hash](std::uint64_t v) {
        hash ^= v;
        hash *= 0x100000001b3ULL;
    };
    for (std::size_t i = 0; i < spec.layers.size() && i + 1 < layer_inputs.size(); ++i) {
        const LayerSpec& layer = spec.layers[i];
        if (layer.kind == LayerKind::activation && layer.activation == Activation::relu) {
            for (double v : layer_inputs[i].values()) {
                mix(v > 0.0 ? 1 : 0);
            }
        } else if (layer.kind == LayerKind::maxpool1d) {
            for (std::size_t idx : argmax[i]) {
                mix(idx);
            }
        }
    }
    return hash;
}

Network::Network(NetworkSpec spec) : spec_(std::move(spec))
{
    trace_shapes(spec_);
    const std::vector<Shape> shapes = parameter_shapes(spec_);
    params_.reserve(shapes.size());
    for (const Shape& s : shapes) {
        params_.emplace_back(s);
    }
    first_param_.assign(spec_.layers.size(), 0);
    std::size_t next = 0;
    for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
        first_param_[i] = next;
        if (spec_.layers[i].has_parameters()) {
            next += 2;
        }
    }
}

void Network::initialize(std::uint64_t seed)
{
    for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
        const LayerSpec& layer = spec_.layers[i];
        if (!layer.has_parameters()) {
            continue;
        }
        Tensor& weight = params_[first_param_[i]];
        Tensor& bias = params_[first_param_[i] + 1];

        double fan_in = 0.0;
        double fan_out = 0.0;
        if (layer.kind == LayerKind::conv1d) {
            fan_in = static_cast<double>(weight.dim(1) * weight.dim(2));
            fan_out = static_cast<double>(weight.dim(0) * weight.dim(2));
        } else {
            fan_in = static_cast<double>(weight.dim(1));
            fan_out = static_cast<double>(weight.dim(0));
        }
        const bool feeds_relu = i + 1 < spec_.layers.size() &&
                                spec_.layers[i + 1].kind == LayerKind::activation &&
                                spec_.layers[i + 1].activation == Activation::relu;
        const double limit = feeds_relu ? std::sqrt(6.0 / fan_in)
                                        : std::sqrt(6.0 / (fan_in + fan_out));

        Rng rng(derive_seed(seed, i));
        for (double& w : weight.values()) {
            w = rng.uniform(-limit, limit);
        }
        bias.fill(0.0);
    }
}

std::vector<Tensor> Network::zero_gradients() const
{
    std::vector<Tensor> grads;
    grads.reserve(params_.size());
    for (const Tensor& p : params_) {
        grads.emplace_back(p.shape());
    }
    return grads;
}

std::size_t Network::parameter_count() const noexcept
{
    std::size_t total = 0;
    for (const Tensor& p : params_) {
        total += p.size();
    }
    return total;
}

Tensor Network::prepare_input(const Tensor& input) const
{
    const Shape expected = spec_.input_shape();
    if (input.shape() == expected) {
        return scaling.apply(input);
    }
    if (input.rank() == 1 && spec_.input_channels == 1 && input.size() == spec_.input_length) {
        return scaling.apply(input.reshaped(expected));
    }
    throw ShapeError("network '" + spec_.name + "' expects input " + to_string(expected) +
                     ", got " + to_string(input.shape()));
}

Tensor Network::forward(const Tensor& input) const
{
    ForwardCache cache;
    return forward(input, cache);
}

Tensor Network::forward(const Tensor& input, ForwardCache& cache) const
{
    const std::size_t n = spec_.layers.size();
    cache.layer_inputs.clear();
    cache.layer_inputs.reserve(n + 1);
    cache.argmax.assign(n, {});
    cache.layer_inputs.push_back(prepare_input(input));

    for (std::size_t i = 0; i < n; ++i) {
        const LayerSpec& layer = spec_.layers[i];
        const Tensor& x = cache.layer_inputs[i];
        switch (layer.kind) {
        case LayerKind::conv1d:
            cache.layer_inputs.push_back(conv1d_forward(x, params_[first_param_[i]],
                                                        params_[first_param_[i] + 1],
                                                        layer.padding));
            break;
        case LayerKind::maxpool1d: {
            MaxPoolResult pooled = maxpool1d_forward(x, layer.pool_size);
            cache.argmax[i] = std::move(pooled.argmax);
            cache.layer_inputs.push_back(std::move(pooled.output));
            break;
        }
        case LayerKind::dense:
            cache.layer_inputs.push_back(
                dense_forward(x, params_[first_param_[i]], params_[first_param_[i] + 1]));
            break;
        case LayerKind::activation:
            cache.layer_inputs.push_back(activation_forward(x, layer.activation));
            break;
        case LayerKind::flatten:
            cache.layer_inputs.push_back(x.reshaped({x.size()}));
            break;
        case LayerKind::coord_channel:
            cache.layer_inputs.push_back(concat_channels(
                x, coord_channel(x.dim(1), layer.coord_low, layer.coord_high)));
            break;
        case LayerKind::identity_concat: {
            const Tensor& source = cache.layer_inputs.front();
            std::vector<double> joined(x.values().begin(), x.values().end());
            joined.insert(joined.end(), source.values().begin(), source.values().end());
            cache.layer_inputs.push_back(Tensor::vector(std::move(joined)));
            break;
        }
        case LayerKind::softmax_output:
            if (x.rank() != 1 || x.size() != layer.units) {
                throw ShapeError("softmax output expects " + std::to_string(layer.units) +
                                 " logits, got " + to_string(x.shape()));
            }
            cache.layer_inputs.push_back(x);
            break;
        }
    }
    return cache.layer_inputs.back();
}

namespace {

void accumulate(Tensor& target, const Tensor& addend)
{
    auto t = target.values();
    const auto a = addend.values();
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] += a[i];
    }
}

} // namespace

Tensor Network::backward(const Tensor& grad_logits, const ForwardCache& cache,
                         std::span<Tensor> gradients) const
{
    const std::size_t n = spec_.layers.size();
    if (cache.layer_inputs.size() != n + 1) {
        throw Error("network backward: cache does not belong to a completed forward pass");
    }
    if (gradients.size() != params_.size()) {
        throw ShapeError("network backward: " + std::to_string(gradients.size()) +
                         " gradient tensors for " + std::to_string(params_.size()) +
                         " parameters");
    }
    require_shape(grad_logits, cache.layer_inputs.back().shape(), "network grad_logits");

    const Tensor& network_input = cache.layer_inputs.front();
    Tensor bypass_grad(network_input.shape());
    Tensor grad = grad_logits;
    for (std::size_t step = n; step-- > 0;) {
        const LayerSpec& layer = spec_.layers[step];
        const Tensor& x = cache.layer_inputs[step];
        switch (layer.kind) {
        case LayerKind::conv1d: {
            Conv1DGradients g = conv1d_backward(grad, x, params_[first_param_[step]],
                                                layer.padding);
            accumulate(gradients[first_param_[step]], g.kernel);
            accumulate(gradients[first_param_[step] + 1], g.bias);
            grad = std::move(g.input);
            break;
        }
        case LayerKind::maxpool1d:
            grad = maxpool1d_backward(grad, cache.argmax[step], x.shape());
            break;
        case LayerKind::dense: {
            DenseGradients g = dense_backward(grad, x, params_[first_param_[step]]);
            accumulate(gradients[first_param_[step]], g.weight);
            accumulate(gradients[first_param_[step] + 1], g.bias);
            grad = std::move(g.input);
            break;
        }
        case LayerKind::activation:
            grad = activation_backward(grad, cache.layer_inputs[step + 1], layer.activation);
            break;
        case LayerKind::flatten:
            grad.reshape(x.shape());
            break;
        case LayerKind::coord_channel: {
            const std::size_t keep = x.size();
            std::vector<double> head(grad.values().begin(), grad.values().begin() +
                                                                static_cast<std::ptrdiff_t>(keep));
            grad = Tensor(x.shape(), std::move(head));
            break;
        }
        case LayerKind::identity_concat: {
            const std::size_t keep = x.size();
            for (std::size_t i = 0; i < bypass_grad.size(); ++i) {
                bypass_grad[i] += grad[keep + i];
            }
            std::vector<double> head(grad.values().begin(), grad.values().begin() +
                                                                static_cast<std::ptrdiff_t>(keep));
            grad = Tensor(x.shape(), std::move(head));
            break;
        }
        case LayerKind::softmax_output:
            break;
        }
    }
    accumulate(grad, bypass_grad);
    return grad;
}

double Network::accumulate_gradients(const Tensor& input, std::size_t label,
                                     std::span<Tensor> gradients) const
{
    ForwardCache cache;
    const Tensor logits = forward(input, cache);
    const SoftmaxCrossEntropy ce = softmax_crossentropy(logits, label);
    backward(ce.grad_logits, cache, gradients);
    return ce.loss;
}

double Network::loss(const Tensor& input, std::size_t label) const
{
    return softmax_crossentropy(forward(input), label).loss;
}

} // namespace specnet
