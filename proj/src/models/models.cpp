#include "specnet/models.hpp"

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

namespace specnet::models {

namespace {

struct Hyperparameters {
    std::string_view name;
    std::size_t epochs;
    std::size_t batch_size;
    std::size_t kernel_size;
    std::size_t pool_size;
    Activation activation;
    Padding padding;
    std::vector<std::size_t> filters;
    std::vector<std::size_t> hidden_units;
    bool coord_channel;
    bool input_bypass;
};

const std::vector<Hyperparameters>& table()
{
    static const std::vector<Hyperparameters> rows{
        {"lucas_cnn", 150, 100, 3, 2, Activation::relu, Padding::valid, {32, 32, 64, 64},
         {120, 160}, false, false},
        {"lucas_resnet", 120, 64, 3, 2, Activation::relu, Padding::same, {32, 32, 64, 64},
         {150, 100}, false, true},
        {"lucas_coordconv", 120, 32, 3, 2, Activation::relu, Padding::valid, {32, 64, 64, 128},
         {256, 128}, true, false},
        {"hu2015", 200, 100, 28, 6, Activation::tanh, Padding::valid, {20}, {100}, false,
         false},
        {"liu2018", 235, 100, 3, 2, Activation::relu, Padding::valid, {32, 32, 64, 64}, {},
         false, false},
    };
    return rows;
}

const Hyperparameters& lookup(std::string_view name)
{
    for (const Hyperparameters& row : table()) {
        if (row.name == name) {
            return row;
        }
    }
    throw Error("unknown architecture '" + std::string(name) +
                "' (expected lucas_cnn, lucas_resnet, lucas_coordconv, hu2015 or liu2018)");
}

} // namespace

bool is_architecture(std::string_view name)
{
    return std::find(architecture_names.begin(), architecture_names.end(), name) !=
           architecture_names.end();
}

NetworkSpec build(std::string_view name, std::size_t input_length, std::size_t n_classes)
{
    const Hyperparameters& hp = lookup(name);
    NetworkSpec spec;
    spec.name = std::string(name);
    spec.input_channels = 1;
    spec.input_length = input_length;
    spec.n_classes = n_classes;

    if (hp.coord_channel) {
        spec.layers.push_back(LayerSpec::coord_channel());
    }
    for (std::size_t filters : hp.filters) {
        spec.layers.push_back(LayerSpec::conv1d(filters, hp.kernel_size, hp.padding));
        spec.layers.push_back(LayerSpec::activation_layer(hp.activation));
        spec.layers.push_back(LayerSpec::maxpool1d(hp.pool_size));
    }
    spec.layers.push_back(LayerSpec::flatten());
    if (hp.input_bypass) {
        spec.layers.push_back(LayerSpec::identity_concat());
    }
    for (std::size_t units : hp.hidden_units) {
        spec.layers.push_back(LayerSpec::dense(units));
        spec.layers.push_back(LayerSpec::activation_layer(hp.activation));
    }
    spec.layers.push_back(LayerSpec::dense(n_classes));
    spec.layers.push_back(LayerSpec::softmax_output(n_classes));

    trace_shapes(spec);
    return spec;
}

TrainingDefaults training_defaults(std::string_view name)
{
    const Hyperparameters& hp = lookup(name);
    return {hp.epochs, hp.batch_size};
}

std::string architecture_card(const NetworkSpec& spec)
{
    std::ostringstream out;
    out << "# " << spec.name << "\n\n";
    if (is_architecture(spec.name)) {
        const Hyperparameters& hp = lookup(spec.name);
        out << "| setting | value |\n|---|---|\n";
        out << "| epochs | " << hp.epochs << " |\n";
        out << "| batch size | " << hp.batch_size << " |\n";
        out << "| kernel size | " << hp.kernel_size << " |\n";
        out << "| pooling size | " << hp.pool_size << " |\n";
        out << "| activation | " << to_string(hp.activation) << " |\n";
        out << "| padding | " << to_string(hp.padding) << " |\n\n";
    }

    out << "## Shape trace\n\n| # | layer | output |\n|---|---|---|\n";
    out << "| - | input | " << to_string(spec.input_shape()) << " |\n";
    for (const LayerShape& row : trace_shapes(spec)) {
        out << "| " << row.index << " | " << row.layer << " | " << to_string(row.output)
            << " |\n";
    }

    out << "\n## Parameters\n\n| tensor | shape | count |\n|---|---|---|\n";
    std::size_t index = 0;
    for (const Shape& shape : parameter_shapes(spec)) {
        out << "| " << index++ << " | " << to_string(shape) << " | " << element_count(shape)
            << " |\n";
    }
    out << "\nTotal parameters: " << param_count(spec) << "\n";
    return out.str();
}

} // namespace specnet::models
