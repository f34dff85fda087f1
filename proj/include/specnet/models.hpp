#pragma once

#include "specnet/network.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace specnet::models {

inline constexpr std::array<std::string_view, 5> architecture_names{
    "lucas_cnn", "lucas_resnet", "lucas_coordconv", "hu2015", "liu2018"};

bool is_architecture(std::string_view name);

/// Layer list of a named architecture.
///
/// Conv blocks are conv -> activation -> maxpool. Hidden dense layers
/// use the architecture's activation; the classifier is a plain dense
/// layer followed by the softmax marker.
NetworkSpec build(std::string_view name, std::size_t input_length = 256,
                  std::size_t n_classes = 4);

/// Reference training schedule of each architecture.
struct TrainingDefaults {
    std::size_t epochs;
    std::size_t batch_size;
};

TrainingDefaults training_defaults(std::string_view name);

/// Markdown page with hyperparameters, shape trace and parameter table.
std::string architecture_card(const NetworkSpec& spec);

} // namespace specnet::models
