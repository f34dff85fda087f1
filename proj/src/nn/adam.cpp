#include "specnet/adam.hpp"

#include <cmath>
#include <string>

namespace specnet {

AdamState::AdamState(std::span<const Tensor> parameters, AdamConfig cfg) : config(cfg)
{
    first_moment.reserve(parameters.size());
    second_moment.reserve(parameters.size());
    for (const Tensor& p : parameters) {
        first_moment.emplace_back(p.shape());
        second_moment.emplace_back(p.shape());
    }
}

void adam_step(std::span<Tensor> parameters, std::span<const Tensor> gradients, AdamState& state)
{
    if (parameters.size() != gradients.size() || parameters.size() != state.first_moment.size() ||
        parameters.size() != state.second_moment.size()) {
        throw ShapeError("adam: " + std::to_string(parameters.size()) + " parameters, " +
                         std::to_string(gradients.size()) + " gradients, " +
                         std::to_string(state.first_moment.size()) + " moment tensors");
    }
    for (std::size_t t = 0; t < parameters.size(); ++t) {
        require_shape(gradients[t], parameters[t].shape(), "adam gradient");
        require_shape(state.first_moment[t], parameters[t].shape(), "adam first moment");
        require_shape(state.second_moment[t], parameters[t].shape(), "adam second moment");
        const auto g = gradients[t].values();
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!std::isfinite(g[i])) {
                throw Error("adam: non-finite gradient in tensor " + std::to_string(t) +
                            " at element " + std::to_string(i));
            }
        }
    }

    const AdamConfig& cfg = state.config;
    state.step += 1;
    const auto step = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(cfg.beta1, step);
    const double correction2 = 1.0 - std::pow(cfg.beta2, step);

    for (std::size_t t = 0; t < parameters.size(); ++t) {
        auto p = parameters[t].values();
        const auto g = gradients[t].values();
        auto m = state.first_moment[t].values();
        auto v = state.second_moment[t].values();
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            p[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
        }
    }
}

} // namespace specnet
