#include "specnet/checkpoint.hpp"

#include "specnet/models.hpp"
#include "util/binary_io.hpp"

namespace specnet {

std::string serialize_network(const Network& network)
{
    const NetworkSpec& spec = network.spec();
    binary::Writer w;
    binary::write_header(w, CheckpointKind::network);
    w.str(spec.name);
    w.str(network.run_id);
    w.u64(spec.input_channels);
    w.u64(spec.input_length);
    w.u64(spec.n_classes);

    w.u32(static_cast<std::uint32_t>(spec.layers.size()));
    for (const LayerSpec& layer : spec.layers) {
        w.u8(static_cast<std::uint8_t>(layer.kind));
        w.u64(layer.units);
        w.u64(layer.kernel_size);
        w.u64(layer.pool_size);
        w.u8(static_cast<std::uint8_t>(layer.padding));
        w.u8(static_cast<std::uint8_t>(layer.activation));
        w.f64(layer.coord_low);
        w.f64(layer.coord_high);
    }

    const auto params = network.parameters();
    w.u32(static_cast<std::uint32_t>(params.size()));
    for (const Tensor& p : params) {
        w.u32(static_cast<std::uint32_t>(p.rank()));
        for (std::size_t d : p.shape()) {
            w.u64(d);
        }
    }

    w.u64(network.scaling.offset.size());
    for (double v : network.scaling.offset) {
        w.f64(v);
    }
    for (double v : network.scaling.scale) {
        w.f64(v);
    }

    for (const Tensor& p : params) {
        for (double v : p.values()) {
            w.f64(v);
        }
    }
    return w.finish();
}

Network deserialize_network(std::string_view bytes,
                            std::optional<std::string_view> expected_architecture,
                            const std::string& source)
{
    binary::Reader r(bytes, source);
    if (binary::read_header(r) != CheckpointKind::network) {
        r.fail("checkpoint holds a random forest, not a network");
    }

    NetworkSpec spec;
    spec.name = r.str();
    std::string run_id = r.str();
    if (expected_architecture && spec.name != *expected_architecture) {
        r.fail("checkpoint is for architecture '" + spec.name + "', expected '" +
               std::string(*expected_architecture) + "'");
    }
    spec.input_channels = r.u64();
    spec.input_length = r.u64();
    spec.n_classes = r.u64();

    const std::uint32_t layer_count = r.u32();
    for (std::uint32_t i = 0; i < layer_count; ++i) {
        LayerSpec layer;
        const std::uint8_t kind = r.u8();
        if (kind > static_cast<std::uint8_t>(LayerKind::softmax_output)) {
            r.fail("unknown layer kind " + std::to_string(kind));
        }
        layer.kind = static_cast<LayerKind>(kind);
        layer.units = r.u64();
        layer.kernel_size = r.u64();
        layer.pool_size = r.u64();
        const std::uint8_t padding = r.u8();
        const std::uint8_t activation = r.u8();
        if (padding > 1 || activation > 1) {
            r.fail("invalid padding or activation code in layer " + std::to_string(i));
        }
        layer.padding = static_cast<Padding>(padding);
        layer.activation = static_cast<Activation>(activation);
        layer.coord_low = r.f64();
        layer.coord_high = r.f64();
        spec.layers.push_back(layer);
    }
    if (models::is_architecture(spec.name) &&
        spec != models::build(spec.name, spec.input_length, spec.n_classes)) {
        r.fail("layer table does not match architecture '" + spec.name + "'");
    }

    std::vector<Shape> shapes;
    try {
        shapes = parameter_shapes(spec);
    } catch (const Error& e) {
        r.fail(std::string("inconsistent layer table: ") + e.what());
    }
    const std::uint32_t tensor_count = r.u32();
    if (tensor_count != shapes.size()) {
        r.fail("shape table lists " + std::to_string(tensor_count) + " tensors, architecture has " +
               std::to_string(shapes.size()));
    }
    for (std::uint32_t t = 0; t < tensor_count; ++t) {
        Shape stored(r.u32());
        for (std::size_t& d : stored) {
            d = r.u64();
        }
        if (stored != shapes[t]) {
            r.fail("tensor " + std::to_string(t) + " has shape " + to_string(stored) +
                   ", architecture expects " + to_string(shapes[t]));
        }
    }

    Network network(spec);
    network.run_id = std::move(run_id);
    const std::uint64_t scaled = r.u64();
    if (scaled != 0 && scaled != spec.input_channels * spec.input_length) {
        r.fail("input scaling has " + std::to_string(scaled) + " values");
    }
    network.scaling.offset.resize(scaled);
    network.scaling.scale.resize(scaled);
    for (double& v : network.scaling.offset) {
        v = r.f64();
    }
    for (double& v : network.scaling.scale) {
        v = r.f64();
    }

    for (Tensor& p : network.parameters()) {
        for (double& v : p.values()) {
            v = r.f64();
        }
    }
    r.expect_end();
    return network;
}

void save_checkpoint(const Network& network, const std::filesystem::path& path)
{
    binary::write_file(path, serialize_network(network));
}

Network load_checkpoint(const std::filesystem::path& path,
                        std::optional<std::string_view> expected_architecture)
{
    return deserialize_network(binary::read_file(path), expected_architecture, path.string());
}

CheckpointKind checkpoint_kind(const std::filesystem::path& path)
{
    const std::string bytes = binary::read_file(path);
    binary::Reader r(bytes, path.string());
    return binary::read_header(r);
}

} // namespace specnet
