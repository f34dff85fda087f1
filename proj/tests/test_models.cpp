#include "doctest.h"
#include "oracles.hpp"

#include "specnet/models.hpp"

using namespace specnet;

namespace {

Shape output_of(const NetworkSpec& spec, LayerKind kind)
{
    const auto trace = trace_shapes(spec);
    for (const LayerShape& s : trace) {
        if (spec.layers[s.index].kind == kind) {
            return s.output;
        }
    }
    return {};
}

} // namespace

TEST_CASE("parameter counts and flatten widths match the recomputed table")
{
    for (const auto& [name, table] : oracle::arch_tables()) {
        CAPTURE(name);
        const NetworkSpec spec = models::build(name);
        const oracle::ArchAudit expected = oracle::audit(table);
        CHECK(param_count(spec) == expected.params);
        const Shape flat = output_of(spec, table.concat_input ? LayerKind::identity_concat
                                                              : LayerKind::flatten);
        CHECK(flat == Shape{expected.flatten});
        CHECK(trace_shapes(spec).back().output == Shape{4});
        Network net(spec);
        CHECK(net.parameter_count() == expected.params);
    }
}

TEST_CASE("headline audit values")
{
    CHECK(param_count(models::build("hu2015")) == 77084);
    CHECK(output_of(models::build("lucas_cnn"), LayerKind::flatten) == Shape{896});
    CHECK(output_of(models::build("lucas_resnet"), LayerKind::identity_concat) ==
          Shape{1280});
    const auto coord = trace_shapes(models::build("lucas_coordconv"));
    CHECK(coord.front().output == Shape{2, 256});
}

TEST_CASE("lucas_cnn trace, layer by layer")
{
    const auto trace = trace_shapes(models::build("lucas_cnn"));
    std::vector<Shape> outputs;
    for (const LayerShape& s : trace) {
        outputs.push_back(s.output);
    }
    const std::vector<Shape> expected{
        {32, 254}, {32, 254}, {32, 127}, {32, 125}, {32, 125}, {32, 62}, {64, 60}, {64, 60},
        {64, 30},  {64, 28},  {64, 28},  {64, 14},  {896},     {120},    {120},    {160},
        {160},     {4},       {4}};
    CHECK(outputs == expected);
}

TEST_CASE("training defaults and activations")
{
    CHECK(models::training_defaults("lucas_cnn").epochs == 150);
    CHECK(models::training_defaults("lucas_cnn").batch_size == 100);
    CHECK(models::training_defaults("lucas_resnet").batch_size == 64);
    CHECK(models::training_defaults("lucas_coordconv").batch_size == 32);
    CHECK(models::training_defaults("hu2015").epochs == 200);
    CHECK(models::training_defaults("liu2018").epochs == 235);
    for (const LayerSpec& l : models::build("hu2015").layers) {
        if (l.kind == LayerKind::activation) {
            CHECK(l.activation == Activation::tanh);
        }
    }
    CHECK_THROWS_AS(models::build("vgg"), Error);
    CHECK_FALSE(models::is_architecture("rf"));
}

TEST_CASE("shape errors name the offending layer")
{
    try {
        (void)trace_shapes(models::build("hu2015", 20));
        FAIL("expected a shape error");
    } catch (const ShapeError& e) {
        CHECK(std::string(e.what()).find("conv1d") != std::string::npos);
    }
}

TEST_CASE("architecture card lists every layer")
{
    const std::string card = models::architecture_card(models::build("liu2018"));
    CHECK(card.find("liu2018") != std::string::npos);
    CHECK(card.find(std::to_string(param_count(models::build("liu2018")))) != std::string::npos);
}
