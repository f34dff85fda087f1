#include "doctest.h"
#include "oracles.hpp"

#include "specnet/adam.hpp"
#include "specnet/gradient_check.hpp"
#include "specnet/layers.hpp"
#include "specnet/network.hpp"

#include <cmath>

using namespace specnet;

namespace {

double max_abs_diff(const Tensor& a, const Tensor& b)
{
    REQUIRE(a.shape() == b.shape());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

// Loss of the conv output against a fixed random projection, for
// finite-difference checks of the standalone kernels.
double projected(const Tensor& out, const Tensor& proj)
{
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        s += out[i] * proj[i];
    }
    return s;
}

} // namespace

TEST_CASE("tensor basics")
{
    Tensor t({2, 3}, 1.5);
    CHECK(t.size() == 6);
    CHECK(t.rank() == 2);
    CHECK(t.sum() == doctest::Approx(9.0));
    CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
    CHECK(t.reshaped({3, 2}).dim(0) == 3);
    CHECK_THROWS_AS(t.reshaped({4, 2}), ShapeError);
}

TEST_CASE("conv1d output lengths and padding split")
{
    CHECK(conv1d_output_length(256, 3, Padding::valid) == 254);
    CHECK(conv1d_output_length(256, 28, Padding::valid) == 229);
    CHECK(conv1d_output_length(256, 4, Padding::same) == 256);
    CHECK(conv1d_left_pad(4, Padding::same) == 1);
    CHECK(conv1d_left_pad(3, Padding::same) == 1);
    CHECK_THROWS_AS(conv1d_output_length(2, 3, Padding::valid), ShapeError);
}

TEST_CASE("conv1d, maxpool and dense match naive references")
{
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t cin = 1 + rng.below(3);
        const std::size_t cout = 1 + rng.below(4);
        const std::size_t k = 1 + rng.below(6);
        const std::size_t len = k + rng.below(20);
        const bool same = rng.below(2) == 1;
        const Tensor x = oracle::random_tensor(rng, {cin, len});
        const Tensor w = oracle::random_tensor(rng, {cout, cin, k});
        const Tensor b = oracle::random_tensor(rng, {cout});
        const Tensor y = conv1d_forward(x, w, b, same ? Padding::same : Padding::valid);
        CHECK(max_abs_diff(y, oracle::conv1d(x, w, b, same)) < 1e-12);

        const std::size_t pool = 1 + rng.below(4);
        if (len >= pool) {
            CHECK(max_abs_diff(maxpool1d_forward(x, pool).output, oracle::maxpool1d(x, pool)) ==
                  0.0);
        }

        const Tensor v = oracle::random_tensor(rng, {len});
        const Tensor wd = oracle::random_tensor(rng, {cout, len});
        CHECK(max_abs_diff(dense_forward(v, wd, b), oracle::dense(v, wd, b)) < 1e-12);
    }
}

TEST_CASE("conv1d backward matches finite differences")
{
    Rng rng(7);
    for (Padding padding : {Padding::valid, Padding::same}) {
        const Tensor x = oracle::random_tensor(rng, {2, 9});
        Tensor w = oracle::random_tensor(rng, {3, 2, 4});
        const Tensor b = oracle::random_tensor(rng, {3});
        const Tensor y = conv1d_forward(x, w, b, padding);
        const Tensor proj = oracle::random_tensor(rng, y.shape());
        const Conv1DGradients g = conv1d_backward(proj, x, w, padding);
        const double h = 1e-6;
        for (std::size_t i = 0; i < w.size(); ++i) {
            Tensor wp = w;
            Tensor wm = w;
            wp[i] += h;
            wm[i] -= h;
            const double numeric = (projected(conv1d_forward(x, wp, b, padding), proj) -
                                    projected(conv1d_forward(x, wm, b, padding), proj)) /
                                   (2 * h);
            CHECK(g.kernel[i] == doctest::Approx(numeric).epsilon(1e-7));
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            Tensor xp = x;
            Tensor xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double numeric = (projected(conv1d_forward(xp, w, b, padding), proj) -
                                    projected(conv1d_forward(xm, w, b, padding), proj)) /
                                   (2 * h);
            CHECK(g.input[i] == doctest::Approx(numeric).epsilon(1e-7));
        }
        for (std::size_t o = 0; o < 3; ++o) {
            double s = 0.0;
            for (std::size_t t = 0; t < y.dim(1); ++t) {
                s += proj.at(o, t);
            }
            CHECK(g.bias[o] == doctest::Approx(s));
        }
    }
}

TEST_CASE("maxpool drops the remainder and breaks ties to the lowest index")
{
    const Tensor x({1, 7}, std::vector<double>{1, 3, 3, 2, 5, 5, 9});
    const MaxPoolResult r = maxpool1d_forward(x, 2);
    CHECK(r.output.shape() == Shape{1, 3});
    CHECK(r.argmax == std::vector<std::size_t>{1, 2, 4});
    const Tensor g = maxpool1d_backward(Tensor({1, 3}, std::vector<double>{1, 2, 3}), r.argmax,
                                        x.shape());
    CHECK(oracle::values_of(g) == std::vector<double>{0, 1, 2, 0, 3, 0, 0});
}

TEST_CASE("activations and their derivatives")
{
    const Tensor x = Tensor::vector({-1.0, 0.0, 2.0});
    const Tensor r = activation_forward(x, Activation::relu);
    CHECK(oracle::values_of(r) == std::vector<double>{0, 0, 2});
    CHECK(oracle::values_of(activation_backward(Tensor::vector({1, 1, 1}), r, Activation::relu)) == std::vector<double>{0, 0, 1});
    const Tensor t = activation_forward(x, Activation::tanh);
    const Tensor gt = activation_backward(Tensor::vector({1, 1, 1}), t, Activation::tanh);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(gt[i] == doctest::Approx(1.0 - std::tanh(x[i]) * std::tanh(x[i])));
    }
    CHECK(parse_activation("tanh") == Activation::tanh);
    CHECK_THROWS_AS(parse_activation("gelu"), Error);
}

TEST_CASE("softmax cross-entropy")
{
    const Tensor logits = Tensor::vector({1000.0, 1000.0, 1000.0, 1000.0});
    const SoftmaxCrossEntropy s = softmax_crossentropy(logits, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(s.probabilities[i] == doctest::Approx(0.25));
    }
    CHECK(s.loss == doctest::Approx(std::log(4.0)));
    CHECK(s.grad_logits[2] == doctest::Approx(-0.75));
    CHECK(s.grad_logits.sum() == doctest::Approx(0.0));
    CHECK_THROWS(softmax_crossentropy(logits, 4));
}

TEST_CASE("coordinate channel")
{
    const Tensor c = coord_channel(5);
    CHECK(oracle::values_of(c) == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
    const Tensor stacked = concat_channels(Tensor({1, 5}, 2.0), c);
    CHECK(stacked.shape() == Shape{2, 5});
    CHECK(stacked.at(1, 4) == 1.0);
}

TEST_CASE("adam matches two hand-unrolled steps")
{
    std::vector<Tensor> params{Tensor::vector({1.0, -2.0})};
    AdamConfig cfg;
    cfg.learning_rate = 0.1;
    AdamState state(params, cfg);
    const std::vector<Tensor> g1{Tensor::vector({0.5, -1.0})};
    const std::vector<Tensor> g2{Tensor::vector({0.25, 2.0})};
    adam_step(params, g1, state);
    adam_step(params, g2, state);

    for (std::size_t i = 0; i < 2; ++i) {
        double p = i == 0 ? 1.0 : -2.0;
        double m = 0.0;
        double v = 0.0;
        for (int t = 1; t <= 2; ++t) {
            const double g = (t == 1 ? g1 : g2)[0][i];
            m = 0.9 * m + 0.1 * g;
            v = 0.999 * v + 0.001 * g * g;
            const double mhat = m / (1.0 - std::pow(0.9, t));
            const double vhat = v / (1.0 - std::pow(0.999, t));
            p -= 0.1 * mhat / (std::sqrt(vhat) + 1e-8);
        }
        CHECK(params[0][i] == doctest::Approx(p).epsilon(1e-14));
    }
    CHECK(state.step == 2);
}

TEST_CASE("adam rejects non-finite gradients without mutating")
{
    std::vector<Tensor> params{Tensor::vector({1.0, 2.0})};
    AdamState state(params, {});
    const std::vector<Tensor> bad{Tensor::vector({0.1, std::nan("")})};
    CHECK_THROWS(adam_step(params, bad, state));
    CHECK(oracle::values_of(params[0]) == std::vector<double>{1.0, 2.0});
    CHECK(state.step == 0);
}

TEST_CASE("small network passes a full gradient check")
{
    NetworkSpec spec;
    spec.name = "tiny";
    spec.input_length = 16;
    spec.n_classes = 3;
    spec.layers = {LayerSpec::coord_channel(),
                   LayerSpec::conv1d(3, 3, Padding::same),
                   LayerSpec::activation_layer(Activation::tanh),
                   LayerSpec::maxpool1d(2),
                   LayerSpec::conv1d(4, 2, Padding::valid),
                   LayerSpec::activation_layer(Activation::relu),
                   LayerSpec::flatten(),
                   LayerSpec::identity_concat(),
                   LayerSpec::dense(5),
                   LayerSpec::activation_layer(Activation::relu),
                   LayerSpec::dense(3),
                   LayerSpec::softmax_output(3)};
    Network net(spec);
    net.initialize(9);
    Rng rng(3);
    const Tensor x = oracle::random_tensor(rng, {1, 16});
    const GradientCheckReport r = gradient_check(net, x, 1);
    CHECK(r.checked + r.skipped == net.parameter_count());
    CHECK(r.max_relative_error < 1e-6);
}

TEST_CASE("gradient check guards epsilon and probes every entry")
{
    NetworkSpec spec;
    spec.name = "tanh";
    spec.input_length = 8;
    spec.n_classes = 2;
    spec.layers = {LayerSpec::flatten(), LayerSpec::dense(2), LayerSpec::softmax_output(2)};
    Network net(spec);
    net.initialize(1);
    GradientCheckOptions bad;
    bad.epsilon = 1.0;
    CHECK_THROWS(gradient_check(net, Tensor({1, 8}, 0.5), 0, bad));
    const GradientCheckReport r = gradient_check(net, Tensor({1, 8}, 0.5), 0);
    CHECK(r.checked == 18);
    CHECK(r.max_relative_error < 1e-8);
}

TEST_CASE("network forward is deterministic and initialization depends on the seed")
{
    NetworkSpec spec;
    spec.name = "d";
    spec.input_length = 10;
    spec.n_classes = 4;
    spec.layers = {LayerSpec::conv1d(2, 3, Padding::valid),
                   LayerSpec::activation_layer(Activation::relu), LayerSpec::flatten(),
                   LayerSpec::dense(4), LayerSpec::softmax_output(4)};
    Network a(spec);
    Network b(spec);
    a.initialize(5);
    b.initialize(5);
    const Tensor x({1, 10}, 0.3);
    CHECK(a.forward(x) == b.forward(x));
    b.initialize(6);
    CHECK_FALSE(a.forward(x) == b.forward(x));
    for (const Tensor& p : a.parameters()) {
        CHECK(p.all_finite());
    }
    CHECK_THROWS_AS(a.forward(Tensor({1, 11}, 0.0)), ShapeError);
}
