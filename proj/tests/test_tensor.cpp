#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spnlab/gradcheck.hpp"
#include "spnlab/ops.hpp"
#include "spnlab/tensor.hpp"
#include "test_util.hpp"

using namespace spnlab;
namespace ot = spnlab::testing;

namespace {

// Independent reference: naive sextuple-loop cross-correlation.
std::vector<double> conv2d_reference(const std::vector<double>& x, int N, int C, int H, int W,
                                     const std::vector<double>& k, int O, int KH, int KW,
                                     int stride, int pad, int OH, int OW) {
    std::vector<double> y(static_cast<size_t>(N) * O * OH * OW, 0.0);
    for (int n = 0; n < N; ++n)
        for (int o = 0; o < O; ++o)
            for (int oh = 0; oh < OH; ++oh)
                for (int ow = 0; ow < OW; ++ow) {
                    double acc = 0;
                    for (int c = 0; c < C; ++c)
                        for (int kh = 0; kh < KH; ++kh)
                            for (int kw = 0; kw < KW; ++kw) {
                                int ih = oh * stride + kh - pad;
                                int iw = ow * stride + kw - pad;
                                if (ih < 0 || ih >= H || iw < 0 || iw >= W) continue;
                                acc += x[((static_cast<size_t>(n) * C + c) * H + ih) * W + iw] *
                                       k[((static_cast<size_t>(o) * C + c) * KH + kh) * KW + kw];
                            }
                    y[((static_cast<size_t>(n) * O + o) * OH + oh) * OW + ow] = acc;
                }
    return y;
}

}  // namespace

TEST_CASE("conv2d identity with 1x1 unit kernel") {
    Rng rng(7);
    auto x = ot::random_tensor<float>(rng, {2, 3, 5, 4});
    auto k = Tensor::zeros({3, 3, 1, 1});
    for (int c = 0; c < 3; ++c) k.data()[static_cast<size_t>(c) * 3 + c] = 1.0f;
    auto y = ops::conv2d(x, k, 1, 0);
    REQUIRE(y.shape() == x.shape());
    for (size_t i = 0; i < y.data().size(); ++i) CHECK(y.data()[i] == doctest::Approx(x.data()[i]));
}

TEST_CASE("conv2d all-ones 3x3 over all-ones 3x3 input gives 9") {
    auto x = Tensor::filled({1, 1, 3, 3}, 1.0f);
    auto k = Tensor::filled({1, 1, 3, 3}, 1.0f);
    auto y = ops::conv2d(x, k, 1, 0);
    REQUIRE(y.shape() == Shape{1, 1, 1, 1});
    CHECK(y.data()[0] == doctest::Approx(9.0f));
}

TEST_CASE("conv2d strided padded output matches naive reference") {
    Rng rng(11);
    auto x = ot::random_tensor<double>(rng, {2, 3, 5, 5});
    auto k = ot::random_tensor<double>(rng, {4, 3, 3, 3});
    auto y = ops::conv2d(x, k, 2, 1);
    REQUIRE(y.shape() == Shape{2, 4, 3, 3});
    auto ref = conv2d_reference(x.data(), 2, 3, 5, 5, k.data(), 4, 3, 3, 2, 1, 3, 3);
    for (size_t i = 0; i < ref.size(); ++i)
        CHECK(y.data()[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("conv2d rejects channel mismatch naming the dimension") {
    auto x = Tensor::zeros({1, 3, 4, 4});
    auto k = Tensor::zeros({2, 4, 3, 3});
    CHECK_THROWS_WITH_AS(ops::conv2d(x, k, 1, 1),
                         doctest::Contains("channel dimension"), ShapeError);
}

TEST_CASE("conv2d rejects nonpositive output extents") {
    auto x = Tensor::zeros({1, 1, 2, 2});
    auto k = Tensor::zeros({1, 1, 5, 5});
    CHECK_THROWS_AS(ops::conv2d(x, k, 1, 0), ShapeError);
}

TEST_CASE("softmax_cross_entropy worked examples") {
    SUBCASE("uniform logits over 5 classes -> ln 5") {
        auto logits = Tensor::filled({1, 5}, 0.3f);
        auto target = ops::onehot_rows<float>({2}, 5);
        CHECK(ops::softmax_cross_entropy(logits, target).item() ==
              doctest::Approx(std::log(5.0)).epsilon(1e-6));
    }
    SUBCASE("saturated logits -> ~0") {
        auto logits = Tensor::from_data({1, 5}, {1000, 0, 0, 0, 0});
        auto target = ops::onehot_rows<float>({0}, 5);
        CHECK(ops::softmax_cross_entropy(logits, target).item() == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("logits (1,2,3), class 2") {
        // oracle: -log(e^3 / (e^1+e^2+e^3)) evaluated in 64-bit
        double expect = -std::log(std::exp(3.0) / (std::exp(1.0) + std::exp(2.0) + std::exp(3.0)));
        auto logits = TensorD::from_data({1, 3}, {1, 2, 3});
        auto target = ops::onehot_rows<double>({2}, 3);
        CHECK(ops::softmax_cross_entropy(logits, target).item() == doctest::Approx(expect).epsilon(1e-12));
        CHECK(expect == doctest::Approx(0.40761).epsilon(1e-4));
    }
    SUBCASE("all-zero target rows are excluded from the mean") {
        auto logits = TensorD::from_data({2, 2}, {5, 0, 1, 1});
        auto target = TensorD::from_data({2, 2}, {0, 0, 1, 0});  // first site excluded
        CHECK(ops::softmax_cross_entropy(logits, target).item() ==
              doctest::Approx(std::log(2.0)).epsilon(1e-12));
    }
    SUBCASE("error when every site excluded") {
        auto logits = Tensor::zeros({2, 3});
        auto target = Tensor::zeros({2, 3});
        CHECK_THROWS_AS(ops::softmax_cross_entropy(logits, target), ValidationError);
    }
}

TEST_CASE("backward: d sum(x*x)/dx = 2x") {
    auto x = Tensor::from_data({3}, {1, 2, 3}, true);
    auto loss = ops::sum_all(ops::mul(x, x));
    backward(loss);
    CHECK(x.grad()[0] == doctest::Approx(2.0f));
    CHECK(x.grad()[1] == doctest::Approx(4.0f));
    CHECK(x.grad()[2] == doctest::Approx(6.0f));
}

TEST_CASE("backward rejects non-scalar roots") {
    auto x = Tensor::from_data({2}, {1, 2}, true);
    auto y = ops::mul(x, x);
    CHECK_THROWS_AS(backward(y), ShapeError);
}

TEST_CASE("cross-entropy gradient equals softmax minus target") {
    Rng rng(3);
    auto logits = ot::random_tensor<double>(rng, {4, 5}, -2, 2, true);
    auto target = ops::onehot_rows<double>({1, 4, 0, 2}, 5);
    auto loss = ops::softmax_cross_entropy(logits, target);
    backward(loss);
    auto sm = ops::softmax_rows(logits.detach());
    for (int s = 0; s < 4; ++s)
        for (int c = 0; c < 5; ++c) {
            double expect = (sm.data()[static_cast<size_t>(s) * 5 + c] -
                             target.data()[static_cast<size_t>(s) * 5 + c]) /
                            4.0;
            CHECK(logits.grad()[static_cast<size_t>(s) * 5 + c] ==
                  doctest::Approx(expect).epsilon(1e-9));
        }
}

TEST_CASE("conv2d kernel gradient matches finite differences on 1x1x4x4 input") {
    Rng rng(23);
    auto x = ot::random_tensor<double>(rng, {1, 1, 4, 4});
    auto k = ot::random_tensor<double>(rng, {2, 1, 3, 3});
    auto res = gradcheck([&] { return ops::mean_all(ops::conv2d(x, k, 1, 1)); }, {x, k});
    CHECK(res.ok(1e-4));
}

// Randomized finite-difference checks for every differentiable op, 5 shapes
// each, 64-bit, central differences.
TEST_CASE("finite-difference sweep across all differentiable ops") {
    Rng rng(1234);
    // Scalarize op outputs through a fixed random linear functional.
    auto fd_ok = [&rng](const std::function<TensorD()>& out_fn, std::vector<TensorD> leaves) {
        TensorD w = ot::random_tensor<double>(rng, out_fn().shape());
        auto res = gradcheck([&out_fn, &w] { return ops::sum_all(ops::mul(out_fn(), w)); },
                             std::move(leaves));
        return res.ok(1e-4);
    };
    for (int trial = 0; trial < 5; ++trial) {
        int N = rng.uniform_int(1, 2), C = rng.uniform_int(1, 3);
        int H = rng.uniform_int(3, 6), W = rng.uniform_int(3, 6);
        int S = rng.uniform_int(2, 6), C2 = rng.uniform_int(2, 5);

        {
            auto a = ot::random_tensor<double>(rng, {S, C2});
            auto b = ot::random_tensor<double>(rng, {S, C2});
            CHECK(fd_ok([&] { return ops::add(a, b); }, {a, b}));
            CHECK(fd_ok([&] { return ops::sub(a, b); }, {a, b}));
            CHECK(fd_ok([&] { return ops::mul(a, b); }, {a, b}));
            CHECK(fd_ok([&] { return ops::affine(a, 2.5, -0.5); }, {a}));
            CHECK(gradcheck([&] { return ops::mse_loss(a, b); }, {a, b}).ok(1e-4));
            CHECK(fd_ok([&] { return ops::sigmoid(a); }, {a}));
            CHECK(fd_ok([&] { return ops::tanh_op(a); }, {a}));
            CHECK(fd_ok([&] { return ops::softmax_rows(a); }, {a}));
            CHECK(gradcheck([&] { return ops::mean_all(a); }, {a}).ok(1e-4));
            CHECK(gradcheck([&] { return ops::sum_all(a); }, {a}).ok(1e-4));
            CHECK(fd_ok([&] { return ops::concat_axis1(a, b); }, {a, b}));
        }
        {
            // kink-free inputs for relu / leaky / l1
            auto a = ot::random_tensor_away_from<double>(rng, {S, C2}, 0.05);
            auto b = ot::random_tensor<double>(rng, {S, C2}, 2.0, 3.0);
            CHECK(fd_ok([&] { return ops::relu(a); }, {a}));
            CHECK(fd_ok([&] { return ops::leaky_relu(a, 0.2); }, {a}));
            CHECK(gradcheck([&] { return ops::l1_loss(a, b); }, {a, b}).ok(1e-4));
        }
        {
            int M = rng.uniform_int(2, 4), K = rng.uniform_int(2, 4), P = rng.uniform_int(2, 4);
            auto a = ot::random_tensor<double>(rng, {M, K});
            auto b = ot::random_tensor<double>(rng, {K, P});
            CHECK(fd_ok([&] { return ops::matmul(a, b); }, {a, b}));
            auto bias = ot::random_tensor<double>(rng, {K});
            auto rows = ot::random_tensor<double>(rng, {M, K});
            CHECK(fd_ok([&] { return ops::add_row_bias(rows, bias); }, {rows, bias}));
        }
        {
            auto x = ot::random_tensor<double>(rng, {N, C, H, W});
            int O = rng.uniform_int(1, 3);
            auto k = ot::random_tensor<double>(rng, {O, C, 3, 3});
            int stride = rng.uniform_int(1, 2);
            CHECK(fd_ok([&] { return ops::conv2d(x, k, stride, 1); }, {x, k}));
            auto kt = ot::random_tensor<double>(rng, {C, O, 4, 4});
            CHECK(fd_ok([&] { return ops::conv_transpose2d(x, kt, 2, 1); }, {x, kt}));
            auto bias = ot::random_tensor<double>(rng, {C});
            CHECK(fd_ok([&] { return ops::add_channel_bias(x, bias); }, {x, bias}));
            CHECK(fd_ok([&] { return ops::softmax_channels(x); }, {x}));
            CHECK(fd_ok([&] { return ops::chw_to_sites(x); }, {x}));
            CHECK(fd_ok([&] { return ops::resize_bilinear(x, H * 2, W * 2); }, {x}));
            CHECK(fd_ok([&] { return ops::resize_bilinear(x, std::max(1, H / 2), std::max(1, W / 2)); }, {x}));
        }
        {
            auto logits = ot::random_tensor<double>(rng, {S, C2}, -2, 2);
            std::vector<int> cls(static_cast<size_t>(S));
            for (auto& c : cls) c = rng.uniform_int(0, C2 - 1);
            auto target = ops::onehot_rows<double>(cls, C2);
            CHECK(gradcheck([&] { return ops::softmax_cross_entropy(logits, target); }, {logits}).ok(1e-4));
        }
        {
            // propagation kernel; random features make top-K ties measure-zero
            int Ss = rng.uniform_int(3, 8), St = rng.uniform_int(2, 6), D = rng.uniform_int(2, 4);
            auto fs = ot::random_tensor<double>(rng, {Ss, D}, -1, 1);
            auto ft = ot::random_tensor<double>(rng, {St, D}, -1, 1);
            auto y = ot::random_tensor<double>(rng, {Ss, C2}, 0.05, 1.0);
            int K = rng.uniform_int(1, Ss);
            CHECK(fd_ok([&] { return ops::cosine_topk_propagate(fs, ft, y, K); }, {fs, ft, y}));
            CHECK(fd_ok([&] { return ops::nearest_feature_copy(fs, ft, y); }, {y}));
        }
    }
}

TEST_CASE("softmax rows sum to one at every site") {
    Rng rng(99);
    for (int t = 0; t < 20; ++t) {
        auto x = ot::random_tensor<float>(rng, {rng.uniform_int(1, 8), rng.uniform_int(2, 7)}, -30, 30);
        auto y = ops::softmax_rows(x);
        int S = y.dim(0), C = y.dim(1);
        for (int s = 0; s < S; ++s) {
            float sum = 0;
            for (int c = 0; c < C; ++c) sum += y.data()[static_cast<size_t>(s) * C + c];
            CHECK(sum == doctest::Approx(1.0f).epsilon(1e-6));
        }
    }
}

TEST_CASE("forward results are bitwise deterministic for a fixed seed") {
    auto run = [] {
        Rng rng(4242);
        auto x = ot::random_tensor<float>(rng, {1, 3, 8, 8});
        auto k = ot::random_tensor<float>(rng, {4, 3, 3, 3});
        auto y = ops::softmax_channels(ops::conv2d(x, k, 2, 1));
        return y.data();
    };
    auto a = run(), b = run();
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("gradients are finite after backward on a deep graph") {
    Rng rng(5);
    auto x = ot::random_tensor<float>(rng, {1, 3, 16, 16}, -1, 1, true);
    auto k1 = ot::random_tensor<float>(rng, {8, 3, 3, 3});
    k1.set_requires_grad(true);
    auto k2 = ot::random_tensor<float>(rng, {8, 8, 3, 3});
    k2.set_requires_grad(true);
    auto h = ops::relu(ops::conv2d(x, k1, 2, 1));
    auto loss = ops::mean_all(ops::relu(ops::conv2d(h, k2, 1, 1)));
    backward(loss);  // throws on any non-finite gradient
    for (float g : x.grad()) CHECK(std::isfinite(g));
    for (float g : k1.grad()) CHECK(std::isfinite(g));
}

TEST_CASE("transposed conv output extent") {
    auto x = Tensor::filled({1, 2, 3, 3}, 1.0f);
    auto k = Tensor::filled({2, 3, 4, 4}, 0.5f);
    auto y = ops::conv_transpose2d(x, k, 2, 1);
    CHECK(y.shape() == Shape{1, 3, 6, 6});
}
