#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spnlab/error.hpp"
#include "spnlab/metrics.hpp"
#include "spnlab/rng.hpp"
#include "spnlab/stats.hpp"

using namespace spnlab;

TEST_CASE("dice worked example") {
    // 2x2: pred (1,1,0,2), gt (1,0,0,2) -> class1 = 2/3, class2 = 1, mean 5/6
    std::vector<uint8_t> pred = {1, 1, 0, 2}, gt = {1, 0, 0, 2};
    auto r = dice(pred, gt);
    CHECK(r.per_class.at(1) == doctest::Approx(2.0 / 3.0));
    CHECK(r.per_class.at(2) == doctest::Approx(1.0));
    CHECK(r.per_class.count(3) == 0);
    CHECK(r.mean == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("dice of identical nonempty masks is 1 per class") {
    std::vector<uint8_t> m = {0, 1, 2, 3, 4, 4, 1, 0};
    auto r = dice(m, m);
    for (const auto& [c, d] : r.per_class) CHECK(d == doctest::Approx(1.0));
    CHECK(r.mean == doctest::Approx(1.0));
}

TEST_CASE("dice of disjoint single-class foregrounds is 0") {
    std::vector<uint8_t> pred = {1, 0, 0, 0}, gt = {0, 0, 0, 1};
    auto r = dice(pred, gt);
    CHECK(r.per_class.at(1) == doctest::Approx(0.0));
    CHECK(r.mean == doctest::Approx(0.0));
}

TEST_CASE("dice is symmetric and permutes with class relabeling") {
    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
        std::vector<uint8_t> a(64), b(64);
        for (auto& v : a) v = static_cast<uint8_t>(rng.uniform_int(0, 4));
        for (auto& v : b) v = static_cast<uint8_t>(rng.uniform_int(0, 4));
        auto r1 = dice(a, b), r2 = dice(b, a);
        CHECK(r1.mean == doctest::Approx(r2.mean));
        // swap classes 1 and 2 in both masks
        auto swap12 = [](std::vector<uint8_t> m) {
            for (auto& v : m) v = v == 1 ? 2 : (v == 2 ? 1 : v);
            return m;
        };
        auto r3 = dice(swap12(a), swap12(b));
        if (r1.per_class.count(1)) CHECK(r3.per_class.at(2) == doctest::Approx(r1.per_class.at(1)));
        if (r1.per_class.count(2)) CHECK(r3.per_class.at(1) == doctest::Approx(r1.per_class.at(2)));
    }
}

TEST_CASE("pck threshold behavior") {
    SUBCASE("pred equals gt -> 1") {
        std::vector<float> gt = {3, 4, 1, 10, 2, 1};
        std::vector<float> pred = {3, 4, 10, 2};
        CHECK(*pck_frame(pred, gt, 7, 9, 0.1) == doctest::Approx(1.0));
    }
    SUBCASE("bbox 10x20, delta 0.1 -> threshold 2.0, distances (1.9, 2.1) -> 0.5") {
        std::vector<float> gt = {0, 0, 1, 10, 10, 1};
        std::vector<float> pred = {1.9f, 0, 10, 12.1f};
        CHECK(*pck_frame(pred, gt, 10, 20, 0.1) == doctest::Approx(0.5));
    }
    SUBCASE("boundary distance exactly at threshold counts as correct") {
        std::vector<float> gt = {0, 0, 1};
        std::vector<float> pred = {2.0f, 0};
        CHECK(*pck_frame(pred, gt, 10, 20, 0.1) == doctest::Approx(1.0));
    }
    SUBCASE("huge delta -> 1") {
        std::vector<float> gt = {0, 0, 1, 50, 50, 1};
        std::vector<float> pred = {100, 100, -100, -100};
        CHECK(*pck_frame(pred, gt, 10, 10, 1e9) == doctest::Approx(1.0));
    }
    SUBCASE("no visible joints -> excluded") {
        std::vector<float> gt = {0, 0, 0, 5, 5, 0};
        std::vector<float> pred = {0, 0, 5, 5};
        CHECK(!pck_frame(pred, gt, 10, 10, 0.1).has_value());
    }
    SUBCASE("pck is nondecreasing in delta") {
        Rng rng(5);
        std::vector<float> gt, pred;
        for (int j = 0; j < 10; ++j) {
            gt.push_back(static_cast<float>(rng.uniform(0, 30)));
            gt.push_back(static_cast<float>(rng.uniform(0, 30)));
            gt.push_back(1);
            pred.push_back(static_cast<float>(rng.uniform(0, 30)));
            pred.push_back(static_cast<float>(rng.uniform(0, 30)));
        }
        double prev = 0;
        for (double delta : {0.01, 0.05, 0.1, 0.3, 0.5, 1.0, 2.0}) {
            double v = *pck_frame(pred, gt, 30, 30, delta);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("auc worked examples") {
    SUBCASE("perfectly separated -> 1") {
        auto m = auc_sens_spec({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}, 0.5);
        CHECK(m.auc == doctest::Approx(1.0));
        CHECK(m.sensitivity == doctest::Approx(1.0));
        CHECK(m.specificity == doctest::Approx(1.0));
    }
    SUBCASE("scores (0.9, 0.8, 0.4), labels (1, 0, 1) -> 0.5") {
        // brute force over the 2 pos/neg pairs: (0.9 vs 0.8) wins, (0.4 vs 0.8) loses
        auto m = auc_sens_spec({0.9, 0.8, 0.4}, {1, 0, 1}, 0.5);
        CHECK(m.auc == doctest::Approx(0.5));
    }
    SUBCASE("all scores equal -> 0.5") {
        auto m = auc_sens_spec({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}, 0.5);
        CHECK(m.auc == doctest::Approx(0.5));
    }
    SUBCASE("single-class input rejected") {
        std::vector<double> scores = {0.5, 0.4};
        std::vector<int> labels = {1, 1};
        CHECK_THROWS_AS(auc_sens_spec(scores, labels, 0.5), ValidationError);
    }
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
    Rng rng(71);
    for (int t = 0; t < 100; ++t) {
        int n = rng.uniform_int(4, 20);
        std::vector<double> scores(static_cast<size_t>(n));
        std::vector<int> labels(static_cast<size_t>(n));
        bool has0 = false, has1 = false;
        for (int i = 0; i < n; ++i) {
            scores[static_cast<size_t>(i)] = rng.uniform(-3, 3);
            labels[static_cast<size_t>(i)] = rng.bernoulli(0.5) ? 1 : 0;
            (labels[static_cast<size_t>(i)] ? has1 : has0) = true;
        }
        if (!has0) labels[0] = 0;
        if (!has1) labels[1] = 1;
        auto base = auc_sens_spec(scores, labels, 0.0).auc;
        auto t1 = scores, t2 = scores;
        for (auto& v : t1) v = std::exp(0.7 * v);
        for (auto& v : t2) v = std::atan(v) * 2 + 11;
        CHECK(auc_sens_spec(t1, labels, 0.0).auc == doctest::Approx(base));
        CHECK(auc_sens_spec(t2, labels, 0.0).auc == doctest::Approx(base));
    }
}

TEST_CASE("wilcoxon worked examples") {
    SUBCASE("all positive, n=5 -> exact 1/32") {
        CHECK(wilcoxon_one_sided({1, 2, 3, 4, 5}) == doctest::Approx(1.0 / 32.0));
    }
    SUBCASE("symmetric +- pairs of equal magnitude -> p >= 0.5") {
        CHECK(wilcoxon_one_sided({1, -1, 2, -2, 3, -3}) >= 0.5);
    }
    SUBCASE("n=22 all positive -> p < 0.001 via normal approximation") {
        std::vector<double> d;
        for (int i = 1; i <= 22; ++i) d.push_back(i * 0.1);
        CHECK(wilcoxon_one_sided(d) < 0.001);
    }
    SUBCASE("zero differences dropped; too few nonzero rejected") {
        std::vector<double> d = {0, 0, 0, 1, 2, 3, 4};
        CHECK_THROWS_AS(wilcoxon_one_sided(d), ValidationError);
    }
}

TEST_CASE("wilcoxon exact and normal branches agree within 0.01 at n=20") {
    Rng rng(2024);
    for (int t = 0; t < 30; ++t) {
        std::vector<double> d(20);
        for (auto& v : d) v = rng.uniform(-1, 1) + 0.15;  // mild positive shift
        double pe = wilcoxon_one_sided(d, WilcoxonMethod::Exact);
        double pn = wilcoxon_one_sided(d, WilcoxonMethod::Normal);
        CHECK(std::abs(pe - pn) < 0.01);
    }
}

TEST_CASE("normal quantile matches known values") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(normal_quantile(0.98) == doctest::Approx(2.05374891).epsilon(1e-6));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.95996398).epsilon(1e-6));
    CHECK(normal_cdf(normal_quantile(0.9)) == doctest::Approx(0.9).epsilon(1e-8));
}
