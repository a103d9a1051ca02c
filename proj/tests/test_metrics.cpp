#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "uwsim/metrics.hpp"
#include <stdexcept>

using namespace uwsim;
using namespace uwsim::test;

namespace {

DepthMap plane_of(std::initializer_list<double> vals) {
    DepthMap d(1, static_cast<int>(vals.size()));
    int x = 0;
    for (double v : vals) d.at(x++, 0) = v;
    return d;
}

} // namespace

TEST_CASE("rel error pinned values") {
    CHECK(rel_error(plane_of({1, 2, 4}), plane_of({1, 2, 4})) == 0.0);
    CHECK(rel_error(plane_of({2, 2}), plane_of({1, 1})) == doctest::Approx(0.5));
    CHECK(rel_error(plane_of({1, 2, 4}), plane_of({1.1, 1.8, 4.4})) == doctest::Approx(0.1));
    CHECK_THROWS_AS(rel_error(plane_of({0.0, 1.0}), plane_of({1, 1})), std::invalid_argument);
}

TEST_CASE("rms error pinned values") {
    CHECK(rms_error(plane_of({1, 2}), plane_of({1, 2})) == 0.0);
    CHECK(rms_error(plane_of({0.0, 0.0}), plane_of({3, 3})) == doctest::Approx(3.0));
    CHECK(rms_error(plane_of({0.0, 0.0}), plane_of({3, 4})) ==
          doctest::Approx(3.5355339059327378).epsilon(1e-12));
}

TEST_CASE("log10 error pinned values") {
    CHECK(log10_error(plane_of({5, 5}), plane_of({5, 5})) == 0.0);
    CHECK(log10_error(plane_of({10}), plane_of({1})) == doctest::Approx(1.0));
    CHECK(log10_error(plane_of({2}), plane_of({5})) ==
          doctest::Approx(0.39794000867203766).epsilon(1e-12));
    CHECK_THROWS_AS(log10_error(plane_of({2}), plane_of({0.0})), std::invalid_argument);
}

TEST_CASE("threshold accuracy pinned values and nesting") {
    CHECK(delta_accuracy(plane_of({1, 2, 3}), plane_of({1, 2, 3}), 1) == 1.0);
    CHECK(delta_accuracy(plane_of({1}), plane_of({0.9}), 1) == 1.0);   // ratio 1.11 < 1.25
    CHECK(delta_accuracy(plane_of({1}), plane_of({0.7}), 1) == 0.0);   // ratio 1.4286
    CHECK(delta_accuracy(plane_of({1}), plane_of({0.7}), 2) == 1.0);   // < 1.5625
    CHECK(delta_accuracy(plane_of({1}), plane_of({0.7}), 3) == 1.0);
    CHECK_THROWS_AS(delta_accuracy(plane_of({1}), plane_of({1}), 4), std::invalid_argument);

    SUBCASE("strict inequality at the exact threshold") {
        // ratio exactly 1.25 must NOT count
        CHECK(delta_accuracy(plane_of({1.25}), plane_of({1.0}), 1) == 0.0);
    }
    SUBCASE("nesting holds on random planes") {
        for (int trial = 0; trial < 20; ++trial) {
            const DepthMap y = random_depth(16, 16, 100 + trial, 0.4, 10.0);
            const DepthMap yh = random_depth(16, 16, 200 + trial, 0.4, 10.0);
            const double d1 = delta_accuracy(y, yh, 1);
            const double d2 = delta_accuracy(y, yh, 2);
            const double d3 = delta_accuracy(y, yh, 3);
            CHECK(d1 <= d2);
            CHECK(d2 <= d3);
        }
    }
}

TEST_CASE("metric symmetries") {
    const DepthMap y = random_depth(16, 16, 41, 0.5, 9.0);
    const DepthMap yh = random_depth(16, 16, 42, 0.5, 9.0);
    CHECK(rms_error(y, yh) == rms_error(yh, y));
    CHECK(log10_error(y, yh) == log10_error(yh, y));
    CHECK(delta_accuracy(y, yh, 2) == delta_accuracy(yh, y, 2));
    CHECK(rel_error(y, yh) != rel_error(yh, y)); // denominator is the reference
}

TEST_CASE("ssim basics") {
    SUBCASE("self similarity is exactly one") {
        const DepthMap a = random_depth(16, 16, 51, 0.0, 1.0);
        CHECK(ssim(a, a) == 1.0);
        const ImagePlane img = random_image(16, 16, 52);
        CHECK(ssim(img, img) == 1.0);
    }
    SUBCASE("structural inversion lowers similarity") {
        const ImagePlane a = random_image(20, 20, 53);
        ImagePlane b(20, 20);
        for (std::size_t i = 0; i < b.data().size(); ++i) b.data()[i] = 1.0f - a.data()[i];
        CHECK(ssim(a, b) < 1.0);
    }
    SUBCASE("matching constants score one through the stabilizers") {
        DepthMap a(16, 16, 0.5), b(16, 16, 0.5);
        CHECK(ssim(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("range stays within [-1, 1]") {
        for (int trial = 0; trial < 10; ++trial) {
            const DepthMap a = random_depth(16, 16, 60 + trial, 0.0, 1.0);
            const DepthMap b = random_depth(16, 16, 70 + trial, 0.0, 1.0);
            const double v = ssim(a, b);
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    }
    SUBCASE("window larger than the image is an error") {
        DepthMap a(8, 8, 0.5);
        CHECK_THROWS_AS(ssim(a, a), std::invalid_argument);
    }
}

TEST_CASE("every metric agrees with the brute-force oracle on random planes") {
    for (int trial = 0; trial < 100; ++trial) {
        const DepthMap y = random_depth(16, 16, 1000 + trial, 0.4, 10.0);
        const DepthMap yh = random_depth(16, 16, 2000 + trial, 0.4, 10.0);
        const auto yd = to_doubles(y);
        const auto yhd = to_doubles(yh);
        CHECK(rel_error(y, yh) == doctest::Approx(oracle_rel(yd, yhd)).epsilon(1e-10));
        CHECK(rms_error(y, yh) == doctest::Approx(oracle_rms(yd, yhd)).epsilon(1e-10));
        CHECK(log10_error(y, yh) == doctest::Approx(oracle_log10(yd, yhd)).epsilon(1e-10));
        for (int i = 1; i <= 3; ++i) {
            CHECK(delta_accuracy(y, yh, i) == oracle_delta(yd, yhd, i));
        }
        CHECK(ssim(y, yh) ==
              doctest::Approx(oracle_ssim_plane(yd, yhd, 16, 16)).epsilon(1e-10));
    }
}

TEST_CASE("rgb metrics run across channels and average ssim") {
    const ImagePlane y = random_image(16, 16, 81, 0.05f, 1.0f);
    const ImagePlane yh = random_image(16, 16, 82, 0.05f, 1.0f);
    double expect_ssim = 0.0;
    for (int c = 0; c < 3; ++c) {
        expect_ssim += oracle_ssim_plane(channel_doubles(y, c), channel_doubles(yh, c), 16, 16);
    }
    CHECK(ssim(y, yh) == doctest::Approx(expect_ssim / 3.0).epsilon(1e-10));
    CHECK(rel_error(y, yh) ==
          doctest::Approx(oracle_rel(to_doubles(y), to_doubles(yh))).epsilon(1e-10));
}

TEST_CASE("report serialization carries every field") {
    const DepthMap y = random_depth(16, 16, 91, 0.5, 2.0);
    const MetricsReport r = evaluate_pair(y, y);
    CHECK(r.rel == 0.0);
    CHECK(r.rms == 0.0);
    CHECK(r.log10_err == 0.0);
    CHECK(r.delta1 == 1.0);
    CHECK(r.delta2 == 1.0);
    CHECK(r.delta3 == 1.0);
    CHECK(r.ssim == 1.0);
    CHECK(r.n_pixels == 256);
    const std::string kv = r.to_kv();
    CHECK(kv.find("rel=0") != std::string::npos);
    CHECK(kv.find("ssim=1") != std::string::npos);
    CHECK(kv.find("n_pixels=256") != std::string::npos);
    const std::string js = r.to_json_string();
    CHECK(js.find("\"delta1\":1.0") != std::string::npos);
}
