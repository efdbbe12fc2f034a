#include <doctest.h>

#include <cmath>
#include <vector>

#include "dmscope/observer.hpp"
#include "dmscope/synthcorpus.hpp"
#include "test_util.hpp"

using namespace dmscope;

namespace {

// Flat images under quantize(2) score PSNR = 10*log10(255^2 / v^2) for a
// denormalized level v < 127.5, which pins each corpus into a chosen bin of a
// custom grid. That makes the paper's calibration arithmetic exactly testable.
std::vector<Image> flat_corpus(std::uint8_t value, std::size_t n) {
    return std::vector<Image>(n, normalize(RawImage::filled(4, 4, value)));
}

ObserverConfig tiny_batches() {
    ObserverConfig cfg;
    cfg.min_batch_for_verdict = 1;
    cfg.fixed_clock = 0;
    return cfg;
}

std::vector<Image> gradient_corpus(int count, std::uint64_t seed) {
    CorpusSpec spec;
    spec.kind = CorpusKind::kGradient;
    spec.count = count;
    spec.height = 32;
    spec.width = 32;
    spec.seed = seed;
    return generate_corpus(spec).images;
}

}  // namespace

TEST_CASE("build_reference scores the corpus and starts uncalibrated") {
    const auto images = gradient_corpus(20, 1);
    const auto ref = build_reference(images, Reconstructor::quantize(8),
                                     BinningConfig::default_psnr(), "unit-test-corpus");
    CHECK(ref.histogram.total() == 20);
    CHECK_FALSE(ref.calibrated());
    CHECK(ref.created_from == "unit-test-corpus");
    CHECK_THROWS_AS(build_reference({}, Reconstructor::identity(),
                                    BinningConfig::default_psnr()),
                    std::invalid_argument);
}

TEST_CASE("calibrating with the training corpus itself gives a zero threshold") {
    const auto images = gradient_corpus(25, 2);
    auto ref = build_reference(images, Reconstructor::quantize(8),
                               BinningConfig::default_psnr());
    ref = calibrate(std::move(ref), images);
    REQUIRE(ref.calibrated());
    CHECK(ref.calibration->validation_dm_dB == 0.0);
    CHECK(ref.calibration->threshold_dB == 0.0);

    // the degenerate threshold still admits the training corpus (dm = 0 <= 0)
    const DmReport report = evaluate_batch(ref, images, tiny_batches());
    CHECK(report.dm_dB == 0.0);
    CHECK(report.verdict == Verdict::kInScope);
}

TEST_CASE("calibration reproduces the published threshold arithmetic exactly") {
    // one-bin separation on a width-1.31 grid: validation DM = 1.31 dB
    {
        const BinningConfig binning(8.0, 21.1, 1.31);
        auto ref = build_reference(flat_corpus(100, 4), Reconstructor::quantize(2), binning);
        ref = calibrate(std::move(ref), flat_corpus(85, 4));
        CHECK(ref.calibration->validation_dm_dB == 1.31);
        CHECK(ref.calibration->threshold_dB == 2.62);
    }
    // and 0.51 dB doubles to 1.02 dB
    {
        const BinningConfig binning(8.0, 13.1, 0.51);
        auto ref = build_reference(flat_corpus(100, 4), Reconstructor::quantize(2), binning);
        ref = calibrate(std::move(ref), flat_corpus(94, 4));
        CHECK(ref.calibration->validation_dm_dB == 0.51);
        CHECK(ref.calibration->threshold_dB == 1.02);
    }
}

TEST_CASE("recalibration with the same corpus is idempotent") {
    const auto images = gradient_corpus(30, 3);
    const auto validation = gradient_corpus(15, 4);
    auto ref = build_reference(images, Reconstructor::quantize(8),
                               BinningConfig::default_psnr());
    ref = calibrate(std::move(ref), validation);
    const Calibration first = *ref.calibration;
    ref = calibrate(std::move(ref), validation);
    CHECK(ref.calibration->validation_dm_dB == first.validation_dm_dB);
    CHECK(ref.calibration->threshold_dB == first.threshold_dB);
    CHECK(ref.calibration->threshold_dB == 2.0 * ref.calibration->validation_dm_dB);
}

TEST_CASE("verdict rule: boundary counts as in scope, beyond is out of domain") {
    const BinningConfig binning(8.0, 21.1, 1.31);
    auto ref = build_reference(flat_corpus(100, 4), Reconstructor::quantize(2), binning);
    ref = calibrate(std::move(ref), flat_corpus(85, 4));  // threshold = 2.62 (two bins)

    // two bins away: dm = 2.62 = threshold exactly
    const DmReport boundary = evaluate_batch(ref, flat_corpus(75, 4), tiny_batches());
    CHECK(boundary.dm_dB == 2.62);
    CHECK(boundary.verdict == Verdict::kInScope);

    // three bins away: dm = 3.93 > threshold
    const DmReport beyond = evaluate_batch(ref, flat_corpus(62, 4), tiny_batches());
    CHECK(beyond.dm_dB > *beyond.threshold_dB);
    CHECK(beyond.verdict == Verdict::kOutOfDomain);
}

TEST_CASE("DM grows as the batch shifts further from the reference support") {
    const BinningConfig binning(8.0, 21.1, 1.31);
    auto ref = build_reference(flat_corpus(100, 4), Reconstructor::quantize(2), binning);
    ref = calibrate(std::move(ref), flat_corpus(85, 4));

    // flat levels 85 / 75 / 62 score one, two, and three bins away
    double previous = -1.0;
    for (const std::uint8_t level : {85, 75, 62}) {
        const DmReport report = evaluate_batch(ref, flat_corpus(level, 4), tiny_batches());
        CHECK(report.dm_dB > previous);
        previous = report.dm_dB;
    }
}

TEST_CASE("uncalibrated references report DM without a verdict") {
    const auto images = gradient_corpus(30, 5);
    const auto ref = build_reference(images, Reconstructor::quantize(8),
                                     BinningConfig::default_psnr());
    const DmReport report = evaluate_batch(ref, gradient_corpus(30, 6), tiny_batches());
    CHECK(report.verdict == Verdict::kUncalibrated);
    CHECK_FALSE(report.threshold_dB.has_value());
    CHECK(report.dm_dB >= 0.0);
    CHECK(report.sample_count == 30);
}

TEST_CASE("batches below the minimum size yield no scope verdict") {
    const auto images = gradient_corpus(40, 7);
    auto ref = build_reference(images, Reconstructor::quantize(8),
                               BinningConfig::default_psnr());
    ref = calibrate(std::move(ref), gradient_corpus(20, 8));

    ObserverConfig cfg;  // default min batch 30
    cfg.fixed_clock = 0;
    const auto small = gradient_corpus(10, 9);
    CHECK(evaluate_batch(ref, small, cfg).verdict == Verdict::kUncalibrated);

    cfg.min_batch_for_verdict = 10;  // explicit override restores the rule
    CHECK(evaluate_batch(ref, small, cfg).verdict != Verdict::kUncalibrated);
}

TEST_CASE("reports carry the batch PSNR moments and reference identity") {
    const auto images = gradient_corpus(30, 10);
    const auto ref = build_reference(images, Reconstructor::identity(),
                                     BinningConfig::default_psnr(), "ident-ref");
    const DmReport report = evaluate_batch(ref, images, tiny_batches());
    // identity scores the cap for every image
    CHECK(report.mean_psnr_dB == 99.0);
    CHECK(report.stddev_psnr_dB == 0.0);
    CHECK(report.reference_id == "ident-ref");
    CHECK(report.timestamp_unix == 0);
}

TEST_CASE("evaluation is deterministic given a fixed clock") {
    const auto images = gradient_corpus(35, 11);
    auto ref = build_reference(images, Reconstructor::quantize(8),
                               BinningConfig::default_psnr());
    ref = calibrate(std::move(ref), gradient_corpus(20, 12));
    const auto target = gradient_corpus(30, 13);

    const DmReport a = evaluate_batch(ref, target, tiny_batches());
    const DmReport b = evaluate_batch(ref, target, tiny_batches());
    CHECK(a.dm_dB == b.dm_dB);
    CHECK(a.mean_psnr_dB == b.mean_psnr_dB);
    CHECK(a.stddev_psnr_dB == b.stddev_psnr_dB);
    CHECK(a.verdict == b.verdict);
    CHECK(a.timestamp_unix == b.timestamp_unix);
}

TEST_CASE("sliding windows partition the stream when stride equals window") {
    const auto stream = gradient_corpus(40, 14);
    auto ref = build_reference(gradient_corpus(40, 15), Reconstructor::quantize(8),
                               BinningConfig::default_psnr());
    ref = calibrate(std::move(ref), gradient_corpus(20, 16));

    ObserverConfig cfg = tiny_batches();
    cfg.min_batch_for_verdict = 10;
    const auto reports = sliding_window_observe(ref, stream, 10, 10, cfg);
    REQUIRE(reports.size() == 4);
    for (std::size_t w = 0; w < reports.size(); ++w) {
        REQUIRE(reports[w].window_index == w);
        const DmReport direct =
            evaluate_batch(ref, std::span<const Image>(stream).subspan(w * 10, 10), cfg);
        CHECK(reports[w].dm_dB == direct.dm_dB);
        CHECK(reports[w].mean_psnr_dB == direct.mean_psnr_dB);
        CHECK(reports[w].verdict == direct.verdict);
    }
}

TEST_CASE("sliding window honors the stride and emits only complete windows") {
    const auto stream = gradient_corpus(25, 17);
    const auto ref = build_reference(stream, Reconstructor::quantize(8),
                                     BinningConfig::default_psnr());
    ObserverConfig cfg = tiny_batches();
    // positions 0, 5, 10, 15; position 20 is incomplete
    CHECK(sliding_window_observe(ref, stream, 10, 5, cfg).size() == 4);

    CHECK_THROWS_AS(sliding_window_observe(ref, stream, 9, 1, cfg), std::invalid_argument);
    CHECK_THROWS_AS(sliding_window_observe(ref, stream, 10, 0, cfg), std::invalid_argument);
    const auto short_stream = gradient_corpus(9, 18);
    CHECK_THROWS_AS(sliding_window_observe(ref, short_stream, 10, 1, cfg),
                    std::invalid_argument);
}

TEST_CASE("empty corpora are rejected everywhere") {
    const auto ref = build_reference(gradient_corpus(12, 19), Reconstructor::identity(),
                                     BinningConfig::default_psnr());
    CHECK_THROWS_AS(calibrate(ref, {}), std::invalid_argument);
    CHECK_THROWS_AS(evaluate_batch(ref, {}), std::invalid_argument);
}
