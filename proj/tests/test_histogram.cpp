#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include "dmscope/histogram.hpp"
#include "dmscope/reconstruction.hpp"
#include "dmscope/synthcorpus.hpp"

using namespace dmscope;

TEST_CASE("binning validates its grid") {
    CHECK_THROWS_AS(BinningConfig(10.0, 10.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BinningConfig(20.0, 10.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BinningConfig(10.0, 20.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BinningConfig(10.0, 20.0, 3.0), std::invalid_argument);  // 10/3 bins
    CHECK(BinningConfig(10.0, 45.0, 0.5).bin_count() == 70);
    CHECK(BinningConfig::default_psnr().bin_count() == 70);
}

TEST_CASE("scores land in floor bins with edge clamping") {
    BinningConfig binning(10.0, 40.0, 1.0);
    CHECK(binning.bin_index(10.0) == 0);    // exactly at lo
    CHECK(binning.bin_index(10.999) == 0);
    CHECK(binning.bin_index(11.0) == 1);
    CHECK(binning.bin_index(39.999) == 29);
    CHECK(binning.bin_index(40.0) == 29);   // hi clamps into the top bin
    CHECK(binning.bin_index(5.0) == 0);     // below support
    CHECK(binning.bin_index(99.0) == 29);   // the PSNR cap clamps too
}

TEST_CASE("build_histogram matches the worked example") {
    BinningConfig binning(10.0, 40.0, 1.0);
    const std::vector<double> scores{10.0, 10.0, 40.0};
    const PerformanceHistogram h = build_histogram(scores, binning);
    CHECK(h.counts()[0] == 2);
    CHECK(h.counts()[29] == 1);
    CHECK(h.total() == 3);

    std::uint64_t sum = 0;
    for (auto c : h.counts()) sum += c;
    CHECK(sum == h.total());
}

TEST_CASE("build_histogram rejects empty input") {
    CHECK_THROWS_AS(build_histogram({}, BinningConfig::default_psnr()), std::invalid_argument);
}

TEST_CASE("histograms conserve every score; clamping never drops") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> wild(-50.0, 150.0);  // far outside support
    std::vector<double> scores(500);
    for (auto& s : scores) s = wild(rng);
    const auto h = build_histogram(scores, BinningConfig::default_psnr());
    CHECK(h.total() == scores.size());
}

TEST_CASE("building is permutation-invariant and merge equals whole-build") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> dist(12.0, 43.0);
    std::vector<double> scores(1000);
    for (auto& s : scores) s = dist(rng);
    const BinningConfig binning = BinningConfig::default_psnr();
    const auto whole = build_histogram(scores, binning);

    std::vector<double> shuffled = scores;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto permuted = build_histogram(shuffled, binning);
    CHECK(std::equal(whole.counts().begin(), whole.counts().end(), permuted.counts().begin()));

    for (std::size_t split : {1UL, 250UL, 999UL}) {
        const auto left = build_histogram({scores.data(), split}, binning);
        const auto right = build_histogram({scores.data() + split, scores.size() - split}, binning);
        const auto merged = merge(left, right);
        CHECK(merged.total() == whole.total());
        CHECK(std::equal(whole.counts().begin(), whole.counts().end(), merged.counts().begin()));

        const auto merged_flipped = merge(right, left);
        CHECK(std::equal(merged.counts().begin(), merged.counts().end(),
                         merged_flipped.counts().begin()));
    }

    // the all-zero histogram is the merge identity
    const PerformanceHistogram zero(binning);
    const auto same = merge(whole, zero);
    CHECK(std::equal(whole.counts().begin(), whole.counts().end(), same.counts().begin()));
}

TEST_CASE("merge requires identical binning") {
    const PerformanceHistogram a(BinningConfig(10.0, 40.0, 1.0));
    const PerformanceHistogram b(BinningConfig(10.0, 40.0, 0.5));
    CHECK_THROWS_AS(merge(a, b), std::invalid_argument);
}

TEST_CASE("shifting interior scores by k bin widths shifts counts by k bins") {
    const BinningConfig binning(10.0, 45.0, 0.5);
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> bin_pick(8, 40);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    std::vector<double> scores(300);
    for (auto& s : scores) {
        s = binning.bin_center(static_cast<std::size_t>(bin_pick(rng))) + jitter(rng) * 0.5;
    }
    const auto base = build_histogram(scores, binning);

    for (int k : {1, 3, 7}) {
        std::vector<double> shifted = scores;
        for (auto& s : shifted) s += k * 0.5;
        const auto moved = build_histogram(shifted, binning);
        for (std::size_t bin = 0; bin + k < binning.bin_count(); ++bin) {
            REQUIRE(moved.counts()[bin + static_cast<std::size_t>(k)] == base.counts()[bin]);
        }
    }
}

TEST_CASE("normalized masses sum to one") {
    const auto h = build_histogram(std::vector<double>{12.0, 15.0, 15.2, 44.0},
                                   BinningConfig::default_psnr());
    const auto mass = normalize_histogram(h);
    double sum = 0.0;
    for (double m : mass) sum += m;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(normalize_histogram(PerformanceHistogram(BinningConfig::default_psnr())),
                    std::invalid_argument);
}

TEST_CASE("summary stats are the mass-weighted bin-center moments") {
    // two scores in bin 0 (center 10.5), two in bin 2 (center 12.5)
    BinningConfig binning(10.0, 20.0, 1.0);
    const auto h =
        build_histogram(std::vector<double>{10.1, 10.2, 12.1, 12.9}, binning);
    const auto stats = summary_stats(h);
    CHECK(stats.mean_dB == doctest::Approx(11.5).epsilon(1e-12));
    CHECK(stats.stddev_dB == doctest::Approx(1.0).epsilon(1e-12));  // centers +-1 around the mean

    CHECK_THROWS_AS(summary_stats(PerformanceHistogram(binning)), std::invalid_argument);
}

TEST_CASE("partition-build-merge works across real threads") {
    CorpusSpec spec;
    spec.kind = CorpusKind::kGradient;
    spec.count = 64;
    spec.height = 16;
    spec.width = 16;
    spec.seed = 2121;
    const auto corpus = generate_corpus(spec);
    const Reconstructor recon = Reconstructor::quantize(8);  // shared, immutable
    const BinningConfig binning = BinningConfig::default_psnr();

    const auto whole = build_histogram(score_corpus(recon, corpus.images), binning);

    constexpr std::size_t kShards = 4;
    std::vector<PerformanceHistogram> parts(kShards, PerformanceHistogram(binning));
    {
        std::vector<std::thread> workers;
        const std::size_t shard = corpus.images.size() / kShards;
        for (std::size_t w = 0; w < kShards; ++w) {
            workers.emplace_back([&, w] {
                const std::span<const Image> slice(corpus.images.data() + w * shard, shard);
                parts[w] = build_histogram(score_corpus(recon, slice), binning);
            });
        }
        for (auto& t : workers) t.join();
    }

    PerformanceHistogram merged(binning);
    for (const auto& part : parts) merged = merge(merged, part);
    CHECK(merged.total() == whole.total());
    CHECK(std::equal(whole.counts().begin(), whole.counts().end(), merged.counts().begin()));
}

TEST_CASE("histogram construction from counts validates totals") {
    BinningConfig binning(0.0, 4.0, 1.0);
    const PerformanceHistogram h(binning, {1, 2, 0, 1});
    CHECK(h.total() == 4);
    CHECK_THROWS_AS(PerformanceHistogram(binning, {1, 2}), std::invalid_argument);
}
