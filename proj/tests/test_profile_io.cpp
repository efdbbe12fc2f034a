#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "dmscope/observer.hpp"
#include "dmscope/profile_io.hpp"
#include "dmscope/synthcorpus.hpp"
#include "test_util.hpp"

using namespace dmscope;
using nlohmann::json;
using testutil::TempDir;

namespace {

DomainReference sample_reference(bool calibrated) {
    CorpusSpec spec;
    spec.kind = CorpusKind::kGradient;
    spec.count = 25;
    spec.height = 16;
    spec.width = 16;
    spec.seed = 60;
    const auto corpus = generate_corpus(spec);
    auto ref = build_reference(corpus.images, Reconstructor::pseudo_noise(0.3, 17),
                               BinningConfig::default_psnr(), spec.describe());
    if (calibrated) {
        spec.seed = 61;
        ref = calibrate(std::move(ref), generate_corpus(spec).images);
    }
    return ref;
}

}  // namespace

TEST_CASE("profile JSON round-trips losslessly") {
    for (bool calibrated : {false, true}) {
        const DomainReference ref = sample_reference(calibrated);
        const json j = profile_to_json(ref);
        CHECK(j.at("format_version") == kProfileFormatVersion);
        CHECK(j.at("created_from") == ref.created_from);

        const DomainReference back = profile_from_json(j);
        CHECK(back.histogram.binning() == ref.histogram.binning());
        CHECK(back.histogram.total() == ref.histogram.total());
        CHECK(std::equal(ref.histogram.counts().begin(), ref.histogram.counts().end(),
                         back.histogram.counts().begin()));
        CHECK(back.reconstructor.kind() == ref.reconstructor.kind());
        CHECK(back.reconstructor.amplitude() == ref.reconstructor.amplitude());
        CHECK(back.reconstructor.seed() == ref.reconstructor.seed());
        CHECK(back.created_from == ref.created_from);
        REQUIRE(back.calibrated() == calibrated);
        if (calibrated) {
            CHECK(back.calibration->validation_dm_dB == ref.calibration->validation_dm_dB);
            CHECK(back.calibration->threshold_dB == ref.calibration->threshold_dB);
        }
    }
}

TEST_CASE("profiles survive a save/load cycle on disk") {
    TempDir dir("profile");
    const DomainReference ref = sample_reference(true);
    save_profile(ref, dir.path() / "ref.json");
    const DomainReference back = load_profile(dir.path() / "ref.json");
    CHECK(back.calibration->threshold_dB == ref.calibration->threshold_dB);
    CHECK(std::equal(ref.histogram.counts().begin(), ref.histogram.counts().end(),
                     back.histogram.counts().begin()));

    CHECK_THROWS_AS(load_profile(dir.path() / "missing.json"), std::runtime_error);
}

TEST_CASE("malformed profiles are rejected") {
    const DomainReference ref = sample_reference(false);
    json j = profile_to_json(ref);

    json wrong_version = j;
    wrong_version["format_version"] = 999;
    CHECK_THROWS_AS(profile_from_json(wrong_version), std::runtime_error);

    json wrong_total = j;
    wrong_total["total"] = ref.histogram.total() + 1;
    CHECK_THROWS_AS(profile_from_json(wrong_total), std::runtime_error);

    json missing_field = j;
    missing_field.erase("binning");
    CHECK_THROWS_AS(profile_from_json(missing_field), json::exception);

    json bad_recon = j;
    bad_recon["reconstructor"]["kind"] = "transformer";
    CHECK_THROWS_AS(profile_from_json(bad_recon), std::runtime_error);

    TempDir dir("profile_bad");
    std::ofstream(dir.path() / "garbled.json") << "{not json";
    CHECK_THROWS_AS(load_profile(dir.path() / "garbled.json"), std::runtime_error);
}

TEST_CASE("reconstructor descriptors round-trip for every kind") {
    for (const auto& r : {Reconstructor::identity(), Reconstructor::quantize(12),
                          Reconstructor::blur_resample(8),
                          Reconstructor::pseudo_noise(0.125, 424242)}) {
        const Reconstructor back = reconstructor_from_json(reconstructor_to_json(r));
        CHECK(back.kind() == r.kind());
        CHECK(back.levels() == r.levels());
        CHECK(back.factor() == r.factor());
        CHECK(back.amplitude() == r.amplitude());
        CHECK(back.seed() == r.seed());
    }
}

TEST_CASE("report JSON round-trips including optional fields") {
    DmReport report;
    report.dm_dB = 1.234567890123456;
    report.mean_psnr_dB = 28.125;
    report.stddev_psnr_dB = 0.0625;
    report.sample_count = 100;
    report.verdict = Verdict::kOutOfDomain;
    report.threshold_dB = 0.51;
    report.reference_id = "ref-a";
    report.timestamp_unix = 1700000000;
    report.window_index = 3;

    const DmReport back = report_from_json(report_to_json(report));
    CHECK(back.dm_dB == report.dm_dB);
    CHECK(back.mean_psnr_dB == report.mean_psnr_dB);
    CHECK(back.stddev_psnr_dB == report.stddev_psnr_dB);
    CHECK(back.sample_count == report.sample_count);
    CHECK(back.verdict == report.verdict);
    CHECK(back.threshold_dB == report.threshold_dB);
    CHECK(back.reference_id == report.reference_id);
    CHECK(back.timestamp_unix == report.timestamp_unix);
    CHECK(back.window_index == report.window_index);

    // uncalibrated reports keep a null threshold and no window index
    report.threshold_dB.reset();
    report.window_index.reset();
    report.verdict = Verdict::kUncalibrated;
    const json j = report_to_json(report);
    CHECK(j.at("threshold_dB").is_null());
    CHECK_FALSE(j.contains("window_index"));
    const DmReport plain = report_from_json(j);
    CHECK_FALSE(plain.threshold_dB.has_value());
    CHECK_FALSE(plain.window_index.has_value());
}

TEST_CASE("histogram CSV carries one row per bin at full precision") {
    const BinningConfig binning(10.0, 13.0, 1.0);
    const auto h = build_histogram(std::vector<double>{10.5, 11.5, 11.6}, binning);
    std::ostringstream out;
    write_histogram_csv(h, out);

    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "bin_lo_dB,bin_hi_dB,count,mass");
    std::getline(lines, line);
    CHECK(line == "10,11,1,0.33333333333333331");
    std::getline(lines, line);
    CHECK(line == "11,12,2,0.66666666666666663");
    std::getline(lines, line);
    CHECK(line == "12,13,0,0");
    CHECK_FALSE(std::getline(lines, line));
}
