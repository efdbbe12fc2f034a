#include "dmscope/profile_io.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

namespace dmscope {

using nlohmann::json;

json reconstructor_to_json(const Reconstructor& r) {
    json params = json::object();
    switch (r.kind()) {
        case ReconKind::kIdentity:
            return {{"kind", "identity"}, {"params", params}};
        case ReconKind::kQuantize:
            params["levels"] = r.levels();
            return {{"kind", "quantize"}, {"params", params}};
        case ReconKind::kBlurResample:
            params["factor"] = r.factor();
            return {{"kind", "blur"}, {"params", params}};
        case ReconKind::kPseudoNoise:
            params["amplitude"] = r.amplitude();
            params["seed"] = r.seed();
            return {{"kind", "noise"}, {"params", params}};
    }
    throw std::logic_error("unhandled reconstructor kind");
}

Reconstructor reconstructor_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    const json& params = j.at("params");
    if (kind == "identity") return Reconstructor::identity();
    if (kind == "quantize") return Reconstructor::quantize(params.at("levels").get<int>());
    if (kind == "blur") return Reconstructor::blur_resample(params.at("factor").get<int>());
    if (kind == "noise") {
        return Reconstructor::pseudo_noise(params.at("amplitude").get<double>(),
                                           params.at("seed").get<std::uint64_t>());
    }
    throw std::runtime_error("profile: unknown reconstructor kind '" + kind + "'");
}

json profile_to_json(const DomainReference& ref) {
    json j;
    j["format_version"] = kProfileFormatVersion;
    j["binning"] = {{"lo_dB", ref.histogram.binning().lo_dB()},
                    {"hi_dB", ref.histogram.binning().hi_dB()},
                    {"width_dB", ref.histogram.binning().width_dB()}};
    j["counts"] = std::vector<std::uint64_t>(ref.histogram.counts().begin(),
                                             ref.histogram.counts().end());
    j["total"] = ref.histogram.total();
    j["reconstructor"] = reconstructor_to_json(ref.reconstructor);
    j["created_from"] = ref.created_from;
    if (ref.calibration) {
        j["calibration"] = {{"validation_dm_dB", ref.calibration->validation_dm_dB},
                            {"threshold_dB", ref.calibration->threshold_dB}};
    } else {
        j["calibration"] = nullptr;
    }
    return j;
}

DomainReference profile_from_json(const json& j) {
    const int version = j.at("format_version").get<int>();
    if (version != kProfileFormatVersion) {
        throw std::runtime_error("profile: unsupported format version " +
                                 std::to_string(version));
    }
    const json& b = j.at("binning");
    BinningConfig binning(b.at("lo_dB").get<double>(), b.at("hi_dB").get<double>(),
                          b.at("width_dB").get<double>());
    PerformanceHistogram hist(binning, j.at("counts").get<std::vector<std::uint64_t>>());
    if (hist.total() != j.at("total").get<std::uint64_t>()) {
        throw std::runtime_error("profile: counts do not sum to the recorded total");
    }

    DomainReference ref{std::move(hist), reconstructor_from_json(j.at("reconstructor")),
                        j.at("created_from").get<std::string>(), std::nullopt};
    if (j.contains("calibration") && !j.at("calibration").is_null()) {
        const json& c = j.at("calibration");
        ref.calibration = Calibration{c.at("validation_dm_dB").get<double>(),
                                      c.at("threshold_dB").get<double>()};
    }
    return ref;
}

void save_profile(const DomainReference& ref, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << profile_to_json(ref).dump(2) << "\n";
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

DomainReference load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open profile");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": invalid profile JSON: " + e.what());
    }
    try {
        return profile_from_json(j);
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": malformed profile: " + e.what());
    }
}

json report_to_json(const DmReport& report) {
    json j;
    j["dm_dB"] = report.dm_dB;
    j["mean_psnr_dB"] = report.mean_psnr_dB;
    j["stddev_psnr_dB"] = report.stddev_psnr_dB;
    j["sample_count"] = report.sample_count;
    j["verdict"] = std::string(to_string(report.verdict));
    j["threshold_dB"] = report.threshold_dB ? json(*report.threshold_dB) : json(nullptr);
    j["reference_id"] = report.reference_id;
    j["timestamp"] = report.timestamp_unix;
    if (report.window_index) j["window_index"] = *report.window_index;
    return j;
}

DmReport report_from_json(const json& j) {
    DmReport report;
    report.dm_dB = j.at("dm_dB").get<double>();
    report.mean_psnr_dB = j.at("mean_psnr_dB").get<double>();
    report.stddev_psnr_dB = j.at("stddev_psnr_dB").get<double>();
    report.sample_count = j.at("sample_count").get<std::size_t>();
    report.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    if (!j.at("threshold_dB").is_null()) report.threshold_dB = j.at("threshold_dB").get<double>();
    report.reference_id = j.at("reference_id").get<std::string>();
    report.timestamp_unix = j.at("timestamp").get<std::int64_t>();
    if (j.contains("window_index")) report.window_index = j.at("window_index").get<std::size_t>();
    return report;
}

void write_histogram_csv(const PerformanceHistogram& h, std::ostream& out) {
    const auto saved = out.precision(17);
    out << "bin_lo_dB,bin_hi_dB,count,mass\n";
    const double total = h.total() > 0 ? static_cast<double>(h.total()) : 1.0;
    for (std::size_t i = 0; i < h.counts().size(); ++i) {
        out << h.binning().bin_lo(i) << "," << h.binning().bin_hi(i) << "," << h.counts()[i]
            << "," << static_cast<double>(h.counts()[i]) / total << "\n";
    }
    out.precision(saved);
}

}  // namespace dmscope
