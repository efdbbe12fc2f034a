#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "dmscope/observer.hpp"

namespace dmscope {

inline constexpr int kProfileFormatVersion = 1;

/// Reference-profile JSON: {format_version, binning{lo_dB,hi_dB,width_dB},
/// counts[], total, reconstructor{kind,params}, created_from,
/// calibration?{validation_dm_dB, threshold_dB}}. Write-then-read is
/// lossless for counts and binning; floats keep full precision.
nlohmann::json profile_to_json(const DomainReference& ref);
DomainReference profile_from_json(const nlohmann::json& j);

void save_profile(const DomainReference& ref, const std::filesystem::path& path);
DomainReference load_profile(const std::filesystem::path& path);

nlohmann::json report_to_json(const DmReport& report);
DmReport report_from_json(const nlohmann::json& j);

nlohmann::json reconstructor_to_json(const Reconstructor& r);
Reconstructor reconstructor_from_json(const nlohmann::json& j);

/// CSV rows bin_lo_dB,bin_hi_dB,count,mass (with header), for external plotting.
void write_histogram_csv(const PerformanceHistogram& h, std::ostream& out);

}  // namespace dmscope
