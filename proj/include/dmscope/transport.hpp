#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "dmscope/histogram.hpp"

namespace dmscope {

struct FlowEntry {
    std::size_t from;  // source bin mu
    std::size_t to;    // target bin nu
    double amount;
};

/// Sparse optimal flow between two bin grids; ground distance |mu - nu|
/// is implicit in the indices.
struct FlowMatrix {
    std::size_t source_bins = 0;
    std::size_t target_bins = 0;
    std::vector<FlowEntry> entries;

    double total_flow() const;
    double work() const;  // sum of flow * |mu - nu|
};

enum class EmdMethod { kLinearProgram, kClosedForm };

struct DmResult {
    double dm_dB = 0.0;
    EmdMethod method = EmdMethod::kClosedForm;
    std::optional<FlowMatrix> flow;  // retained on request (LP path only)
};

/// Exact earth mover's distance via the transportation simplex (Bland's rule
/// for anti-cycling). Handles unequal total masses with partial-transport
/// semantics: total optimal flow equals min(sum p, sum q). Returns the
/// flow-normalized optimal work scaled by width_dB.
/// Throws std::invalid_argument on length mismatch, negative entries,
/// or an all-zero input.
DmResult emd_lp(std::span<const double> p, std::span<const double> q, double width_dB = 1.0,
                bool keep_flow = false);

/// Closed-form 1-D earth mover's distance for normalized histograms:
/// width_dB * sum_k |CDF_p(k) - CDF_q(k)|. Equals emd_lp on normalized
/// inputs; throws std::invalid_argument if either mass total deviates from 1
/// by more than 1e-9.
DmResult emd_1d(std::span<const double> p, std::span<const double> q, double width_dB);

/// The domain mismatch metric: EMD between two PSNR histograms, in dB.
/// With normalize (default) both histograms are normalized and the closed
/// form is used; with normalize = false the raw counts enter the LP with
/// partial-transport semantics. Requires identical binning and non-empty
/// histograms.
DmResult dm_metric(const PerformanceHistogram& source, const PerformanceHistogram& target,
                   bool normalize = true);

/// CSV dump (mu,nu,flow) for diagnostics.
void write_flow_csv(const FlowMatrix& flow, std::ostream& out);

}  // namespace dmscope
