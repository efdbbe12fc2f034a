#pragma once

#include <cstdint>
#include <vector>

namespace dmscope {

/// K paired observations (a_k, b_k), K >= 2.
struct PairedSeries {
    std::vector<double> a;
    std::vector<double> b;
};

struct TauResult {
    double tau = 0.0;
    std::uint64_t n_c = 0;  // concordant pairs
    std::uint64_t n_d = 0;  // discordant pairs
    std::uint64_t n_a = 0;  // pairs tied in a (both-tied pairs count here too)
    std::uint64_t n_b = 0;  // pairs tied in b
    std::uint64_t n_p = 0;  // K(K-1)/2
};

/// Kendall's tau-b: tau = (n_c - n_d) / sqrt((n_p - n_a)(n_p - n_b)).
/// tie_epsilon = 0 compares exactly and uses an O(K log K) merge-sort path;
/// a positive epsilon treats |delta| <= epsilon as a tie and falls back to
/// the pairwise path (epsilon ties are not transitive, so sort-based
/// grouping would miscount them).
/// Throws std::invalid_argument for K < 2 or length mismatch and
/// std::domain_error when all pairs are tied in a or in b.
TauResult kendall_tau(const PairedSeries& series, double tie_epsilon = 0.0);

/// Independent O(K^2) oracle with the identical contract; exists to
/// cross-check the optimized path.
TauResult kendall_tau_bruteforce(const PairedSeries& series, double tie_epsilon = 0.0);

}  // namespace dmscope
