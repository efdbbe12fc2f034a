#include "dmscope/rankcorr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dmscope {

namespace {

void validate(const PairedSeries& series) {
    if (series.a.size() != series.b.size()) {
        throw std::invalid_argument("kendall: series lengths differ");
    }
    if (series.a.size() < 2) {
        throw std::invalid_argument("kendall: need at least 2 observations");
    }
}

TauResult finish(std::uint64_t n_c, std::uint64_t n_d, std::uint64_t n_a, std::uint64_t n_b,
                 std::uint64_t n_p) {
    if (n_a >= n_p || n_b >= n_p) {
        throw std::domain_error("kendall: tau undefined (all pairs tied in one component)");
    }
    TauResult r;
    r.n_c = n_c;
    r.n_d = n_d;
    r.n_a = n_a;
    r.n_b = n_b;
    r.n_p = n_p;
    r.tau = (static_cast<double>(n_c) - static_cast<double>(n_d)) /
            std::sqrt(static_cast<double>(n_p - n_a) * static_cast<double>(n_p - n_b));
    return r;
}

// Pairwise core shared by the brute-force oracle and the epsilon-tie path.
TauResult pairwise_tau(const PairedSeries& series, double eps) {
    const std::size_t k = series.a.size();
    std::uint64_t n_c = 0, n_d = 0, n_a = 0, n_b = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double da = series.a[i] - series.a[j];
            const double db = series.b[i] - series.b[j];
            const bool tie_a = std::abs(da) <= eps;
            const bool tie_b = std::abs(db) <= eps;
            if (tie_a) ++n_a;
            if (tie_b) ++n_b;
            if (tie_a || tie_b) continue;
            // sign comparison rather than da*db: immune to product underflow
            if ((da > 0.0) == (db > 0.0)) {
                ++n_c;
            } else {
                ++n_d;
            }
        }
    }
    const std::uint64_t n_p = static_cast<std::uint64_t>(k) * (k - 1) / 2;
    return finish(n_c, n_d, n_a, n_b, n_p);
}

// Merge sort counting strict inversions (left > right); equal elements are
// not inversions.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch,
                               std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
    std::size_t i = lo, j = mid, out = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            inv += mid - i;  // every remaining left element exceeds v[j]
            scratch[out++] = v[j++];
        } else {
            scratch[out++] = v[i++];
        }
    }
    while (i < mid) scratch[out++] = v[i++];
    while (j < hi) scratch[out++] = v[j++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
              scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

template <typename Equal, typename Proj>
std::uint64_t tied_pairs(const std::vector<std::size_t>& order, Equal equal, Proj proj) {
    std::uint64_t ties = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= order.size(); ++i) {
        if (i < order.size() && equal(proj(order[i - 1]), proj(order[i]))) {
            ++run;
        } else {
            ties += static_cast<std::uint64_t>(run) * (run - 1) / 2;
            run = 1;
        }
    }
    return ties;
}

// Knight's algorithm: sort by (a, b), count tie groups, then count
// discordant pairs as strict inversions of the b sequence.
TauResult knight_tau(const PairedSeries& series) {
    const std::size_t k = series.a.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (series.a[x] != series.a[y]) return series.a[x] < series.a[y];
        return series.b[x] < series.b[y];
    });

    const std::uint64_t n_a = tied_pairs(
        order, [](double x, double y) { return x == y; },
        [&](std::size_t i) { return series.a[i]; });
    const std::uint64_t n_ab = tied_pairs(
        order,
        [](std::pair<double, double> x, std::pair<double, double> y) { return x == y; },
        [&](std::size_t i) { return std::make_pair(series.a[i], series.b[i]); });

    std::vector<double> b_sorted_by_a(k);
    for (std::size_t i = 0; i < k; ++i) b_sorted_by_a[i] = series.b[order[i]];
    std::vector<double> scratch(k);
    const std::uint64_t n_d = count_inversions(b_sorted_by_a, scratch, 0, k);

    std::vector<std::size_t> b_order(k);
    std::iota(b_order.begin(), b_order.end(), 0);
    std::sort(b_order.begin(), b_order.end(),
              [&](std::size_t x, std::size_t y) { return series.b[x] < series.b[y]; });
    const std::uint64_t n_b = tied_pairs(
        b_order, [](double x, double y) { return x == y; },
        [&](std::size_t i) { return series.b[i]; });

    const std::uint64_t n_p = static_cast<std::uint64_t>(k) * (k - 1) / 2;
    // Pairs free of ties split into concordant and discordant.
    const std::uint64_t n_c = n_p - n_a - n_b + n_ab - n_d;
    return finish(n_c, n_d, n_a, n_b, n_p);
}

}  // namespace

TauResult kendall_tau(const PairedSeries& series, double tie_epsilon) {
    validate(series);
    if (tie_epsilon < 0.0) throw std::invalid_argument("kendall: negative tie epsilon");
    if (tie_epsilon > 0.0) return pairwise_tau(series, tie_epsilon);
    return knight_tau(series);
}

TauResult kendall_tau_bruteforce(const PairedSeries& series, double tie_epsilon) {
    validate(series);
    if (tie_epsilon < 0.0) throw std::invalid_argument("kendall: negative tie epsilon");
    return pairwise_tau(series, tie_epsilon);
}

}  // namespace dmscope
