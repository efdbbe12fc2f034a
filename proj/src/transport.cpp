#include "dmscope/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace dmscope {

namespace {

double sum_checked(std::span<const double> v, const char* name) {
    double s = 0.0;
    for (double x : v) {
        if (x < 0.0 || !std::isfinite(x)) {
            throw std::invalid_argument(std::string(name) + ": entries must be finite and >= 0");
        }
        s += x;
    }
    return s;
}

struct Arc {
    std::size_t row;
    std::size_t col;
    double flow;
};

// Transportation simplex over the bipartite bin graph, Bland's rule for
// anti-cycling. The solver sees only positive-mass bins (zero bins cannot
// carry flow and would only add degenerate basics); row_pos/col_pos map the
// compacted rows and columns back to original bin indices. Ground costs
// |mu - nu| (0 on the balancing dummy node) are integers, so duals and
// reduced costs stay exactly integral and the optimality test needs no
// epsilon. Flows carry the input masses' floating point; only theta
// selection touches them.
class TransportSimplex {
  public:
    TransportSimplex(std::vector<double> supply, std::vector<double> demand,
                     std::vector<long> row_pos, std::vector<long> col_pos)
        : supply_(std::move(supply)),
          demand_(std::move(demand)),
          row_pos_(std::move(row_pos)),
          col_pos_(std::move(col_pos)),
          rows_(supply_.size()),
          cols_(demand_.size()),
          is_basic_(rows_ * cols_, false) {}

    void solve() {
        northwest_corner();
        // Dantzig's most-negative rule for speed; after a run of degenerate
        // pivots switch to Bland's smallest-index rule, whose finite
        // termination guarantee breaks any cycle, then switch back on the
        // next improving step.
        const std::size_t stall_limit = rows_ + cols_;
        std::size_t stalled = 0;
        for (;;) {
            compute_duals();
            const auto entering = find_entering(/*bland=*/stalled > stall_limit);
            if (!entering) break;
            const double theta = pivot(entering->first, entering->second);
            stalled = theta > 0.0 ? 0 : stalled + 1;
        }
    }

    // Positive flows on real (non-dummy) arcs, in original bin indices.
    std::vector<FlowEntry> optimal_flows() const {
        std::vector<FlowEntry> flows;
        for (const Arc& a : basis_) {
            if (a.flow > 0.0 && row_pos_[a.row] >= 0 && col_pos_[a.col] >= 0) {
                flows.push_back(FlowEntry{static_cast<std::size_t>(row_pos_[a.row]),
                                          static_cast<std::size_t>(col_pos_[a.col]), a.flow});
            }
        }
        return flows;
    }

  private:
    long cost(std::size_t i, std::size_t j) const {
        // the balancing dummy (position sentinel < 0) ships for free
        if (row_pos_[i] < 0 || col_pos_[j] < 0) return 0;
        return std::labs(row_pos_[i] - col_pos_[j]);
    }

    void add_basic(std::size_t i, std::size_t j, double flow) {
        basis_.push_back(Arc{i, j, flow});
        is_basic_[i * cols_ + j] = true;
    }

    // Staircase initial basis: exactly rows_ + cols_ - 1 arcs (degenerate
    // zeros included), forming a spanning tree.
    void northwest_corner() {
        std::vector<double> rs = supply_;
        std::vector<double> rd = demand_;
        std::size_t i = 0, j = 0;
        for (;;) {
            const double t = std::min(rs[i], rd[j]);
            add_basic(i, j, t);
            rs[i] -= t;
            rd[j] -= t;
            if (i + 1 == rows_ && j + 1 == cols_) break;
            if (i + 1 < rows_ && (rs[i] <= 0.0 || j + 1 == cols_)) {
                ++i;
            } else {
                ++j;
            }
        }
    }

    // Solve u_i + v_j = c_ij over the basis tree (u_0 = 0).
    void compute_duals() {
        u_.assign(rows_, 0);
        v_.assign(cols_, 0);
        row_arcs_.assign(rows_, {});
        col_arcs_.assign(cols_, {});
        for (std::size_t a = 0; a < basis_.size(); ++a) {
            row_arcs_[basis_[a].row].push_back(a);
            col_arcs_[basis_[a].col].push_back(a);
        }
        std::vector<char> row_set(rows_, 0), col_set(cols_, 0);
        std::vector<std::pair<bool, std::size_t>> stack;  // (is_col, node)
        row_set[0] = 1;
        stack.emplace_back(false, 0);
        while (!stack.empty()) {
            const auto [is_col, n] = stack.back();
            stack.pop_back();
            if (!is_col) {
                for (std::size_t a : row_arcs_[n]) {
                    const std::size_t c = basis_[a].col;
                    if (!col_set[c]) {
                        col_set[c] = 1;
                        v_[c] = cost(n, c) - u_[n];
                        stack.emplace_back(true, c);
                    }
                }
            } else {
                for (std::size_t a : col_arcs_[n]) {
                    const std::size_t r = basis_[a].row;
                    if (!row_set[r]) {
                        row_set[r] = 1;
                        u_[r] = cost(r, n) - v_[n];
                        stack.emplace_back(false, r);
                    }
                }
            }
        }
    }

    // Bland: first arc in (i * cols + j) order with negative reduced cost.
    // Dantzig: most negative reduced cost, smallest index on ties.
    std::optional<std::pair<std::size_t, std::size_t>> find_entering(bool bland) const {
        long best = 0;
        std::optional<std::pair<std::size_t, std::size_t>> arc;
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                if (is_basic_[i * cols_ + j]) continue;
                const long reduced = cost(i, j) - u_[i] - v_[j];
                if (reduced < best) {
                    best = reduced;
                    arc = std::make_pair(i, j);
                    if (bland) return arc;
                }
            }
        }
        return arc;
    }

    // Tree path from row i* to col j*; the entering arc closes the cycle.
    // Arcs at even positions along the path lose theta, odd positions gain.
    std::vector<std::size_t> tree_path(std::size_t from_row, std::size_t to_col) const {
        constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
        // node ids: rows 0..rows_-1, cols rows_..rows_+cols_-1
        std::vector<std::size_t> parent_arc(rows_ + cols_, kNone);
        std::vector<std::size_t> parent_node(rows_ + cols_, kNone);
        std::vector<char> seen(rows_ + cols_, 0);
        std::vector<std::size_t> queue{from_row};
        seen[from_row] = 1;
        const std::size_t target = rows_ + to_col;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t n = queue[head];
            if (n == target) break;
            const bool is_col = n >= rows_;
            const auto& arcs = is_col ? col_arcs_[n - rows_] : row_arcs_[n];
            for (std::size_t a : arcs) {
                const std::size_t next = is_col ? basis_[a].row : rows_ + basis_[a].col;
                if (!seen[next]) {
                    seen[next] = 1;
                    parent_arc[next] = a;
                    parent_node[next] = n;
                    queue.push_back(next);
                }
            }
        }
        std::vector<std::size_t> path;
        for (std::size_t n = target; n != from_row; n = parent_node[n]) {
            path.push_back(parent_arc[n]);
        }
        std::reverse(path.begin(), path.end());
        return path;
    }

    double pivot(std::size_t enter_row, std::size_t enter_col) {
        const auto path = tree_path(enter_row, enter_col);

        double theta = std::numeric_limits<double>::infinity();
        std::size_t leaving = std::numeric_limits<std::size_t>::max();
        std::size_t leaving_key = std::numeric_limits<std::size_t>::max();
        for (std::size_t p = 0; p < path.size(); p += 2) {
            const Arc& a = basis_[path[p]];
            const std::size_t key = a.row * cols_ + a.col;
            // Bland tie-break: smallest linear index among the minimizers.
            if (a.flow < theta || (a.flow == theta && key < leaving_key)) {
                theta = a.flow;
                leaving = path[p];
                leaving_key = key;
            }
        }

        for (std::size_t p = 0; p < path.size(); ++p) {
            basis_[path[p]].flow += (p % 2 == 0) ? -theta : theta;
        }

        is_basic_[leaving_key] = false;
        basis_[leaving] = Arc{enter_row, enter_col, theta};
        is_basic_[enter_row * cols_ + enter_col] = true;
        return theta;
    }

    std::vector<double> supply_;
    std::vector<double> demand_;
    std::vector<long> row_pos_;  // original bin index per row; -1 for the dummy
    std::vector<long> col_pos_;
    std::size_t rows_;
    std::size_t cols_;

    std::vector<Arc> basis_;
    std::vector<char> is_basic_;
    std::vector<long> u_, v_;
    std::vector<std::vector<std::size_t>> row_arcs_, col_arcs_;
};

}  // namespace

double FlowMatrix::total_flow() const {
    double t = 0.0;
    for (const auto& e : entries) t += e.amount;
    return t;
}

double FlowMatrix::work() const {
    double w = 0.0;
    for (const auto& e : entries) {
        w += e.amount *
             std::abs(static_cast<double>(e.from) - static_cast<double>(e.to));
    }
    return w;
}

DmResult emd_lp(std::span<const double> p, std::span<const double> q, double width_dB,
                bool keep_flow) {
    if (p.size() != q.size()) throw std::invalid_argument("emd_lp: vector lengths differ");
    if (p.empty()) throw std::invalid_argument("emd_lp: empty mass vectors");
    const double sum_p = sum_checked(p, "emd_lp p");
    const double sum_q = sum_checked(q, "emd_lp q");
    if (sum_p <= 0.0 || sum_q <= 0.0) throw std::invalid_argument("emd_lp: zero-mass input");

    // Only positive-mass bins enter the solver; empty bins cannot carry flow.
    std::vector<double> supply, demand;
    std::vector<long> row_pos, col_pos;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            supply.push_back(p[i]);
            row_pos.push_back(static_cast<long>(i));
        }
    }
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (q[j] > 0.0) {
            demand.push_back(q[j]);
            col_pos.push_back(static_cast<long>(j));
        }
    }

    // Balance unequal totals with a single zero-cost dummy node; the real
    // flow then equals min(sum p, sum q) (partial-transport semantics).
    const double diff = sum_p - sum_q;
    if (diff > 0.0) {
        demand.push_back(diff);
        col_pos.push_back(-1);
    } else if (diff < 0.0) {
        supply.push_back(-diff);
        row_pos.push_back(-1);
    }

    TransportSimplex simplex(std::move(supply), std::move(demand), std::move(row_pos),
                             std::move(col_pos));
    simplex.solve();

    FlowMatrix flow;
    flow.source_bins = p.size();
    flow.target_bins = q.size();
    flow.entries = simplex.optimal_flows();

    const double total = flow.total_flow();
    if (total <= 0.0) throw std::invalid_argument("emd_lp: zero transportable mass");
    DmResult result;
    result.dm_dB = width_dB * flow.work() / total;
    result.method = EmdMethod::kLinearProgram;
    if (keep_flow) result.flow = std::move(flow);
    return result;
}

DmResult emd_1d(std::span<const double> p, std::span<const double> q, double width_dB) {
    if (p.size() != q.size()) throw std::invalid_argument("emd_1d: vector lengths differ");
    if (p.empty()) throw std::invalid_argument("emd_1d: empty mass vectors");
    const double sum_p = sum_checked(p, "emd_1d p");
    const double sum_q = sum_checked(q, "emd_1d q");
    if (std::abs(sum_p - 1.0) > 1e-9 || std::abs(sum_q - 1.0) > 1e-9) {
        throw std::invalid_argument("emd_1d: inputs must be normalized to total mass 1");
    }

    double cdf_p = 0.0, cdf_q = 0.0, acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        cdf_p += p[k];
        cdf_q += q[k];
        acc += std::abs(cdf_p - cdf_q);
    }
    return DmResult{width_dB * acc, EmdMethod::kClosedForm, std::nullopt};
}

DmResult dm_metric(const PerformanceHistogram& source, const PerformanceHistogram& target,
                   bool normalize) {
    if (!(source.binning() == target.binning())) {
        throw std::invalid_argument("dm_metric: histograms use different binning configs");
    }
    if (source.total() == 0 || target.total() == 0) {
        throw std::invalid_argument("dm_metric: empty histogram");
    }
    const double width = source.binning().width_dB();
    if (normalize) {
        return emd_1d(normalize_histogram(source), normalize_histogram(target), width);
    }
    std::vector<double> p(source.counts().begin(), source.counts().end());
    std::vector<double> q(target.counts().begin(), target.counts().end());
    return emd_lp(p, q, width);
}

void write_flow_csv(const FlowMatrix& flow, std::ostream& out) {
    const auto saved = out.precision(17);
    out << "mu,nu,flow\n";
    for (const auto& e : flow.entries) {
        out << e.from << "," << e.to << "," << e.amount << "\n";
    }
    out.precision(saved);
}

}  // namespace dmscope
