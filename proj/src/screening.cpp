#include "scorefuse/screening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

namespace scorefuse {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool finite(double x) { return std::isfinite(x); }

/// Static-chunk parallel map; fn(i) writes only slot i, so the result is
/// bitwise identical to the sequential loop.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    if (n < 32 || hw < 2) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    int workers = static_cast<int>(std::min<unsigned>(hw, 8));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

/// Scores of students present in both rankings, in r1's order.
void common_scores(const Ranking& r1, const Ranking& r2, std::vector<double>& a,
                   std::vector<double>& b) {
    std::unordered_map<int, double> in2;
    in2.reserve(r2.columns.size());
    for (size_t p = 0; p < r2.columns.size(); ++p) in2.emplace(r2.columns[p], r2.scores[p]);
    a.clear();
    b.clear();
    for (size_t p = 0; p < r1.columns.size(); ++p) {
        auto it = in2.find(r1.columns[p]);
        if (it == in2.end()) continue;
        a.push_back(r1.scores[p]);
        b.push_back(it->second);
    }
}

}  // namespace

int AnomalyReport::count(ScreenStage stage) const {
    int n = 0;
    for (const auto& e : entries)
        if (e.stage == stage) ++n;
    return n;
}

ScreeningInput screening_input(const GradeTable& table, Representation repr,
                               std::optional<int> class_scope) {
    if (repr == Representation::RankSurrogate) return rank_surrogate(table, class_scope);
    ScreeningInput in;
    in.representation = Representation::RawScores;
    in.values = table.retained_values();
    if (class_scope) {
        for (int j = 0; j < table.column_count(); ++j)
            if (table.class_of(j) != *class_scope) in.values.col(j).setConstant(kNaN);
    }
    return in;
}

ScreeningInput rank_surrogate(const GradeTable& table, std::optional<int> class_scope) {
    ScreeningInput in;
    in.representation = Representation::RankSurrogate;
    in.values = MatrixXd::Constant(table.reviewer_count(), table.column_count(), kNaN);

    for (int i = 0; i < table.reviewer_count(); ++i) {
        std::vector<int> cols;
        for (int j = 0; j < table.column_count(); ++j) {
            if (!table.retained(i, j)) continue;
            if (class_scope && table.class_of(j) != *class_scope) continue;
            cols.push_back(j);
        }
        std::sort(cols.begin(), cols.end(), [&](int a, int b) {
            return table.score(i, a) > table.score(i, b);
        });
        const int n = static_cast<int>(cols.size());
        // Tied scores share the average of the 1-based positions they cover.
        int p = 0;
        while (p < n) {
            int q = p;
            while (q + 1 < n && table.score(i, cols[q + 1]) == table.score(i, cols[p])) ++q;
            double avg_rank = (p + 1 + q + 1) / 2.0;
            for (int t = p; t <= q; ++t) in.values(i, cols[t]) = n + 1 - avg_rank;
            p = q + 1;
        }
    }
    return in;
}

AnomalyReport rough_screen(const GradeTable& table, const ScreeningInput& input,
                           double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("rough-screen alpha must be > 0");
    AnomalyReport report;
    const auto& v = input.values;
    for (int j = 0; j < v.cols(); ++j) {
        int n = 0;
        double sum = 0.0;
        for (int i = 0; i < v.rows(); ++i)
            if (finite(v(i, j))) {
                ++n;
                sum += v(i, j);
            }
        if (n == 0) continue;  // column outside the screening scope
        if (n < 2)
            throw DegenerateStatistics("student " + table.student(j) +
                                       " has fewer than two scores; deviation is undefined");
        double mean = sum / n;
        double ss = 0.0;
        for (int i = 0; i < v.rows(); ++i)
            if (finite(v(i, j))) ss += (v(i, j) - mean) * (v(i, j) - mean);
        double sd = std::sqrt(ss / (n - 1));
        for (int i = 0; i < v.rows(); ++i) {
            if (!finite(v(i, j))) continue;
            if (std::abs(v(i, j) - mean) > alpha * sd)
                report.entries.push_back(
                    {i, j, table.score(i, j), ScreenStage::Rough, std::nullopt});
        }
    }
    return report;
}

int kendall_tau_distance(const Ranking& r1, const Ranking& r2) {
    std::vector<double> a, b;
    common_scores(r1, r2, a, b);
    const int n = static_cast<int>(a.size());
    int discordant = 0;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            double da = a[u] - a[v], db = b[u] - b[v];
            if (da * db < 0.0) ++discordant;
        }
    return discordant;
}

double score_weighted_kendall(const Ranking& r1, const Ranking& r2) {
    std::vector<double> a, b;
    common_scores(r1, r2, a, b);
    const int n = static_cast<int>(a.size());
    double total = 0.0;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            double da = a[u] - a[v], db = b[u] - b[v];
            if (da * db < 0.0) total += (std::abs(da) + std::abs(db)) / 2.0;
        }
    return total;
}

double objective(const std::vector<Ranking>& rankings) {
    if (rankings.size() < 2)
        throw std::invalid_argument("objective needs at least two rankings");
    double total = 0.0;
    for (size_t k = 0; k < rankings.size(); ++k)
        for (size_t l = k + 1; l < rankings.size(); ++l)
            total += score_weighted_kendall(rankings[k], rankings[l]);
    return total;
}

std::vector<Ranking> value_rankings(const GradeTable& table, const MatrixXd& values) {
    std::vector<Ranking> out;
    out.reserve(values.rows());
    for (int i = 0; i < values.rows(); ++i) {
        Ranking r;
        r.reviewer = i;
        std::vector<int> cols;
        for (int j = 0; j < values.cols(); ++j)
            if (finite(values(i, j))) cols.push_back(j);
        std::sort(cols.begin(), cols.end(), [&](int a, int b) {
            if (values(i, a) != values(i, b)) return values(i, a) > values(i, b);
            if (table.student(a) != table.student(b))
                return table.student(a) < table.student(b);
            return table.classes()[table.class_of(a)] < table.classes()[table.class_of(b)];
        });
        int group = -1;
        double prev = kNaN;
        for (int c : cols) {
            double g = values(i, c);
            if (group < 0 || g != prev) ++group;
            r.columns.push_back(c);
            r.scores.push_back(g);
            r.tie_group.push_back(group);
            prev = g;
        }
        out.push_back(std::move(r));
    }
    return out;
}

double greedy_decrease(const MatrixXd& values, int reviewer, int column) {
    if (!finite(values(reviewer, column)))
        throw std::invalid_argument("cell is already screened; decrease is undefined");
    const double gij = values(reviewer, column);
    double total = 0.0;
    for (int k = 0; k < values.rows(); ++k) {
        if (k == reviewer || !finite(values(k, column))) continue;
        const double gkj = values(k, column);
        for (int v = 0; v < values.cols(); ++v) {
            if (v == column) continue;
            const double giv = values(reviewer, v), gkv = values(k, v);
            if (!finite(giv) || !finite(gkv)) continue;
            const double da = gij - giv, db = gkj - gkv;
            if (da * db < 0.0) total += (std::abs(da) + std::abs(db)) / 2.0;
        }
    }
    return total;
}

AnomalyReport greedy_select(const GradeTable& table, const ScreeningInput& input,
                            const AnomalyReport& rough, double fraction, GreedyMode mode) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("greedy fraction must lie in (0,1]");
    const int n = static_cast<int>(rough.entries.size());
    // Robust against binary fractions like 0.7*10 = 6.999...; 0.8*33 still -> 26.
    const int confirm = static_cast<int>(std::floor(fraction * n + 1e-9));

    AnomalyReport out;
    out.entries = rough.entries;
    for (auto& e : out.entries) {
        e.stage = ScreenStage::Rough;
        e.score = table.score(e.reviewer, e.column);
    }

    auto tie_before = [](const AnomalyEntry& x, const AnomalyEntry& y) {
        if (x.reviewer != y.reviewer) return x.reviewer < y.reviewer;
        return x.column < y.column;
    };

    if (mode == GreedyMode::SinglePass) {
        std::vector<double> deltas(n);
        parallel_for(n, [&](int i) {
            deltas[i] =
                greedy_decrease(input.values, out.entries[i].reviewer, out.entries[i].column);
        });
        for (int i = 0; i < n; ++i) out.entries[i].decrease = deltas[i];
        std::sort(out.entries.begin(), out.entries.end(),
                  [&](const AnomalyEntry& x, const AnomalyEntry& y) {
                      if (*x.decrease != *y.decrease) return *x.decrease > *y.decrease;
                      return tie_before(x, y);
                  });
        for (int i = 0; i < confirm; ++i) out.entries[i].stage = ScreenStage::Greedy;
        return out;
    }

    // Recompute mode: delete one cell at a time, re-evaluating every
    // remaining decrease against the reduced table.
    MatrixXd values = input.values;
    std::vector<AnomalyEntry> remaining = std::move(out.entries);
    out.entries.clear();
    for (int step = 0; step < confirm; ++step) {
        int best = -1;
        double best_delta = -1.0;
        for (size_t i = 0; i < remaining.size(); ++i) {
            double d = greedy_decrease(values, remaining[i].reviewer, remaining[i].column);
            if (best < 0 || d > best_delta ||
                (d == best_delta && tie_before(remaining[i], remaining[best]))) {
                best = static_cast<int>(i);
                best_delta = d;
            }
        }
        AnomalyEntry e = remaining[best];
        e.stage = ScreenStage::Greedy;
        e.decrease = best_delta;
        out.entries.push_back(e);
        values(e.reviewer, e.column) = kNaN;
        remaining.erase(remaining.begin() + best);
    }
    for (auto& e : remaining)
        e.decrease = greedy_decrease(values, e.reviewer, e.column);
    std::sort(remaining.begin(), remaining.end(),
              [&](const AnomalyEntry& x, const AnomalyEntry& y) {
                  if (*x.decrease != *y.decrease) return *x.decrease > *y.decrease;
                  return tie_before(x, y);
              });
    out.entries.insert(out.entries.end(), remaining.begin(), remaining.end());
    return out;
}

void apply_screening(GradeTable& table, const AnomalyReport& report) {
    for (const auto& e : report.entries)
        if (e.stage == ScreenStage::Greedy) table.screen(e.reviewer, e.column, ScreenStage::Greedy);
}

}  // namespace scorefuse
