#pragma once

#include <optional>
#include <vector>

#include "scorefuse/model.hpp"

namespace scorefuse {

/// Per-reviewer score vectors over the merged student set, in the
/// representation screening runs on. NaN marks cells that are screened or
/// outside the requested class scope; every consumer treats NaN as absent.
struct ScreeningInput {
    MatrixXd values;
    Representation representation = Representation::RawScores;
};

/// Raw retained scores, or rank surrogates via rank_surrogate().
ScreeningInput screening_input(const GradeTable& table, Representation repr,
                               std::optional<int> class_scope = std::nullopt);

/// Replaces each reviewer's retained scores by S + 1 - rank, where rank 1
/// is that reviewer's top score and tied scores take the average of the
/// rank positions they cover. Higher surrogate still means better, so the
/// result feeds the rough screen and the weighted-Kendall machinery
/// unchanged; reviewers with different scoring intervals become comparable.
ScreeningInput rank_surrogate(const GradeTable& table,
                              std::optional<int> class_scope = std::nullopt);

struct AnomalyEntry {
    int reviewer;
    int column;
    double score;  // table grade at flag time
    ScreenStage stage;
    std::optional<double> decrease;
};

/// Flagged cells, unique per cell. After greedy_select the entries are
/// sorted by decrease descending and confirmed cells carry stage Greedy.
struct AnomalyReport {
    std::vector<AnomalyEntry> entries;

    int count(ScreenStage stage) const;
};

/// Stage one: flag cell (i,j) when reviewer i's grade deviates from
/// student j's cross-reviewer mean by more than alpha sample standard
/// deviations. Does not modify the table. Throws DegenerateStatistics
/// when a student has fewer than two scores to compare.
AnomalyReport rough_screen(const GradeTable& table, const ScreeningInput& input,
                           double alpha);

/// Discordant-pair count between two rankings; only pairs present in both
/// are compared, ties are never discordant.
int kendall_tau_distance(const Ranking& r1, const Ranking& r2);

/// Score-weighted variant: each discordant pair contributes the average of
/// the two reviewers' score gaps instead of 1. Symmetric, nonnegative, and
/// zero exactly when no mutually present discordant pair exists.
double score_weighted_kendall(const Ranking& r1, const Ranking& r2);

/// Sum of score_weighted_kendall over all unordered ranking pairs.
/// Requires at least two rankings.
double objective(const std::vector<Ranking>& rankings);

/// One ranking per reviewer over the finite entries of a value matrix.
std::vector<Ranking> value_rankings(const GradeTable& table, const MatrixXd& values);

/// Exact drop in objective() when cell (reviewer, column) alone is removed:
/// over every other reviewer k and student v, pairs discordant between the
/// two rankings in either direction contribute the average of the two
/// absolute score gaps. Throws std::invalid_argument when the cell is
/// already absent from `values`.
double greedy_decrease(const MatrixXd& values, int reviewer, int column);

enum class GreedyMode {
    /// Decreases computed once against the full retained table; the ranking
    /// of decreases is trusted to survive deletions.
    SinglePass,
    /// Decreases recomputed after every confirmed deletion. Reference mode
    /// for the equivalence oracles.
    Recompute,
};

/// Stage two: rank the rough-flagged cells by how much their removal drops
/// the objective and confirm the top floor(fraction * flagged) of them.
/// Returns all flagged entries sorted by decrease descending with stage
/// Greedy on the confirmed prefix; unconfirmed entries revert to Rough.
AnomalyReport greedy_select(const GradeTable& table, const ScreeningInput& input,
                            const AnomalyReport& rough, double fraction,
                            GreedyMode mode = GreedyMode::SinglePass);

/// Flips every Greedy entry of the report to Screened(Greedy) on the table.
void apply_screening(GradeTable& table, const AnomalyReport& report);

}  // namespace scorefuse
