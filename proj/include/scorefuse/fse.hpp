#pragma once

#include <string>
#include <vector>

#include "scorefuse/model.hpp"

namespace scorefuse {

/// Per-reviewer min-max normalization of retained scores to [0,1].
/// Entries are NaN exactly where the grade cell is screened.
struct BenefitMatrix {
    MatrixXd b;
    std::vector<std::string> warnings;
};

/// b_ij = (g_ij - min_j g_ij) / (max_j g_ij - min_j g_ij), min and max over
/// reviewer i's retained scores. A reviewer whose retained scores are all
/// equal (including a single survivor) gets 0.5 everywhere, with a warning.
BenefitMatrix benefit_matrix(const GradeTable& table);

/// Discrimination weights: coefficient of variation sigma_i / mean_i over
/// each reviewer's retained scores, normalized to sum 1. All-zero spread
/// falls back to uniform weights with a warning.
VectorXd variation_weights(const GradeTable& table,
                           std::vector<std::string>* warnings = nullptr);

enum class ReliabilityForm {
    /// Weights proportional to each reviewer's retained-score count. This is
    /// the form the reference experiment's printed weights actually follow.
    RetainedCount,
    /// The literal printed formula: total screened count divided by the
    /// reviewer's screened count. Unnormalized and infinite at zero screened
    /// scores; kept only for fidelity experiments.
    PrintedInverse,
};

VectorXd reliability_weights(const GradeTable& table,
                             ReliabilityForm form = ReliabilityForm::RetainedCount);

/// Elementwise average of two weight vectors that each sum to 1.
VectorXd combine_weights(const VectorXd& w1, const VectorXd& w2);

/// The three per-reviewer weight vectors of one run.
struct WeightVector {
    VectorXd variation;    // w(1)
    VectorXd reliability;  // w(2)
    VectorXd combined;     // w
};

/// Fused score F_j = sum_i w_i b_ij over the reviewers whose cell survived
/// screening. PaperLiteral leaves missing terms at zero; Renormalized
/// divides by the weight mass actually available for that student.
/// Throws DegenerateStatistics when a student has no retained score left.
VectorXd fuse(const GradeTable& table, const MatrixXd& benefit, const VectorXd& weights,
              WeightMode mode);

/// Final per-student outcome: fused score, display score on the reference
/// reviewer's scale rounded to two decimals, and competition rank
/// (tied display scores share a rank, the next rank skips).
struct EvaluationResult {
    VectorXd fused;
    VectorXd display;
    std::vector<int> rank;   // 1-based
    MatrixXd contributions;  // w_i * b_ij, NaN where screened
};

/// Maps F onto the reference reviewer's retained score range,
/// f_j = F_j * (max - min) + min, rounds to two decimals, and ranks.
/// Throws DegenerateStatistics when the reference range is empty.
EvaluationResult final_scores(const GradeTable& table, const VectorXd& fused,
                              int reference_reviewer);

}  // namespace scorefuse
