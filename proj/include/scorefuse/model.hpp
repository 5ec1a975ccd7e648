#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace scorefuse {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Input file could not be parsed (CLI exit code 2).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Table failed validation (CLI exit code 1).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A statistic required by the pipeline is undefined on this data,
/// e.g. zero reference variance (CLI exit code 3).
struct DegenerateStatistics : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CellStatus : std::int8_t {
    Retained = 0,
    ScreenedRough = 1,
    ScreenedGreedy = 2,
    Missing = 3,  // ingestion gap, reported by validate()
};

enum class ScreenStage : std::int8_t { Rough, Greedy };

enum class Representation { RawScores, RankSurrogate };
enum class WeightMode { PaperLiteral, Renormalized };

struct Violation {
    enum class Kind { MissingCell, ScoreOutOfRange, EmptyDimension };
    Kind kind;
    std::string class_id;
    std::string reviewer;
    std::string student;
    double score = 0.0;  // offending value for ScoreOutOfRange

    std::string message() const;
};

/// Grades of all students by all reviewers, merged across classes.
///
/// Rows are reviewers, columns are (class, student) pairs grouped by class
/// in input order. Scores live in a dense matrix; a parallel status matrix
/// tracks screening. After ingestion the only permitted mutations are
/// status flips Retained -> Screened and score rewrites by the rescaling
/// stage; queries never mutate, so a table is safe to share read-only.
class GradeTable {
public:
    GradeTable() = default;

    int reviewer_count() const { return static_cast<int>(reviewers_.size()); }
    int column_count() const { return static_cast<int>(students_.size()); }
    int class_count() const { return static_cast<int>(classes_.size()); }

    const std::vector<std::string>& reviewers() const { return reviewers_; }
    const std::vector<std::string>& classes() const { return classes_; }
    const std::string& student(int column) const { return students_[column]; }
    int class_of(int column) const { return col_class_[column]; }
    std::vector<int> columns_of_class(int k) const;

    double score(int reviewer, int column) const { return scores_(reviewer, column); }
    CellStatus status(int reviewer, int column) const {
        return static_cast<CellStatus>(status_(reviewer, column));
    }
    bool retained(int reviewer, int column) const {
        return status_(reviewer, column) == 0;
    }

    const MatrixXd& scores() const { return scores_; }
    /// Scores with NaN in every cell that is not retained.
    MatrixXd retained_values() const;
    int retained_count(int reviewer) const;
    int screened_count(int reviewer) const;

    /// -1 when the id is unknown.
    int reviewer_index(const std::string& id) const;
    int column_index(const std::string& class_id, const std::string& student) const;

    /// Status transition Retained -> Screened(stage); anything else throws.
    void screen(int reviewer, int column, ScreenStage stage);
    /// Score rewrite for the rescaling stage. Keeps status untouched.
    void set_score(int reviewer, int column, double value);

    /// "class/student/reviewer" label for diagnostics.
    std::string cell_label(int reviewer, int column) const;

private:
    friend class GradeTableBuilder;

    std::vector<std::string> reviewers_;
    std::vector<std::string> classes_;
    std::vector<std::string> students_;  // per column
    std::vector<int> col_class_;         // class index per column
    MatrixXd scores_;
    Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic> status_;
};

/// Accumulates cells in input order, then lays out the dense table.
/// Completeness is not enforced here; validate() reports gaps.
class GradeTableBuilder {
public:
    /// False when the cell was already set (duplicate input row).
    bool add(const std::string& class_id, const std::string& student,
             const std::string& reviewer, double score);
    GradeTable build() const;

private:
    struct CellRow {
        int klass, student, reviewer;
        double score;
    };
    std::vector<std::string> reviewers_, classes_;
    std::vector<std::vector<std::string>> class_students_;
    std::vector<CellRow> rows_;

    int intern(std::vector<std::string>& ids, const std::string& id);
};

/// Reviewer's descending ranking over retained cells. Positions with equal
/// scores share a tie group; within a group the order is StudentId
/// ascending (then class id) so rankings are reproducible.
struct Ranking {
    int reviewer = -1;
    std::vector<int> columns;     // sorted by score descending
    std::vector<double> scores;   // aligned with columns
    std::vector<int> tie_group;   // group index per position

    int size() const { return static_cast<int>(columns.size()); }
};

/// Empty result means the table is complete, in range, and non-degenerate.
std::vector<Violation> validate(const GradeTable& table);

/// Descending ranking of a reviewer's retained cells, optionally
/// restricted to one class. Throws std::invalid_argument on a bad index.
Ranking ranking_of(const GradeTable& table, int reviewer,
                   std::optional<int> class_filter = std::nullopt);

/// Pipeline hyperparameters. Defaults follow the reference experiments:
/// alpha = 1.0 for the rough screen, fraction 0.8 for greedy confirmation,
/// 0.05 for the hypothesis tests (doubling as the rescale blend weight
/// unless blend_alpha overrides it).
struct Config {
    double rough_alpha = 1.0;
    double greedy_fraction = 0.8;
    double test_alpha = 0.05;
    std::optional<double> blend_alpha;
    std::optional<Representation> representation;  // default: raw for 1 class, rank otherwise
    WeightMode weight_mode = WeightMode::PaperLiteral;
    std::string reference_reviewer;  // empty = first reviewer
    std::uint64_t seed = 0;

    double effective_blend() const { return blend_alpha ? *blend_alpha : test_alpha; }
    Representation effective_representation(int class_count) const {
        if (representation) return *representation;
        return class_count >= 2 ? Representation::RankSurrogate : Representation::RawScores;
    }
    int reference_reviewer_index(const GradeTable& table) const;

    /// Throws std::invalid_argument when a field is out of range.
    void check() const;
};

}  // namespace scorefuse
