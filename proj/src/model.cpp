#include "scorefuse/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scorefuse {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string Violation::message() const {
    switch (kind) {
        case Kind::MissingCell:
            return "missing cell: class " + class_id + ", student " + student +
                   ", reviewer " + reviewer;
        case Kind::ScoreOutOfRange:
            return "score out of range [0,100]: class " + class_id + ", student " +
                   student + ", reviewer " + reviewer + " = " + std::to_string(score);
        case Kind::EmptyDimension:
            return "empty dimension: " + class_id;
    }
    return "unknown violation";
}

std::vector<int> GradeTable::columns_of_class(int k) const {
    std::vector<int> cols;
    for (int c = 0; c < column_count(); ++c)
        if (col_class_[c] == k) cols.push_back(c);
    return cols;
}

MatrixXd GradeTable::retained_values() const {
    MatrixXd v = scores_;
    for (int i = 0; i < v.rows(); ++i)
        for (int j = 0; j < v.cols(); ++j)
            if (status_(i, j) != 0) v(i, j) = kNaN;
    return v;
}

int GradeTable::retained_count(int reviewer) const {
    int n = 0;
    for (int j = 0; j < column_count(); ++j)
        if (status_(reviewer, j) == 0) ++n;
    return n;
}

int GradeTable::screened_count(int reviewer) const {
    int n = 0;
    for (int j = 0; j < column_count(); ++j) {
        auto s = status_(reviewer, j);
        if (s == 1 || s == 2) ++n;
    }
    return n;
}

int GradeTable::reviewer_index(const std::string& id) const {
    auto it = std::find(reviewers_.begin(), reviewers_.end(), id);
    return it == reviewers_.end() ? -1 : static_cast<int>(it - reviewers_.begin());
}

int GradeTable::column_index(const std::string& class_id, const std::string& student) const {
    for (int c = 0; c < column_count(); ++c)
        if (students_[c] == student && classes_[col_class_[c]] == class_id) return c;
    return -1;
}

void GradeTable::screen(int reviewer, int column, ScreenStage stage) {
    if (status_(reviewer, column) != 0)
        throw std::invalid_argument("cell " + cell_label(reviewer, column) +
                                    " is not retained; status transitions are one-way");
    status_(reviewer, column) = stage == ScreenStage::Rough ? 1 : 2;
}

void GradeTable::set_score(int reviewer, int column, double value) {
    scores_(reviewer, column) = value;
}

std::string GradeTable::cell_label(int reviewer, int column) const {
    return classes_[col_class_[column]] + "/" + students_[column] + "/" + reviewers_[reviewer];
}

int GradeTableBuilder::intern(std::vector<std::string>& ids, const std::string& id) {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it != ids.end()) return static_cast<int>(it - ids.begin());
    ids.push_back(id);
    return static_cast<int>(ids.size()) - 1;
}

bool GradeTableBuilder::add(const std::string& class_id, const std::string& student,
                            const std::string& reviewer, double score) {
    int k = intern(classes_, class_id);
    if (k == static_cast<int>(class_students_.size())) class_students_.emplace_back();
    int s = intern(class_students_[k], student);
    int r = intern(reviewers_, reviewer);
    for (const auto& row : rows_)
        if (row.klass == k && row.student == s && row.reviewer == r) return false;
    rows_.push_back({k, s, r, score});
    return true;
}

GradeTable GradeTableBuilder::build() const {
    GradeTable t;
    t.reviewers_ = reviewers_;
    t.classes_ = classes_;
    // Columns grouped by class, classes and students in first-appearance order.
    std::vector<std::vector<int>> col_of;  // [class][student] -> column
    for (size_t k = 0; k < class_students_.size(); ++k) {
        col_of.emplace_back();
        for (const auto& sid : class_students_[k]) {
            col_of[k].push_back(static_cast<int>(t.students_.size()));
            t.students_.push_back(sid);
            t.col_class_.push_back(static_cast<int>(k));
        }
    }
    int rows = static_cast<int>(reviewers_.size());
    int cols = static_cast<int>(t.students_.size());
    t.scores_ = MatrixXd::Constant(rows, cols, kNaN);
    t.status_.setConstant(rows, cols, static_cast<std::int8_t>(CellStatus::Missing));
    for (const auto& row : rows_) {
        int c = col_of[row.klass][row.student];
        t.scores_(row.reviewer, c) = row.score;
        t.status_(row.reviewer, c) = 0;
    }
    return t;
}

std::vector<Violation> validate(const GradeTable& table) {
    std::vector<Violation> out;
    if (table.reviewer_count() == 0)
        out.push_back({Violation::Kind::EmptyDimension, "no reviewers", "", "", 0.0});
    if (table.column_count() == 0)
        out.push_back({Violation::Kind::EmptyDimension, "no students", "", "", 0.0});
    for (int i = 0; i < table.reviewer_count(); ++i) {
        for (int j = 0; j < table.column_count(); ++j) {
            const auto& cls = table.classes()[table.class_of(j)];
            if (table.status(i, j) == CellStatus::Missing) {
                out.push_back({Violation::Kind::MissingCell, cls, table.reviewers()[i],
                               table.student(j), 0.0});
                continue;
            }
            double g = table.score(i, j);
            if (!(g >= 0.0 && g <= 100.0))
                out.push_back({Violation::Kind::ScoreOutOfRange, cls, table.reviewers()[i],
                               table.student(j), g});
        }
    }
    return out;
}

Ranking ranking_of(const GradeTable& table, int reviewer, std::optional<int> class_filter) {
    if (reviewer < 0 || reviewer >= table.reviewer_count())
        throw std::invalid_argument("unknown reviewer index " + std::to_string(reviewer));
    if (class_filter && (*class_filter < 0 || *class_filter >= table.class_count()))
        throw std::invalid_argument("unknown class index " + std::to_string(*class_filter));

    Ranking r;
    r.reviewer = reviewer;
    std::vector<int> cols;
    for (int j = 0; j < table.column_count(); ++j) {
        if (!table.retained(reviewer, j)) continue;
        if (class_filter && table.class_of(j) != *class_filter) continue;
        cols.push_back(j);
    }
    std::sort(cols.begin(), cols.end(), [&](int a, int b) {
        double ga = table.score(reviewer, a), gb = table.score(reviewer, b);
        if (ga != gb) return ga > gb;
        if (table.student(a) != table.student(b)) return table.student(a) < table.student(b);
        return table.classes()[table.class_of(a)] < table.classes()[table.class_of(b)];
    });

    int group = -1;
    double prev = kNaN;
    for (int c : cols) {
        double g = table.score(reviewer, c);
        if (group < 0 || g != prev) ++group;
        r.columns.push_back(c);
        r.scores.push_back(g);
        r.tie_group.push_back(group);
        prev = g;
    }
    return r;
}

int Config::reference_reviewer_index(const GradeTable& table) const {
    if (reference_reviewer.empty()) return 0;
    int i = table.reviewer_index(reference_reviewer);
    if (i < 0) throw std::invalid_argument("unknown reference reviewer: " + reference_reviewer);
    return i;
}

void Config::check() const {
    if (!(rough_alpha > 0.0))
        throw std::invalid_argument("rough-alpha must be > 0");
    if (!(greedy_fraction > 0.0 && greedy_fraction <= 1.0))
        throw std::invalid_argument("greedy-fraction must lie in (0,1]");
    if (!(test_alpha > 0.0 && test_alpha < 1.0))
        throw std::invalid_argument("test-alpha must lie in (0,1)");
    if (blend_alpha && !(*blend_alpha >= 0.0 && *blend_alpha <= 1.0))
        throw std::invalid_argument("blend-alpha must lie in [0,1]");
}

}  // namespace scorefuse
