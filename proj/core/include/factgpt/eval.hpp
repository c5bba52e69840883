#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "factgpt/adjudication.hpp"
#include "factgpt/labels.hpp"

namespace factgpt {

/// 3x3 grid indexed [true label][predicted label].
struct ConfusionMatrix {
    std::array<std::array<long, 3>, 3> cells{};
    long total = 0;

    long& cell(EntailmentLabel truth, EntailmentLabel pred) {
        return cells[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred)];
    }
    long cell(EntailmentLabel truth, EntailmentLabel pred) const {
        return cells[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred)];
    }
};

/// Counts agreements and disagreements over identical key sets. Throws
/// KeyMismatch when the two maps do not cover the same pair ids.
ConfusionMatrix confusion(const std::map<std::string, EntailmentLabel>& truth,
                          const std::map<std::string, EntailmentLabel>& preds);

struct MacroMetrics {
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double accuracy = 0.0;
    std::array<double, 3> per_class_precision{};
    std::array<double, 3> per_class_recall{};
    std::array<long, 3> support{};  // true-label counts
};

/// Per-class precision = TP/(TP+FP) and recall = TP/(TP+FN), both defined as
/// 0 when the denominator is 0; macro values are unweighted means over the
/// three classes; accuracy = trace/total. Throws EmptyMatrix when total = 0.
MacroMetrics macro_metrics(const ConfusionMatrix& cm);

/// What to do with pairs whose prediction is UNRESOLVED.
enum class UnresolvedPolicy {
    exclude,         // drop from the matrix, count in excluded_pairs
    count_as_wrong,  // keep in accuracy and truth-class recall denominators
};

struct EvalReport {
    double macro_precision_mean = 0.0, macro_precision_std = 0.0;
    double macro_recall_mean = 0.0, macro_recall_std = 0.0;
    double accuracy_mean = 0.0, accuracy_std = 0.0;
    int n_draws = 0;
    std::size_t excluded_pairs = 0;
    struct PerClass {
        double precision_mean = 0.0;
        double recall_mean = 0.0;
        double support_mean = 0.0;
    };
    std::array<PerClass, 3> per_class{};
};

/// Ground truth comes from realize_labels(votes, n_draws, base_seed); each
/// realization is scored against the predictions and the metric means and
/// (population) standard deviations across draws are reported. With no tied
/// tallies every realization is identical and all stds are exactly 0.
/// Predictions must cover every voted pair; UNRESOLVED predictions (nullopt)
/// are handled per the policy.
EvalReport monte_carlo_evaluate(
    const std::vector<DirectionalJudgment>& votes,
    const std::map<std::string, std::optional<EntailmentLabel>>& preds, int n_draws,
    std::uint64_t base_seed, UnresolvedPolicy policy = UnresolvedPolicy::exclude);

struct ClassDistribution {
    struct PerLabel {
        double mean_count = 0.0;
        double mean_percentage = 0.0;  // of the per-realization total
    };
    std::array<PerLabel, 3> per_label{};
    std::size_t total_pairs = 0;
};

/// Label distribution of the realized ground truth, averaged across draws.
ClassDistribution class_distribution(const std::vector<LabelRealization>& realizations);

/// One row of the plain-text summary table.
struct EvalRow {
    std::string model;
    std::string prompt_style;
    EvalReport report;
};

/// Fixed-width table with Model / Prompt Style / Precision / Recall /
/// Accuracy columns.
std::string format_eval_table(const std::vector<EvalRow>& rows);

} // namespace factgpt
