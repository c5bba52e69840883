#include "factgpt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "factgpt/errors.hpp"

namespace factgpt {

namespace {

double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (const double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

/// Population standard deviation. Bit-identical samples give exactly 0.
std::pair<double, double> mean_std(const std::vector<double>& xs) {
    const bool all_equal = std::all_of(xs.begin(), xs.end(),
                                       [&](double x) { return x == xs.front(); });
    if (all_equal) return {xs.front(), 0.0};
    const double mean = mean_of(xs);
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

struct DrawCounts {
    ConfusionMatrix matrix;
    std::array<long, 3> excluded_by_truth{};  // UNRESOLVED pairs, by true label
    long excluded_total = 0;
};

MacroMetrics metrics_from(const DrawCounts& counts, UnresolvedPolicy policy) {
    const auto& cm = counts.matrix;
    const long denominator_extra =
        policy == UnresolvedPolicy::count_as_wrong ? counts.excluded_total : 0;
    if (cm.total + denominator_extra == 0)
        raise(ErrorCode::empty_matrix, "no scored pairs");

    MacroMetrics m;
    long trace = 0;
    for (const auto label : kAllLabels) {
        const auto i = static_cast<std::size_t>(label);
        long tp = cm.cells[i][i];
        long pred_count = 0, truth_count = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            pred_count += cm.cells[j][i];
            truth_count += cm.cells[i][j];
        }
        if (policy == UnresolvedPolicy::count_as_wrong)
            truth_count += counts.excluded_by_truth[i];
        m.per_class_precision[i] =
            pred_count > 0 ? static_cast<double>(tp) / static_cast<double>(pred_count) : 0.0;
        m.per_class_recall[i] =
            truth_count > 0 ? static_cast<double>(tp) / static_cast<double>(truth_count) : 0.0;
        m.support[i] = truth_count;
        trace += tp;
    }
    m.macro_precision = (m.per_class_precision[0] + m.per_class_precision[1] +
                         m.per_class_precision[2]) / 3.0;
    m.macro_recall =
        (m.per_class_recall[0] + m.per_class_recall[1] + m.per_class_recall[2]) / 3.0;
    m.accuracy = static_cast<double>(trace) /
                 static_cast<double>(cm.total + denominator_extra);
    return m;
}

} // namespace

ConfusionMatrix confusion(const std::map<std::string, EntailmentLabel>& truth,
                          const std::map<std::string, EntailmentLabel>& preds) {
    if (truth.size() != preds.size())
        raise(ErrorCode::key_mismatch,
              "truth covers " + std::to_string(truth.size()) + " pairs, predictions " +
                  std::to_string(preds.size()));
    ConfusionMatrix cm;
    for (const auto& [pair_id, true_label] : truth) {
        const auto it = preds.find(pair_id);
        if (it == preds.end())
            raise(ErrorCode::key_mismatch, "no prediction for pair " + pair_id);
        ++cm.cell(true_label, it->second);
        ++cm.total;
    }
    return cm;
}

MacroMetrics macro_metrics(const ConfusionMatrix& cm) {
    if (cm.total == 0) raise(ErrorCode::empty_matrix, "confusion matrix is empty");
    long sum = 0;
    for (const auto& row : cm.cells)
        for (const long c : row) sum += c;
    if (sum != cm.total)
        raise(ErrorCode::internal, "confusion matrix total does not match its cells");
    return metrics_from({cm, {}, 0}, UnresolvedPolicy::exclude);
}

EvalReport monte_carlo_evaluate(
    const std::vector<DirectionalJudgment>& votes,
    const std::map<std::string, std::optional<EntailmentLabel>>& preds, int n_draws,
    std::uint64_t base_seed, UnresolvedPolicy policy) {
    const auto realizations = realize_labels(votes, n_draws, base_seed);
    if (realizations.empty()) raise(ErrorCode::internal, "no realizations produced");

    const auto& voted_pairs = realizations.front().labels;
    for (const auto& [pair_id, unused] : voted_pairs) {
        if (!preds.contains(pair_id))
            raise(ErrorCode::key_mismatch, "no prediction for voted pair " + pair_id);
    }
    for (const auto& [pair_id, unused] : preds) {
        if (!voted_pairs.contains(pair_id))
            raise(ErrorCode::key_mismatch, "prediction for unvoted pair " + pair_id);
    }

    std::size_t excluded_pairs = 0;
    for (const auto& [pair_id, pred] : preds) {
        if (!pred) ++excluded_pairs;
    }

    std::vector<double> precisions, recalls, accuracies;
    std::array<std::vector<double>, 3> class_precisions, class_recalls, class_supports;
    precisions.reserve(realizations.size());
    recalls.reserve(realizations.size());
    accuracies.reserve(realizations.size());

    for (const auto& realization : realizations) {
        DrawCounts counts;
        for (const auto& [pair_id, true_label] : realization.labels) {
            const auto& pred = preds.at(pair_id);
            if (!pred) {
                ++counts.excluded_by_truth[static_cast<std::size_t>(true_label)];
                ++counts.excluded_total;
                continue;
            }
            ++counts.matrix.cell(true_label, *pred);
            ++counts.matrix.total;
        }
        const auto metrics = metrics_from(counts, policy);
        precisions.push_back(metrics.macro_precision);
        recalls.push_back(metrics.macro_recall);
        accuracies.push_back(metrics.accuracy);
        for (std::size_t i = 0; i < 3; ++i) {
            class_precisions[i].push_back(metrics.per_class_precision[i]);
            class_recalls[i].push_back(metrics.per_class_recall[i]);
            class_supports[i].push_back(static_cast<double>(metrics.support[i]));
        }
    }

    EvalReport report;
    report.n_draws = n_draws;
    report.excluded_pairs = excluded_pairs;
    std::tie(report.macro_precision_mean, report.macro_precision_std) = mean_std(precisions);
    std::tie(report.macro_recall_mean, report.macro_recall_std) = mean_std(recalls);
    std::tie(report.accuracy_mean, report.accuracy_std) = mean_std(accuracies);
    for (std::size_t i = 0; i < 3; ++i) {
        report.per_class[i].precision_mean = mean_std(class_precisions[i]).first;
        report.per_class[i].recall_mean = mean_std(class_recalls[i]).first;
        report.per_class[i].support_mean = mean_std(class_supports[i]).first;
    }
    return report;
}

ClassDistribution class_distribution(const std::vector<LabelRealization>& realizations) {
    if (realizations.empty())
        raise(ErrorCode::empty_input, "class_distribution requires at least one realization");
    ClassDistribution dist;
    dist.total_pairs = realizations.front().labels.size();
    std::array<double, 3> sums{};
    for (const auto& realization : realizations) {
        std::array<long, 3> counts{};
        for (const auto& [pair_id, label] : realization.labels)
            ++counts[static_cast<std::size_t>(label)];
        for (std::size_t i = 0; i < 3; ++i) sums[i] += static_cast<double>(counts[i]);
    }
    for (std::size_t i = 0; i < 3; ++i) {
        dist.per_label[i].mean_count = sums[i] / static_cast<double>(realizations.size());
        dist.per_label[i].mean_percentage =
            dist.total_pairs > 0
                ? dist.per_label[i].mean_count / static_cast<double>(dist.total_pairs) * 100.0
                : 0.0;
    }
    return dist;
}

std::string format_eval_table(const std::vector<EvalRow>& rows) {
    std::size_t model_width = std::string("Model").size();
    std::size_t style_width = std::string("Prompt Style").size();
    for (const auto& row : rows) {
        model_width = std::max(model_width, row.model.size());
        style_width = std::max(style_width, row.prompt_style.size());
    }

    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(model_width) + 2) << "Model"
        << std::setw(static_cast<int>(style_width) + 2) << "Prompt Style" << std::right
        << std::setw(11) << "Precision" << std::setw(9) << "Recall" << std::setw(11)
        << "Accuracy" << '\n';
    out << std::string(model_width + style_width + 4 + 31, '-') << '\n';
    out << std::fixed << std::setprecision(3);
    for (const auto& row : rows) {
        out << std::left << std::setw(static_cast<int>(model_width) + 2) << row.model
            << std::setw(static_cast<int>(style_width) + 2) << row.prompt_style << std::right
            << std::setw(11) << row.report.macro_precision_mean << std::setw(9)
            << row.report.macro_recall_mean << std::setw(11) << row.report.accuracy_mean
            << '\n';
    }
    return out.str();
}

} // namespace factgpt
