#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "factgpt/errors.hpp"
#include "factgpt/eval.hpp"

using namespace factgpt;

namespace {

constexpr auto E = EntailmentLabel::entailment;
constexpr auto N = EntailmentLabel::neutral;
constexpr auto C = EntailmentLabel::contradiction;

/// The worked four-pair example: truth [E,E,N,C], predictions [E,N,N,C].
std::pair<std::map<std::string, EntailmentLabel>, std::map<std::string, EntailmentLabel>>
four_pair_example() {
    std::map<std::string, EntailmentLabel> truth = {
        {"p1", E}, {"p2", E}, {"p3", N}, {"p4", C}};
    std::map<std::string, EntailmentLabel> preds = {
        {"p1", E}, {"p2", N}, {"p3", N}, {"p4", C}};
    return {truth, preds};
}

std::vector<DirectionalJudgment> unanimous_votes(
    const std::map<std::string, std::pair<EntailmentLabel, EntailmentLabel>>& per_pair) {
    std::vector<DirectionalJudgment> votes;
    for (const auto& [pair_id, labels] : per_pair) {
        for (int r = 1; r <= 5; ++r) {
            votes.push_back({pair_id, PresentationOrder::post_first,
                             "r" + std::to_string(r), labels.first});
            votes.push_back({pair_id, PresentationOrder::claim_first,
                             "r" + std::to_string(r), labels.second});
        }
    }
    return votes;
}

} // namespace

TEST_CASE("confusion counts cells over matching key sets") {
    const auto [truth, preds] = four_pair_example();
    const auto cm = confusion(truth, preds);
    CHECK(cm.total == 4);
    CHECK(cm.cell(E, E) == 1);
    CHECK(cm.cell(E, N) == 1);
    CHECK(cm.cell(N, N) == 1);
    CHECK(cm.cell(C, C) == 1);
    CHECK(cm.cell(C, E) == 0);

    std::map<std::string, EntailmentLabel> perfect = truth;
    const auto diag = confusion(truth, perfect);
    long trace = 0;
    for (int i = 0; i < 3; ++i) trace += diag.cells[i][i];
    CHECK(trace == 4);
}

TEST_CASE("confusion raises KeyMismatch on different key sets") {
    std::map<std::string, EntailmentLabel> truth = {{"a", E}, {"b", N}};
    std::map<std::string, EntailmentLabel> disjoint = {{"c", E}, {"d", N}};
    std::map<std::string, EntailmentLabel> short_preds = {{"a", E}};
    try {
        confusion(truth, disjoint);
        FAIL("expected KeyMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::key_mismatch);
    }
    CHECK_THROWS_AS(confusion(truth, short_preds), Error);
}

TEST_CASE("macro metrics match the hand-computed example") {
    const auto [truth, preds] = four_pair_example();
    const auto metrics = macro_metrics(confusion(truth, preds));
    CHECK(std::abs(metrics.macro_precision - 2.5 / 3.0) < 1e-12);
    CHECK(std::abs(metrics.macro_recall - 2.5 / 3.0) < 1e-12);
    CHECK(std::abs(metrics.accuracy - 0.75) < 1e-12);

    CHECK(metrics.per_class_precision[0] == doctest::Approx(1.0));
    CHECK(metrics.per_class_precision[1] == doctest::Approx(0.5));
    CHECK(metrics.per_class_recall[0] == doctest::Approx(0.5));
    CHECK(metrics.per_class_recall[1] == doctest::Approx(1.0));
    CHECK(metrics.support == std::array<long, 3>{2, 1, 1});
}

TEST_CASE("perfect predictions score 1/1/1") {
    const auto [truth, unused] = four_pair_example();
    const auto metrics = macro_metrics(confusion(truth, truth));
    CHECK(metrics.macro_precision == doctest::Approx(1.0));
    CHECK(metrics.macro_recall == doctest::Approx(1.0));
    CHECK(metrics.accuracy == doctest::Approx(1.0));
}

TEST_CASE("degenerate one-class predictions: that recall 1, the others 0") {
    std::map<std::string, EntailmentLabel> truth = {
        {"a", E}, {"b", E}, {"c", N}, {"d", C}};
    std::map<std::string, EntailmentLabel> all_e;
    for (const auto& [k, unused] : truth) all_e[k] = E;
    const auto metrics = macro_metrics(confusion(truth, all_e));
    CHECK(metrics.per_class_recall[0] == doctest::Approx(1.0));
    CHECK(metrics.per_class_recall[1] == doctest::Approx(0.0));
    CHECK(metrics.per_class_recall[2] == doctest::Approx(0.0));
    // Classes never predicted have zero-denominator precision, defined as 0.
    CHECK(metrics.per_class_precision[1] == doctest::Approx(0.0));
    CHECK(metrics.accuracy == doctest::Approx(0.5));
}

TEST_CASE("an empty matrix is an error") {
    CHECK_THROWS_AS(macro_metrics(ConfusionMatrix{}), Error);
}

TEST_CASE("metrics are invariant under pair reordering") {
    const auto [truth, preds] = four_pair_example();
    // std::map already canonicalizes order; rebuild in reverse to prove the
    // point explicitly.
    std::map<std::string, EntailmentLabel> truth_r(truth.rbegin(), truth.rend());
    std::map<std::string, EntailmentLabel> preds_r(preds.rbegin(), preds.rend());
    const auto a = macro_metrics(confusion(truth, preds));
    const auto b = macro_metrics(confusion(truth_r, preds_r));
    CHECK(a.macro_precision == b.macro_precision);
    CHECK(a.macro_recall == b.macro_recall);
    CHECK(a.accuracy == b.accuracy);
}

TEST_CASE("no tied tallies: stds are exactly zero and means match one draw") {
    const auto votes = unanimous_votes(
        {{"p1", {E, N}}, {"p2", {C, C}}, {"p3", {N, N}}, {"p4", {E, E}}});
    std::map<std::string, std::optional<EntailmentLabel>> preds = {
        {"p1", E}, {"p2", C}, {"p3", N}, {"p4", N}};

    const auto report = monte_carlo_evaluate(votes, preds, 1000, 17);
    CHECK(report.macro_precision_std == 0.0);
    CHECK(report.macro_recall_std == 0.0);
    CHECK(report.accuracy_std == 0.0);

    const auto single = monte_carlo_evaluate(votes, preds, 1, 17);
    CHECK(report.accuracy_mean == single.accuracy_mean);
    CHECK(report.macro_precision_mean == single.macro_precision_mean);
    CHECK(single.accuracy_std == 0.0);
    CHECK(report.n_draws == 1000);
}

TEST_CASE("the single-tie fixture lands near the analytic mixture") {
    // One pair: post-first votes tie {E, N}, claim-first majority N. The
    // realized truth is E or N with probability 1/2 each; predicting E gives
    // accuracy 1 or 0 accordingly.
    std::vector<DirectionalJudgment> votes;
    const std::vector<EntailmentLabel> pf = {E, E, N, N, C};
    const std::vector<EntailmentLabel> cf = {N, N, N, E, C};
    for (int r = 0; r < 5; ++r) {
        votes.push_back({"pt", PresentationOrder::post_first, "r" + std::to_string(r), pf[r]});
        votes.push_back({"pt", PresentationOrder::claim_first, "r" + std::to_string(r), cf[r]});
    }
    std::map<std::string, std::optional<EntailmentLabel>> preds = {{"pt", E}};

    const int n_draws = 1000;
    const auto report = monte_carlo_evaluate(votes, preds, n_draws, 20240311);
    const double bound = 3.0 * std::sqrt(0.25 / n_draws);
    CHECK(std::abs(report.accuracy_mean - 0.5) <= bound);
    CHECK(report.accuracy_std > 0.0);
}

TEST_CASE("monte_carlo_evaluate is bit-reproducible") {
    const auto votes = unanimous_votes({{"p1", {E, N}}, {"p2", {N, C}}});
    std::map<std::string, std::optional<EntailmentLabel>> preds = {{"p1", E}, {"p2", N}};
    const auto a = monte_carlo_evaluate(votes, preds, 200, 5);
    const auto b = monte_carlo_evaluate(votes, preds, 200, 5);
    CHECK(a.macro_precision_mean == b.macro_precision_mean);
    CHECK(a.macro_recall_mean == b.macro_recall_mean);
    CHECK(a.accuracy_mean == b.accuracy_mean);
    CHECK(a.macro_precision_std == b.macro_precision_std);
    CHECK(a.accuracy_std == b.accuracy_std);
}

TEST_CASE("unresolved predictions are excluded or counted as wrong by policy") {
    const auto votes = unanimous_votes(
        {{"p1", {E, E}}, {"p2", {N, N}}, {"p3", {C, C}}, {"p4", {N, N}}});
    std::map<std::string, std::optional<EntailmentLabel>> preds = {
        {"p1", E}, {"p2", N}, {"p3", C}, {"p4", std::nullopt}};

    const auto excluded = monte_carlo_evaluate(votes, preds, 10, 3,
                                               UnresolvedPolicy::exclude);
    CHECK(excluded.excluded_pairs == 1);
    CHECK(excluded.accuracy_mean == doctest::Approx(1.0));  // 3 of 3 scored

    const auto as_wrong = monte_carlo_evaluate(votes, preds, 10, 3,
                                               UnresolvedPolicy::count_as_wrong);
    CHECK(as_wrong.excluded_pairs == 1);
    CHECK(as_wrong.accuracy_mean == doctest::Approx(0.75));  // 3 of 4
    // p4's truth is neutral, so neutral recall drops to 1/2 under the policy.
    CHECK(as_wrong.per_class[1].recall_mean == doctest::Approx(0.5));
}

TEST_CASE("prediction key sets must match the voted pairs") {
    const auto votes = unanimous_votes({{"p1", {E, E}}});
    std::map<std::string, std::optional<EntailmentLabel>> missing;
    CHECK_THROWS_AS(monte_carlo_evaluate(votes, missing, 5, 1), Error);

    std::map<std::string, std::optional<EntailmentLabel>> extra = {{"p1", E}, {"zz", N}};
    try {
        monte_carlo_evaluate(votes, extra, 5, 1);
        FAIL("expected KeyMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::key_mismatch);
    }
}

TEST_CASE("class distribution reports mean counts and percentages") {
    LabelRealization r;
    r.draw_index = 0;
    r.labels = {{"a", E}, {"b", E}, {"c", N}, {"d", C}};
    const auto dist = class_distribution({r});
    CHECK(dist.total_pairs == 4);
    CHECK(dist.per_label[0].mean_count == doctest::Approx(2.0));
    CHECK(dist.per_label[0].mean_percentage == doctest::Approx(50.0));
    CHECK(dist.per_label[1].mean_percentage == doctest::Approx(25.0));

    const double pct_sum = dist.per_label[0].mean_percentage +
                           dist.per_label[1].mean_percentage +
                           dist.per_label[2].mean_percentage;
    CHECK(std::abs(pct_sum - 100.0) < 1e-9);

    CHECK_THROWS_AS(class_distribution({}), Error);
}

TEST_CASE("a tied pair produces fractional mean counts") {
    // One pair always E; a second pair ties {E, N} post-first with
    // claim-first N, so its final label is E or N per draw.
    std::vector<DirectionalJudgment> votes;
    const auto add_vote = [&](const std::string& pair, PresentationOrder order, int rater,
                              EntailmentLabel label) {
        votes.push_back({pair, order, "r" + std::to_string(rater), label});
    };
    for (int r = 0; r < 5; ++r) {
        add_vote("fixed", PresentationOrder::post_first, r, E);
        add_vote("fixed", PresentationOrder::claim_first, r, E);
    }
    const std::vector<EntailmentLabel> pf = {E, E, N, N, C};
    const std::vector<EntailmentLabel> cf = {N, N, N, E, C};
    for (int r = 0; r < 5; ++r) {
        add_vote("tied", PresentationOrder::post_first, r, pf[r]);
        add_vote("tied", PresentationOrder::claim_first, r, cf[r]);
    }

    const auto realizations = realize_labels(votes, 1000, 8);
    const auto dist = class_distribution(realizations);
    CHECK(dist.total_pairs == 2);
    // Expected E count: 1 (fixed) + ~0.5 (tied), within 3 sigma.
    const double bound = 3.0 * std::sqrt(0.25 / 1000.0);
    CHECK(std::abs(dist.per_label[0].mean_count - 1.5) <= bound);
    CHECK(dist.per_label[2].mean_count == doctest::Approx(0.0));

    // No-tie datasets keep counts identical across draws.
    const auto fixed_only = realize_labels(
        unanimous_votes({{"p1", {E, E}}, {"p2", {C, C}}}), 100, 9);
    const auto fixed_dist = class_distribution(fixed_only);
    CHECK(fixed_dist.per_label[0].mean_count == doctest::Approx(1.0));
    CHECK(fixed_dist.per_label[2].mean_count == doctest::Approx(1.0));
}

TEST_CASE("the summary table mirrors the five-column layout") {
    EvalReport report;
    report.macro_precision_mean = 0.8333;
    report.macro_recall_mean = 0.8333;
    report.accuracy_mean = 0.75;
    const auto table = format_eval_table({{"mock-annotator", "annotation-only", report}});
    CHECK(table.find("Model") != std::string::npos);
    CHECK(table.find("Prompt Style") != std::string::npos);
    CHECK(table.find("Precision") != std::string::npos);
    CHECK(table.find("Recall") != std::string::npos);
    CHECK(table.find("Accuracy") != std::string::npos);
    CHECK(table.find("mock-annotator") != std::string::npos);
    CHECK(table.find("0.833") != std::string::npos);
    CHECK(table.find("0.750") != std::string::npos);
}
