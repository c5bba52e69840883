// factgpt: pair social posts with debunked claims, label the pairs with
// chat-completion providers, synthesize fine-tuning data and evaluate
// predictions against human judgments.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "factgpt/errors.hpp"
#include "factgpt/pipeline.hpp"
#include "factgpt/prompts.hpp"

namespace {

using namespace factgpt;

// Distinct exit code per error class: 10 + the ErrorCode enum value.
// 0 = success, 1 = unexpected failure, 2 = bad command line.
int exit_code_for(ErrorCode code) { return 10 + static_cast<int>(code); }

struct CommonArgs {
    std::string config_path;
    std::string workdir;
    std::optional<std::uint64_t> seed;
    std::optional<int> draws;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Run configuration file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--workdir", args.workdir, "Override the configured working directory");
    cmd->add_option("--seed", args.seed, "Override base_seed");
    cmd->add_option("--draws", args.draws, "Override n_draws");
}

RunConfig load_config(const CommonArgs& args) {
    RunConfig config = RunConfig::load(args.config_path);
    if (!args.workdir.empty()) config.workdir = std::filesystem::absolute(args.workdir);
    if (args.seed) config.base_seed = *args.seed;
    if (args.draws) config.n_draws = *args.draws;
    config.validate();
    return config;
}

PromptStyle parse_style_flag(const std::string& style) {
    const auto parsed = style_from_string(style);
    if (!parsed) raise(ErrorCode::config_invalid, "unknown style " + style);
    return *parsed;
}

AnnotateOrders parse_order_flag(const std::string& order) {
    if (order == "both") return AnnotateOrders::both;
    if (order == "post-first") return AnnotateOrders::post_first_only;
    if (order == "claim-first") return AnnotateOrders::claim_first_only;
    raise(ErrorCode::config_invalid, "unknown order " + order);
}

MixChoice parse_mix_flag(const std::string& mix, const RunConfig& config) {
    if (mix == "balanced") return MixChoice{MixPreset::balanced, {}, config.mix.total};
    if (mix == "imbalanced") return MixChoice{MixPreset::imbalanced, {}, config.mix.total};
    if (mix == "custom") {
        if (config.mix.preset != MixPreset::custom)
            raise(ErrorCode::config_invalid, "--mix custom requires custom fractions in the config");
        return config.mix;
    }
    raise(ErrorCode::config_invalid, "unknown mix " + mix);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"factgpt: claim-matching and entailment-labeling pipeline"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string provider, style = "annotation-only", order = "both", mix;
    bool sweep_conditions = false;

    auto* cmd_ingest = app.add_subcommand("ingest", "Filter and store claims and posts");
    add_common(cmd_ingest, args);

    auto* cmd_index = app.add_subcommand("index", "Build the BM25 index over ingested posts");
    add_common(cmd_index, args);

    auto* cmd_pair = app.add_subcommand("pair", "Retrieve, rerank and select claim-post pairs");
    add_common(cmd_pair, args);
    cmd_pair->add_option("--provider", provider, "Embedding provider name (config override)");

    auto* cmd_annotate =
        app.add_subcommand("annotate", "Label pairs with a chat-completion provider");
    add_common(cmd_annotate, args);
    cmd_annotate->add_option("--provider", provider, "Chat provider name");
    cmd_annotate->add_option("--style", style,
                             "annotation-only|zero-shot|zero-shot-cot|few-shot-cot");
    cmd_annotate->add_option("--order", order, "post-first|claim-first|both");
    cmd_annotate->add_flag("--conditions", sweep_conditions,
                           "Sweep the config's condition matrix");

    auto* cmd_gen = app.add_subcommand("gen", "Generate synthetic posts per claim");
    add_common(cmd_gen, args);

    auto* cmd_export =
        app.add_subcommand("export", "Resample, split and export fine-tuning files");
    add_common(cmd_export, args);
    cmd_export->add_option("--mix", mix, "balanced|imbalanced|custom");

    auto* cmd_eval = app.add_subcommand("eval", "Score annotations against human judgments");
    add_common(cmd_eval, args);

    auto* cmd_run = app.add_subcommand("run", "Run every stage in order");
    add_common(cmd_run, args);
    cmd_run->add_option("--mix", mix, "balanced|imbalanced|custom");

    std::string templates_export, templates_check;
    auto* cmd_templates = app.add_subcommand("templates", "Export or check prompt templates");
    cmd_templates->add_option("--export-dir", templates_export,
                              "Write the built-in templates to a directory");
    cmd_templates->add_option("--check", templates_check,
                              "Validate a template directory");

    auto* cmd_version = app.add_subcommand("version", "Print the tool version");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_version->parsed()) {
            std::cout << kToolVersion << '\n';
            return 0;
        }
        if (cmd_templates->parsed()) {
            if (templates_export.empty() && templates_check.empty())
                raise(ErrorCode::config_invalid, "templates needs --export-dir or --check");
            if (!templates_export.empty()) {
                TemplateSet::builtin().export_to(templates_export);
                std::cout << "templates written to " << templates_export << '\n';
            }
            if (!templates_check.empty()) {
                TemplateSet::load(templates_check);
                std::cout << "templates in " << templates_check << " are loadable\n";
            }
            return 0;
        }

        RunConfig config = load_config(args);
        PipelineRunner runner(std::move(config));

        if (cmd_ingest->parsed()) {
            runner.run_ingest();
        } else if (cmd_index->parsed()) {
            runner.run_index();
        } else if (cmd_pair->parsed()) {
            runner.run_pair(provider);
        } else if (cmd_annotate->parsed()) {
            if (sweep_conditions) {
                runner.run_annotate_conditions();
            } else {
                std::string chosen = provider;
                if (chosen.empty()) {
                    if (runner.config().annotation_providers.empty())
                        raise(ErrorCode::config_invalid,
                              "no --provider given and no annotation_providers configured");
                    chosen = runner.config().annotation_providers.front();
                }
                runner.run_annotate(chosen, parse_style_flag(style), parse_order_flag(order));
            }
        } else if (cmd_gen->parsed()) {
            runner.run_gen();
        } else if (cmd_export->parsed()) {
            runner.run_export(mix.empty() ? std::nullopt
                                          : std::make_optional(
                                                parse_mix_flag(mix, runner.config())));
        } else if (cmd_eval->parsed()) {
            runner.run_eval();
        } else if (cmd_run->parsed()) {
            runner.run_ingest();
            runner.run_index();
            runner.run_pair(provider);
            runner.run_annotate_conditions();
            runner.run_gen();
            runner.run_export(mix.empty() ? std::nullopt
                                          : std::make_optional(
                                                parse_mix_flag(mix, runner.config())));
            runner.run_eval();
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "factgpt: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "factgpt: unexpected error: " << e.what() << '\n';
        return 1;
    }
}
