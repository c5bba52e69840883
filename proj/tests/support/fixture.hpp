#pragma once

// Deterministic toy fixture: 8 claims, 40 posts (plus records the filters
// must reject), unanimous human judgments, and mock provider scripts that
// cover every prompt the pipeline issues. factgpt_fixture_gen regenerates
// the checked-in copies from this code.

#include <filesystem>
#include <string>

#include "factgpt/labels.hpp"
#include "factgpt/pipeline.hpp"

namespace factgpt::testing {

std::string fixture_claims_jsonl();
std::string fixture_posts_jsonl();

/// Unanimous verdict of the five scripted human raters for one (pair, order).
EntailmentLabel fixture_human_label(const std::string& pair_id, PresentationOrder order);

/// The scripted mock annotator's verdict for one (pair, order).
EntailmentLabel fixture_model_label(const std::string& pair_id, PresentationOrder order);

/// Writes claims.jsonl, posts.jsonl, judgments.jsonl, chat_script.jsonl,
/// gen_script.jsonl and config.json into dir.
void write_fixture(const std::filesystem::path& dir);

/// Writes the golden prompt renderings (4 annotation styles x 2 orders plus
/// 3 generation targets x 2 orders) into dir.
void write_goldens(const std::filesystem::path& dir);

/// Loads the fixture config with the workdir redirected somewhere writable.
RunConfig fixture_config(const std::filesystem::path& fixture_dir,
                         const std::filesystem::path& workdir);

/// Creates a fresh unique directory under the system temp root.
std::filesystem::path make_temp_dir(const std::string& tag);

} // namespace factgpt::testing
