#include "factgpt/synth.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <unordered_map>

#include "factgpt/text.hpp"
#include "parallel.hpp"

namespace factgpt {

using nlohmann::ordered_json;

namespace {

bool starts_with_just(std::string_view text) {
    const auto trimmed = trim(text);
    if (trimmed.substr(0, 4) != "Just") return false;
    if (trimmed.size() == 4) return true;
    const auto next = static_cast<unsigned char>(trimmed[4]);
    return !std::isalnum(next);
}

} // namespace

std::array<std::size_t, 3> mix_counts(const MixSpec& mix) {
    double sum = 0.0;
    for (const double f : mix.fractions) {
        if (f < 0.0) raise(ErrorCode::config_invalid, "mix fractions must be >= 0");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        raise(ErrorCode::config_invalid, "mix fractions must sum to 1");

    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainders{};
    std::size_t allocated = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double quota = mix.fractions[i] * static_cast<double>(mix.total);
        counts[i] = static_cast<std::size_t>(std::floor(quota));
        remainders[i] = quota - std::floor(quota);
        allocated += counts[i];
    }
    std::array<std::size_t, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
        return a < b;
    });
    for (std::size_t i = 0; allocated < mix.total; ++i, ++allocated) ++counts[order[i % 3]];
    return counts;
}

std::vector<GenerationTask> plan_corpus(const std::vector<Claim>& claims,
                                        const std::vector<std::string>& generator_names) {
    std::vector<GenerationTask> plan;
    plan.reserve(claims.size() * 3 * 2 * generator_names.size());
    for (const auto& claim : claims) {
        for (const auto label : kAllLabels) {
            for (const auto order : kBothOrders) {
                for (const auto& name : generator_names) {
                    plan.push_back({claim.id, label, order, name});
                }
            }
        }
    }
    return plan;
}

SyntheticExample generate_for_claim(const ChatClient& client, const Claim& claim,
                                    EntailmentLabel target, PresentationOrder order,
                                    CallOptions options, const TemplateSet& templates) {
    options.default_temperature = 1.0;
    const auto prompt = render_generation_prompt(target, order, claim.text, templates);

    constexpr int kMaxAttempts = 3;
    std::string last_reason = "empty response";
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const auto completion = client.complete(prompt, options);
        if (completion.empty_or_refusal) {
            last_reason = "empty response";
            continue;
        }
        if (starts_with_just(completion.text)) {
            last_reason = "output starts with 'Just'";
            continue;
        }
        SyntheticExample example;
        example.claim_id = claim.id;
        example.generated_text = std::string(trim(completion.text));
        example.target_label = target;
        example.order = order;
        example.generator_model = client.spec().model_name;
        return example;
    }
    raise(ErrorCode::generation_exhausted,
          "claim " + claim.id + " (" + std::string(to_string(target)) + ", " +
              std::string(to_string(order)) + "): " + last_reason + " after " +
              std::to_string(kMaxAttempts) + " attempts");
}

std::pair<std::vector<SyntheticExample>, CorpusBuildReport> build_corpus(
    const std::vector<Claim>& claims, const std::vector<GeneratorRef>& generators,
    const CallOptions& options, const TemplateSet& templates, int parallelism) {
    std::vector<std::string> names;
    names.reserve(generators.size());
    std::map<std::string, const GeneratorRef*> by_name;
    for (const auto& g : generators) {
        names.push_back(g.name);
        by_name[g.name] = &g;
    }
    std::unordered_map<std::string, const Claim*> claims_by_id;
    for (const auto& c : claims) claims_by_id[c.id] = &c;

    const auto plan = plan_corpus(claims, names);

    CorpusBuildReport report;
    report.planned = plan.size();

    std::vector<std::optional<SyntheticExample>> slots(plan.size());
    std::vector<std::optional<GenerationFailure>> failures(plan.size());
    detail::parallel_for(plan.size(), parallelism, [&](std::size_t i) {
        const auto& task = plan[i];
        try {
            slots[i] = generate_for_claim(*by_name.at(task.generator)->client,
                                          *claims_by_id.at(task.claim_id), task.target,
                                          task.order, options, templates);
            // The corpus carries the configured generator name even when the
            // underlying model name differs.
            slots[i]->generator_model = task.generator;
        } catch (const Error& e) {
            failures[i] = GenerationFailure{task, e.what()};
        }
    });

    std::vector<SyntheticExample> corpus;
    std::set<std::tuple<std::string, int, int, std::string, std::string>> seen;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (failures[i]) {
            ++report.failed;
            report.failures.push_back(*failures[i]);
            continue;
        }
        const auto& ex = *slots[i];
        const auto key = std::make_tuple(ex.claim_id, static_cast<int>(ex.target_label),
                                         static_cast<int>(ex.order), ex.generator_model,
                                         ex.generated_text);
        if (!seen.insert(key).second) {
            ++report.deduplicated;
            continue;
        }
        corpus.push_back(ex);
    }
    report.generated = corpus.size();
    return {std::move(corpus), std::move(report)};
}

std::vector<SyntheticExample> sample_mix(const std::vector<SyntheticExample>& corpus,
                                         const MixSpec& mix, std::uint64_t seed) {
    const auto counts = mix_counts(mix);

    std::array<std::vector<std::size_t>, 3> classes;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        classes[static_cast<std::size_t>(corpus[i].target_label)].push_back(i);

    SeededRng rng(seed);
    std::vector<SyntheticExample> sampled;
    sampled.reserve(mix.total);
    for (const auto label : kAllLabels) {
        const auto li = static_cast<std::size_t>(label);
        const auto demand = counts[li];
        const auto& members = classes[li];
        if (demand == 0) continue;
        if (members.empty())
            raise(ErrorCode::empty_class,
                  "mix demands " + std::to_string(demand) + " examples of " +
                      std::string(to_string(label)) + " but the corpus has none");
        if (demand == members.size()) {
            for (const auto idx : members) sampled.push_back(corpus[idx]);
        } else if (demand < members.size()) {
            auto pool = members;
            rng.shuffle(pool);
            for (std::size_t i = 0; i < demand; ++i) sampled.push_back(corpus[pool[i]]);
        } else {
            for (std::size_t i = 0; i < demand; ++i)
                sampled.push_back(corpus[members[rng.uniform_index(members.size())]]);
        }
    }
    return sampled;
}

ClaimTextLookup make_claim_lookup(const std::vector<Claim>& claims) {
    auto table = std::make_shared<std::unordered_map<std::string, std::string>>();
    table->reserve(claims.size());
    for (const auto& c : claims) (*table)[c.id] = c.text;
    return [table](const std::string& claim_id) -> const std::string& {
        const auto it = table->find(claim_id);
        if (it == table->end()) raise(ErrorCode::unknown_doc, "no claim text for id " + claim_id);
        return it->second;
    };
}

std::vector<TrainRecord> make_train_records(const std::vector<SyntheticExample>& examples,
                                            const ClaimTextLookup& claim_text,
                                            const TemplateSet& templates) {
    std::vector<TrainRecord> records;
    records.reserve(examples.size());
    for (const auto& ex : examples) {
        TrainRecord record;
        record.messages = render_annotation_prompt(PromptStyle::annotation_only, ex.order,
                                                   ex.generated_text, claim_text(ex.claim_id),
                                                   templates);
        record.target_text = std::string(to_string(ex.target_label));
        records.push_back(std::move(record));
    }
    return records;
}

void export_train_file(const std::vector<TrainRecord>& records,
                       const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::io_failure, "cannot write " + path.string());
    for (const auto& record : records) {
        ordered_json j;
        auto messages = ordered_json::array();
        for (const auto& m : record.messages) {
            messages.push_back(
                {{"role", std::string(to_string(m.role))}, {"content", m.content}});
        }
        messages.push_back({{"role", "assistant"}, {"content", record.target_text}});
        j["messages"] = std::move(messages);
        out << j.dump() << '\n';
    }
    if (!out) raise(ErrorCode::io_failure, "failed writing " + path.string());
}

std::vector<TrainRecord> load_train_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::missing_input, "cannot open train file " + path.string());
    std::vector<TrainRecord> records;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fail = [&](const std::string& why) {
            raise(ErrorCode::io_failure, path.string() + ":" + std::to_string(lineno) + ": " + why);
        };
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("messages") || !j["messages"].is_array() ||
            j["messages"].size() < 2) {
            fail("expected {messages: [...]}");
        }
        TrainRecord record;
        const auto& messages = j["messages"];
        for (std::size_t i = 0; i + 1 < messages.size(); ++i) {
            const auto role = role_from_string(messages[i].at("role").get<std::string>());
            if (!role) fail("bad message role");
            record.messages.push_back({*role, messages[i].at("content").get<std::string>()});
        }
        const auto& last = messages.back();
        if (last.at("role").get<std::string>() != "assistant") fail("final message not assistant");
        record.target_text = last.at("content").get<std::string>();
        if (!label_from_string(record.target_text)) fail("target is not an entailment label");
        records.push_back(std::move(record));
    }
    return records;
}

void save_corpus(const std::vector<SyntheticExample>& corpus, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::io_failure, "cannot write " + path.string());
    for (const auto& ex : corpus) {
        ordered_json j;
        j["claim_id"] = ex.claim_id;
        j["generated_text"] = ex.generated_text;
        j["target_label"] = std::string(to_string(ex.target_label));
        j["order"] = std::string(to_string(ex.order));
        j["generator_model"] = ex.generator_model;
        out << j.dump() << '\n';
    }
}

std::vector<SyntheticExample> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::missing_input, "cannot open corpus " + path.string());
    std::vector<SyntheticExample> corpus;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fail = [&](const std::string& why) {
            raise(ErrorCode::io_failure, path.string() + ":" + std::to_string(lineno) + ": " + why);
        };
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) fail("malformed corpus record");
        SyntheticExample ex;
        ex.claim_id = j.at("claim_id").get<std::string>();
        ex.generated_text = j.at("generated_text").get<std::string>();
        const auto label = label_from_string(j.at("target_label").get<std::string>());
        if (!label) fail("bad target_label");
        ex.target_label = *label;
        const auto order = order_from_string(j.at("order").get<std::string>());
        if (!order) fail("bad order");
        ex.order = *order;
        ex.generator_model = j.at("generator_model").get<std::string>();
        corpus.push_back(std::move(ex));
    }
    return corpus;
}

} // namespace factgpt
