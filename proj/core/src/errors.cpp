#include "factgpt/errors.hpp"

namespace factgpt {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::config_invalid: return "ConfigInvalid";
        case ErrorCode::missing_input: return "MissingInput";
        case ErrorCode::empty_input: return "EmptyInput";
        case ErrorCode::empty_corpus: return "EmptyCorpus";
        case ErrorCode::duplicate_id: return "DuplicateId";
        case ErrorCode::unknown_doc: return "UnknownDoc";
        case ErrorCode::dimension_mismatch: return "DimensionMismatch";
        case ErrorCode::zero_vector: return "ZeroVector";
        case ErrorCode::empty_text: return "EmptyText";
        case ErrorCode::provider_unavailable: return "ProviderUnavailable";
        case ErrorCode::timeout: return "Timeout";
        case ErrorCode::script_miss: return "ScriptMiss";
        case ErrorCode::unparsable_response: return "UnparsableResponse";
        case ErrorCode::generation_exhausted: return "GenerationExhausted";
        case ErrorCode::no_votes: return "NoVotes";
        case ErrorCode::missing_order: return "MissingOrder";
        case ErrorCode::empty_class: return "EmptyClass";
        case ErrorCode::key_mismatch: return "KeyMismatch";
        case ErrorCode::empty_matrix: return "EmptyMatrix";
        case ErrorCode::io_failure: return "IoFailure";
        case ErrorCode::internal: return "Internal";
    }
    return "Internal";
}

} // namespace factgpt
