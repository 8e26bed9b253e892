#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace winnow {

// Embedding vectors are plain dense vectors; every vector in one pipeline
// run shares a single dimension.
using Embedding = std::vector<double>;

// One retrieved passage. `rank` is the 1-based retrieval rank; `embedding`
// is optional precomputed data carried by the dataset file.
struct RetrievedDocument {
    std::string id;
    std::string title;
    std::string text;
    int rank = 0;
    std::optional<Embedding> embedding;
};

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller violated a precondition (empty input, length mismatch, ...).
struct InputError : Error {
    using Error::Error;
};

// Inconsistent configuration, e.g. mixed embedding dimensions.
struct ConfigError : Error {
    using Error::Error;
};

// A backend (HTTP chat or embedding endpoint) failed after retries.
struct BackendError : Error {
    using Error::Error;
};

// The backend answered but the payload had no usable text.
struct MalformedResponseError : Error {
    using Error::Error;
};

// Structured model output could not be parsed; carries the raw text.
struct ParseError : Error {
    explicit ParseError(const std::string& message, std::string raw_text = {})
        : Error(message), raw(std::move(raw_text)) {}
    std::string raw;
};

}  // namespace winnow
