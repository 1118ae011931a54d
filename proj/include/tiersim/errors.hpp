#pragma once

#include <stdexcept>
#include <string>

namespace tiersim {

// Input text that does not conform to a document schema or grammar.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally well-formed input that violates a domain invariant.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem failures (missing files, unwritable paths).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Window bounds that cannot be produced (now before a landmark origin,
// no completed tumbling window yet).
struct WindowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tiersim
