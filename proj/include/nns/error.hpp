#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nns {

enum class ErrorKind {
    parse,             // malformed input text
    structural,        // well-formed input violating a model/session invariant
    dimension,         // mismatched vector/matrix sizes
    insufficient_data, // too few correspondences, frames or samples
    degenerate,        // rank-deficient geometry
    rank_deficient,    // singular normal equations without regularization
    empty_session,     // nothing fittable
    cutoff,            // filter cutoff outside (0, Nyquist)
    parameter,         // invalid configuration value
    length,            // signal too short for the requested operation
    stage,             // operation applied to a signal in the wrong stage
    format,            // trajectory rows violating the file contract
    range,             // id or value outside its domain
    ordering,          // non-monotone timestamps
    version,           // unknown schema version
    not_found,
    validation,
    io,
};

std::string_view to_string(ErrorKind kind);

/// Error raised by every nns operation. Pipeline code attaches the stage
/// ("parse", "fit", "signal", "filter", "quantify") in which it occurred.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string stage = {});

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& stage() const noexcept { return stage_; }
    const std::string& message() const noexcept { return message_; }

    /// Copy of this error labelled with `stage` (an existing label is kept).
    Error with_stage(std::string stage) const;

private:
    ErrorKind kind_;
    std::string stage_;
    std::string message_;
};

} // namespace nns
