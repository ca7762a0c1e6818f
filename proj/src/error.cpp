#include "nns/error.hpp"

namespace nns {

namespace {

std::string compose(ErrorKind kind, const std::string& message, const std::string& stage)
{
    std::string out;
    if (!stage.empty()) {
        out += "[" + stage + "] ";
    }
    out += std::string(to_string(kind)) + " error: " + message;
    return out;
}

} // namespace

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::structural: return "structural";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::degenerate: return "degenerate-configuration";
    case ErrorKind::rank_deficient: return "rank-deficiency";
    case ErrorKind::empty_session: return "empty-session";
    case ErrorKind::cutoff: return "cutoff";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::length: return "length";
    case ErrorKind::stage: return "stage";
    case ErrorKind::format: return "format";
    case ErrorKind::range: return "range";
    case ErrorKind::ordering: return "ordering";
    case ErrorKind::version: return "version";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::validation: return "validation";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::string stage)
    : std::runtime_error(compose(kind, message, stage)), kind_(kind), stage_(std::move(stage)),
      message_(message)
{
}

Error Error::with_stage(std::string stage) const
{
    if (!stage_.empty()) {
        return *this;
    }
    return Error(kind_, message_, std::move(stage));
}

} // namespace nns
