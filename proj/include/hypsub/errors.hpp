#pragma once

#include <stdexcept>
#include <string>

namespace hypsub {

// Error families, mapped to CLI exit codes by the pipeline.
enum class ErrorKind {
    size,
    inconsistent_boundary,
    degenerate_seed,
    flatness,
    degenerate_angle,
    degeneracy,
    regularity,
    hyperbolicity_violation,
    data_inconsistency,
    inadmissible_pair,
    boundary,
    precondition,
    empty_domain,
    sign,
    escape,
    ambiguous_rank,
    reparametrize_window,
    config,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// True for failures caused by the numerical data rather than the request.
bool is_numerical(ErrorKind k);

}  // namespace hypsub
