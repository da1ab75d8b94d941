#pragma once

#include <stdexcept>
#include <string>

namespace liketally {

// Error categories shared between the C++ core and the C API status codes.
enum class errc {
    ok = 0,
    io,
    parse,
    schema,
    validation,
    config,
    missing_series,
    empty_group,
    empty_matrix,
    singular_design,
    nonconcave_at_optimum,
    bound,
    unknown_topic,
    no_topical_tweets,
    degenerate_score,
    incompatible_fits,
    domain,
    overflow,
    invalid_argument,
    internal,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, std::string module, const std::string& message)
        : std::runtime_error(message), code_(code), module_(std::move(module)) {}

    errc code() const { return code_; }
    const std::string& module() const { return module_; }

private:
    errc code_;
    std::string module_;
};

[[noreturn]] inline void raise(errc code, std::string module, const std::string& message) {
    throw Error(code, std::move(module), message);
}

}  // namespace liketally
