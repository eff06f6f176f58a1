#pragma once

#include <stdexcept>
#include <string>

namespace rpt {

// Malformed automaton text. `where` names the line or field at fault.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configured exploration cap was exceeded.
class ResourceError : public std::runtime_error {
public:
    ResourceError(std::string cap, const std::string& what)
        : std::runtime_error(what), cap_(std::move(cap)) {}
    const std::string& cap() const noexcept { return cap_; }

private:
    std::string cap_;
};

// Exploration caps. Defaults may be overridden from the environment
// (RPT_SUBSET_CAP, RPT_PATH_CAP, RPT_COMBO_CAP) by `Limits::from_env`.
struct Limits {
    std::size_t subset_states = std::size_t{1} << 20;
    std::size_t scc_paths = 100000;
    std::size_t combinations = 2000000;

    static Limits from_env();
};

}  // namespace rpt
