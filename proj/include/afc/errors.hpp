#pragma once

#include <stdexcept>
#include <string>

namespace afc {

// Bad setup: grids, parameter ranges, structural constraints. CLI exit code 1.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A parameter set violating a named structural inequality.
class constraint_error : public config_error {
public:
    explicit constraint_error(const std::string& msg) : config_error(msg) {}
};

// Analysis cannot proceed on the given data (windows, statistics). CLI exit code 2.
class analysis_error : public std::runtime_error {
public:
    explicit analysis_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace afc
