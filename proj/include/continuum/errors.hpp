#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace continuum {

// Every error the library raises derives from Error. `field()` names the
// offending input (dotted path) when one exists, so front ends can report it.
class Error : public std::runtime_error {
public:
    Error(std::string code, std::string field, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)), field_(std::move(field)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string code_;
    std::string field_;
};

class DomainError : public Error {
public:
    DomainError(std::string field, const std::string& msg)
        : Error("domain_error", std::move(field), msg) {}
};

class InsufficientMemory : public Error {
public:
    explicit InsufficientMemory(const std::string& msg)
        : Error("insufficient_memory", "fence_filter_memory_bits", msg) {}
};

class UnknownPreset : public Error {
public:
    explicit UnknownPreset(const std::string& name)
        : Error("unknown_preset", "preset", "unknown preset '" + name + "'") {}
};

class SpecError : public Error {
public:
    SpecError(std::string field, const std::string& msg)
        : Error("spec_error", std::move(field), msg) {}
};

class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& msg)
        : Error("config_error", std::move(field), msg) {}
};

class EmptyStats : public Error {
public:
    explicit EmptyStats(const std::string& msg) : Error("empty_stats", "", msg) {}
};

class ParseError : public Error {
public:
    ParseError(std::string field, const std::string& msg, std::size_t line = 0)
        : Error("parse_error", std::move(field),
                line ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class OutOfRange : public Error {
public:
    explicit OutOfRange(const std::string& msg) : Error("out_of_range", "page_id", msg) {}
};

}  // namespace continuum
