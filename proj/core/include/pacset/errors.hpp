#ifndef PACSET_ERRORS_HPP
#define PACSET_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pacset {

/// Malformed arguments: unknown node ids, empty grids, out-of-range parameters.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A structurally valid request that breaks a domain constraint (e.g. too many holes).
class ConstraintError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No removal plan can satisfy the requested budgets.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Oracle invoked outside the instance sizes it is able to enumerate.
class OracleLimitError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& message, std::size_t offset)
        : InputError(message + " at offset " + std::to_string(offset))
        , offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Failure while reading a record file; names the offending record.
class LoadError : public std::runtime_error {
public:
    LoadError(const std::string& record_id, std::size_t line, const std::string& reason)
        : std::runtime_error("record '" + record_id + "' (line " + std::to_string(line)
                             + "): " + reason)
        , record_id_(record_id)
        , line_(line) {}

    const std::string& record_id() const noexcept { return record_id_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string record_id_;
    std::size_t line_;
};

} // namespace pacset

#endif // PACSET_ERRORS_HPP
