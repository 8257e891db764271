#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hogface {

/// Invalid argument: bad dimensions, out-of-range parameters, malformed protocols.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation attempted against inconsistent state (empty gallery, basis/gallery mismatch).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Image decoding failure. Carries the byte offset where decoding stopped.
class DecodeError : public std::runtime_error {
public:
    DecodeError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Dataset loading failure. The message names the offending path.
class LoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hogface
