#ifndef ISINGMAP_ERROR_HPP
#define ISINGMAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace isingmap {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DimensionMismatchError : Error {
    explicit DimensionMismatchError(const std::string& what) : Error("dimension mismatch: " + what) {}
};

struct IndexOutOfRangeError : Error {
    IndexOutOfRangeError(std::size_t index, std::size_t size)
        : Error("index " + std::to_string(index) + " out of range [0, " + std::to_string(size) + ")") {}
};

struct OutOfRangeError : Error {
    explicit OutOfRangeError(const std::string& what) : Error("value out of range: " + what) {}
};

struct EmptyInputError : Error {
    explicit EmptyInputError(const std::string& what) : Error("empty input: " + what) {}
};

struct DegenerateInputError : Error {
    explicit DegenerateInputError(const std::string& what) : Error("degenerate input: " + what) {}
};

}  // namespace isingmap

#endif
