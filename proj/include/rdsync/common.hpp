#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdsync {

using Point = std::vector<double>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: dimension mismatch, unknown family, invalid parameters.
class UsageError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure ran but could not produce a meaningful answer.
class DiagnosticError : public Error {
public:
    using Error::Error;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond)
        throw UsageError(what);
}

inline void require_dim(std::size_t got, std::size_t expected, const char* where)
{
    if (got != expected)
        throw UsageError(std::string(where) + ": dimension mismatch (got " + std::to_string(got) +
                         ", expected " + std::to_string(expected) + ")");
}

/// Taxicab distance.
double l1_distance(std::span<const double> a, std::span<const double> b);

} // namespace rdsync
