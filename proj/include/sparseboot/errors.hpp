#pragma once

#include <stdexcept>
#include <string>

namespace sparseboot {

// Base for every error raised by the library. The CLI maps IoError to exit
// code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class DegenerateColumnError : public Error {
public:
    using Error::Error;
};

// A row-selected submatrix A[I_j] had a zero column.
class DegenerateSubsetError : public Error {
public:
    DegenerateSubsetError(std::size_t subset, const std::string& what)
        : Error(what), subset_(subset) {}
    std::size_t subset() const noexcept { return subset_; }

private:
    std::size_t subset_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public Error {
public:
    using Error::Error;
};

class ResourceError : public Error {
public:
    using Error::Error;
};

class NumericalDivergence : public Error {
public:
    NumericalDivergence(int iteration, const std::string& what)
        : Error(what), iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sparseboot
