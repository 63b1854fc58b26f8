#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chainlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NegativeEntry : public Error {
public:
    NegativeEntry(std::size_t i, std::size_t j, double value)
        : Error("negative entry at (" + std::to_string(i) + ", " + std::to_string(j) +
                "): " + std::to_string(value)),
          row(i), col(j) {}
    std::size_t row;
    std::size_t col;
};

class RowSumViolation : public Error {
public:
    RowSumViolation(std::size_t i, double s)
        : Error("row " + std::to_string(i) + " sums to " + std::to_string(s)), row(i), sum(s) {}
    std::size_t row;
    double sum;
};

class NotSquare : public Error {
public:
    using Error::Error;
};

class HorizonExceeded : public Error {
public:
    using Error::Error;
};

class OrderMismatch : public Error {
public:
    using Error::Error;
};

class OrderTooLarge : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class InconsistentClustering : public Error {
public:
    using Error::Error;
};

class InfiniteM : public Error {
public:
    InfiniteM() : Error("balanced-asymmetry constant is infinite; Lyapunov series undefined") {}
};

class KernelBoundViolated : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class ManifestError : public Error {
public:
    ManifestError(const std::string& field, const std::string& what)
        : Error("manifest field '" + field + "': " + what), field_name(field) {}
    std::string field_name;
};

class MissingArtifact : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace chainlab
