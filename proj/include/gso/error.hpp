#pragma once
#include <stdexcept>
#include <string>

namespace gso {

/// Malformed input: bad group indices, dimension mismatches, invalid parameters.
class input_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative routine ran out of budget before its stopping rule fired.
/// Carries the best residual reached so callers can decide what to do.
class convergence_error : public std::runtime_error
{
public:
    convergence_error(const std::string& what, double residual, long iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations)
    {}

    double residual() const noexcept { return residual_; }
    long iterations() const noexcept { return iterations_; }

private:
    double residual_;
    long iterations_;
};

/// NaN or Inf appeared in an iterate.
class numerical_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace gso
