#pragma once

#include <stdexcept>
#include <string>

namespace nesslab {

/// A model parameter is outside its physical domain (negative temperature,
/// non-finite amplitude, mismatched dimensions, ...).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The steady-state equation has no unique normalized solution.
class DegenerateSteadyState : public std::runtime_error {
public:
    DegenerateSteadyState(const std::string& what, long null_dimension)
        : std::runtime_error(what), null_dimension_(null_dimension) {}

    /// Dimension of the null space of the generator, or -1 if unknown.
    long null_dimension() const noexcept { return null_dimension_; }

private:
    long null_dimension_;
};

/// Resistor network with a broken connector (zero conductance and no bath).
class DegenerateNetwork : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Explicit integration step too large for the stiffest rate.
class StiffnessError : public std::runtime_error {
public:
    StiffnessError(const std::string& what, double suggested_dt)
        : std::runtime_error(what), suggested_dt_(suggested_dt) {}

    double suggested_dt() const noexcept { return suggested_dt_; }

private:
    double suggested_dt_;
};

/// A CSV input lacks a required column.
class SchemaError : public std::runtime_error {
public:
    SchemaError(const std::string& what, std::string column)
        : std::runtime_error(what), column_(std::move(column)) {}

    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nesslab
