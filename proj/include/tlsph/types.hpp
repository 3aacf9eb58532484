/**
 * @file types.hpp
 * @brief Fixed-size linear algebra aliases and the error hierarchy shared by all modules.
 */

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tlsph {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;

template <int Dim>
using Mat = Eigen::Matrix<double, Dim, Dim>;

using Vec3 = Vec<3>;
using Mat3 = Mat<3>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A particle neighbourhood cannot support the requested kernel correction.
class SingularNeighborhoodError : public Error {
public:
    SingularNeighborhoodError(std::size_t particle, const std::string& what)
        : Error("singular neighbourhood at particle " + std::to_string(particle) + ": " + what),
          particle_(particle) {}

    std::size_t particle() const noexcept { return particle_; }

private:
    std::size_t particle_;
};

/// det(F) <= 0 was encountered when evaluating a constitutive response.
class InversionError : public Error {
public:
    InversionError(std::size_t particle, double det)
        : Error("element inversion at particle " + std::to_string(particle) +
                " (det F = " + std::to_string(det) + ")"),
          particle_(particle), det_(det) {}

    std::size_t particle() const noexcept { return particle_; }
    double determinant() const noexcept { return det_; }

private:
    std::size_t particle_;
    double det_;
};

/// Non-finite state or a non-positive time step.
class InstabilityError : public Error {
public:
    InstabilityError(double time, const std::string& what)
        : Error("instability at t = " + std::to_string(time) + ": " + what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Two distinct neighbours share a reference position.
class CorruptNeighborTableError : public Error {
public:
    using Error::Error;
};

/// Invalid or incomplete case configuration; `field()` is a dotted path such as `initial.omega3`.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace tlsph
