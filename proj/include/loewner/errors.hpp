#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace loewner {

using cplx = std::complex<double>;

// Root of every failure raised by the library. Subclasses carry the
// structured context a caller needs to report or recover.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    DomainError(const std::string& what, std::string subexpr)
        : Error(what), subexpression(std::move(subexpr)) {}
    std::string subexpression;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t off, std::vector<std::string> exp)
        : Error(what), offset(off), expected(std::move(exp)) {}
    std::size_t offset;
    std::vector<std::string> expected;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(const std::string& name, std::size_t off)
        : Error("unknown identifier '" + name + "' at offset " + std::to_string(off)),
          identifier(name), offset(off) {}
    std::string identifier;
    std::size_t offset;
};

class BoundaryEscape : public Error {
public:
    BoundaryEscape(double t_, cplx w_)
        : Error("trajectory reached the unit circle at t=" + std::to_string(t_)), t(t_), w(w_) {}
    double t;
    cplx w;
};

class StepUnderflow : public Error {
public:
    explicit StepUnderflow(double t_)
        : Error("adaptive step underflow at t=" + std::to_string(t_)), t(t_) {}
    double t;
};

class NotConverged : public Error {
public:
    NotConverged(const std::string& what, double horizon_, double last_delta_)
        : Error(what), horizon(horizon_), last_delta(last_delta_) {}
    double horizon;
    double last_delta;
};

class NewtonStall : public Error {
public:
    NewtonStall(const std::string& what, std::vector<cplx> its)
        : Error(what), iterates(std::move(its)) {}
    std::vector<cplx> iterates;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ExtrapolationUnstable : public Error {
public:
    using Error::Error;
};

class CalibrationDegenerate : public Error {
public:
    using Error::Error;
};

class PoleNearContour : public Error {
public:
    PoleNearContour(const std::string& what, double dist) : Error(what), distance(dist) {}
    double distance;
};

class WindingAmbiguous : public Error {
public:
    WindingAmbiguous(const std::string& what, cplx probe_) : Error(what), probe(probe_) {}
    cplx probe;
};

} // namespace loewner
