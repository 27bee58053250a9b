#pragma once

#include <stdexcept>
#include <string>

namespace crowdroute {

// Malformed instance or model file. `field()` names the offending key when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& field, const std::string& what)
        : std::runtime_error(what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Well-formed data that breaks a domain invariant (e.g. beta_b <= beta_c).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A route that violates structural rules (missing origin, delivery before pickup, ...).
class InvalidPlanError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A network trained for one (|J|, |K|) size class used on another.
class ProfileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace crowdroute
