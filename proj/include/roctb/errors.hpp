#pragma once

#include <stdexcept>
#include <string>

namespace roctb {

/// Input outside the region where an operation is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative solve did not reach its tolerance.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

enum class Body { Center, Primary };

/// A potential or force was requested at a body's position.
class SingularityError : public std::runtime_error {
public:
    SingularityError(Body body, double time)
        : std::runtime_error(std::string("singular evaluation at the ") +
                             (body == Body::Center ? "center" : "primary") +
                             " (t = " + std::to_string(time) + ")"),
          body_(body), time_(time) {}

    Body body() const noexcept { return body_; }
    double time() const noexcept { return time_; }

private:
    Body body_;
    double time_;
};

/// Malformed run file.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace roctb
