#pragma once

#include <stdexcept>
#include <string>

namespace adaptid {

/// Raised when a simulation produces a non-finite state or an estimate
/// diverges. Carries the simulation time at which the guard tripped.
class GuardError : public std::runtime_error {
public:
    GuardError(const std::string& what, double time)
        : std::runtime_error(what + " at t=" + std::to_string(time)), time_(time) {}
    [[nodiscard]] double time() const { return time_; }

private:
    double time_;
};

}  // namespace adaptid
