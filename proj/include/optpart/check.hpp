#pragma once
#include <stdexcept>
#include <string>

namespace optpart {

inline void ensure(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Thrown when an iterative solver runs out of iterations.
struct SolverError : std::runtime_error {
    double last_residual;
    SolverError(const std::string& msg, double res)
        : std::runtime_error(msg + " (last residual " + std::to_string(res) + ")"),
          last_residual(res) {}
};

}  // namespace optpart
