#pragma once

#include <stdexcept>
#include <string>

namespace gridfreq {

/// Bad input data: case files, scenario configs, CLI requests.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Power flow or equilibrium back-initialization failed.
class InitializationError : public std::runtime_error {
public:
    InitializationError(const std::string& what, double mismatch)
        : std::runtime_error(what + " (final mismatch " + std::to_string(mismatch) + ")"),
          final_mismatch(mismatch) {}
    explicit InitializationError(const std::string& what)
        : std::runtime_error(what), final_mismatch(0.0) {}
    double final_mismatch;
};

/// Time stepping failed: Newton non-convergence or non-finite states.
class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& what, double t, double residual)
        : std::runtime_error(what + " at t=" + std::to_string(t) + " s" +
                             (residual >= 0 ? ", residual " + std::to_string(residual) : "")),
          time(t), last_residual(residual) {}
    explicit SimulationError(const std::string& what)
        : std::runtime_error(what), time(-1.0), last_residual(-1.0) {}
    double time;
    double last_residual;
};

/// A metric could not be computed from the given trace.
class MetricError : public std::runtime_error {
public:
    explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};

/// Plot inputs are inconsistent (mismatched time bases, missing channels).
class PlotError : public std::runtime_error {
public:
    explicit PlotError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gridfreq
