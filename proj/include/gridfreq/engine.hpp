#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gridfreq {

/// Deterministic Gaussian stream for Wiener increments. Box-Muller over a
/// fixed-width Mersenne Twister keeps draws reproducible for a given seed
/// independent of the standard library's distribution internals.
class WienerSampler {
public:
    explicit WienerSampler(uint64_t seed) : rng_(seed) {}

    /// n independent N(0, dt) draws.
    void increments(int n, double dt, double* out);
    double normal();

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline std::vector<double> sample_wiener_increments(int n, double dt, WienerSampler& rng) {
    std::vector<double> dw(n);
    rng.increments(n, dt, dw.data());
    return dw;
}

struct IntegrationConfig {
    double t_start = 0.0;
    double t_end = 10.0;
    double dt = 0.01;
    double newton_tol = 1e-8;
    int newton_max_iter = 50;
    int record_every = 1;  // steps between recorded rows
};

/// Recorded simulation output: named channels sampled on a uniform grid.
struct Trace {
    std::vector<double> t;
    std::vector<std::string> names;               // channel names (time excluded)
    std::vector<std::vector<double>> data;        // data[channel][row]

    int channel_index(const std::string& name) const;  // -1 if absent
    const std::vector<double>& channel(const std::string& name) const;  // throws MetricError
    size_t rows() const { return t.size(); }
};

/// The coupled system  ẋ = f(x, y, η, t),  0 = g(x, y, η, t),
/// dη = a(η) dt + b(η) ⊙ dW.
class SdaeSystem {
public:
    virtual ~SdaeSystem() = default;

    virtual int state_dim() const = 0;
    virtual int algebraic_dim() const = 0;
    virtual int noise_dim() const = 0;

    virtual void state_derivatives(double t, const double* x, const double* y,
                                   const double* eta, double* dx) const = 0;
    virtual void algebraic_residual(double t, const double* x, const double* y,
                                    const double* eta, double* res) const = 0;
    virtual void noise_drift(const double* eta, double* a) const = 0;
    virtual void noise_diffusion(const double* eta, double* b) const = 0;

    /// Piecewise-branch code of every non-smooth element; a change
    /// invalidates cached Jacobians.
    virtual void branch_signature(double /*t*/, const double* /*x*/, const double* /*y*/,
                                  const double* /*eta*/, std::vector<int8_t>& /*sig*/) const {}

    /// Discrete controllers (e.g. AGC) advanced once per accepted step.
    virtual void discrete_update(double /*t*/, const double* /*x*/, const double* /*y*/,
                                 const double* /*eta*/) {}

    virtual std::vector<std::string> channel_names() const { return {}; }
    virtual void channels(double /*t*/, const double* /*x*/, const double* /*y*/,
                          const double* /*eta*/, double* /*out*/) const {}
};

/// A scheduled discontinuity: the callback mutates the system; the
/// integrator then re-solves the algebraic equations and refreshes its
/// Jacobian before continuing.
struct TimedEvent {
    double time = 0.0;
    std::string label;
    std::function<void()> apply;
};

/// Implicit-trapezoidal drift + explicit Euler-Maruyama diffusion stepper
/// with a chord (frozen, finite-difference) Newton iteration. The factored
/// Jacobian is reused across steps until the branch signature changes, an
/// event fires, or convergence degrades.
class TrapezoidalSdaeIntegrator {
public:
    TrapezoidalSdaeIntegrator(SdaeSystem& system, const IntegrationConfig& config);

    /// One step from (x, y, eta) at time t to t + dt, in place.
    /// `dw` holds noise_dim() Wiener increments (nullptr for none).
    void step(double t, Eigen::VectorXd& x, Eigen::VectorXd& y, Eigen::VectorXd& eta,
              double dt, const double* dw);

    /// Re-solve g(x, y, eta) = 0 for y with x and eta held fixed.
    void resolve_algebraic(double t, const Eigen::VectorXd& x, Eigen::VectorXd& y,
                           const Eigen::VectorXd& eta);

    void invalidate_jacobian() { jacobian_valid_ = false; }

private:
    void build_jacobian(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& eta, double dt);
    void residual(double t0, double t1, const Eigen::VectorXd& x0,
                  const Eigen::VectorXd& eta0, const Eigen::VectorXd& f0,
                  const Eigen::VectorXd& a0, const Eigen::VectorXd& x1,
                  const Eigen::VectorXd& y1, const Eigen::VectorXd& eta1,
                  Eigen::VectorXd& out) const;
    bool solve_step(double t0, double t1, const Eigen::VectorXd& x0,
                    const Eigen::VectorXd& y0, const Eigen::VectorXd& eta0, double dt,
                    Eigen::VectorXd& x1, Eigen::VectorXd& y1, Eigen::VectorXd& eta1,
                    double& final_residual);

    SdaeSystem& system_;
    IntegrationConfig config_;
    int l_, m_, n_;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;       // combined residual Jacobian
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_gy_;    // ∂g/∂y block
    std::vector<int8_t> jac_signature_;
    bool jacobian_valid_ = false;
    long steps_since_rebuild_ = 0;
};

/// Integrate with events and per-step noise; returns the recorded trace.
/// Deterministic for a given seed. The initial point must satisfy g = 0.
Trace integrate(SdaeSystem& system, const IntegrationConfig& config,
                const std::vector<TimedEvent>& events, uint64_t seed,
                Eigen::VectorXd x, Eigen::VectorXd y, Eigen::VectorXd eta);

}  // namespace gridfreq
