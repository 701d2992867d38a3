#include "gridfreq/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gridfreq/errors.hpp"

namespace gridfreq {

void WienerSampler::increments(int n, double dt, double* out) {
    const double scale = std::sqrt(std::max(dt, 0.0));
    for (int i = 0; i < n; ++i) out[i] = scale * normal();
}

double WienerSampler::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller on (0, 1] uniforms; u1 > 0 guaranteed by the +1 offset.
    const double inv = 1.0 / (static_cast<double>(std::mt19937_64::max()) + 2.0);
    const double u1 = (static_cast<double>(rng_()) + 1.0) * inv;
    const double u2 = (static_cast<double>(rng_()) + 1.0) * inv;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

int Trace::channel_index(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

const std::vector<double>& Trace::channel(const std::string& name) const {
    const int idx = channel_index(name);
    if (idx < 0) throw MetricError("trace has no channel named '" + name + "'");
    return data[idx];
}

TrapezoidalSdaeIntegrator::TrapezoidalSdaeIntegrator(SdaeSystem& system,
                                                     const IntegrationConfig& config)
    : system_(system), config_(config) {
    l_ = system.state_dim();
    m_ = system.algebraic_dim();
    n_ = system.noise_dim();
    if (config_.dt <= 0.0) throw ConfigError("integration step must be positive");
}

void TrapezoidalSdaeIntegrator::residual(double t0, double t1, const Eigen::VectorXd& x0,
                                         const Eigen::VectorXd& eta0,
                                         const Eigen::VectorXd& f0,
                                         const Eigen::VectorXd& a0,
                                         const Eigen::VectorXd& x1, const Eigen::VectorXd& y1,
                                         const Eigen::VectorXd& eta1,
                                         Eigen::VectorXd& out) const {
    const double h2 = 0.5 * (t1 - t0);
    if (l_ > 0) {
        Eigen::VectorXd f1(l_);
        system_.state_derivatives(t1, x1.data(), y1.data(), eta1.data(), f1.data());
        out.segment(0, l_) = x1 - x0 - h2 * (f0 + f1);
    }
    if (n_ > 0) {
        Eigen::VectorXd a1(n_);
        system_.noise_drift(eta1.data(), a1.data());
        out.segment(l_, n_) = eta1 - eta0 - h2 * (a0 + a1);
    }
    if (m_ > 0) {
        Eigen::VectorXd g1(m_);
        system_.algebraic_residual(t1, x1.data(), y1.data(), eta1.data(), g1.data());
        out.segment(l_ + n_, m_) = g1;
    }
}

void TrapezoidalSdaeIntegrator::build_jacobian(double t, const Eigen::VectorXd& x,
                                               const Eigen::VectorXd& y,
                                               const Eigen::VectorXd& eta, double dt) {
    const int dim = l_ + n_ + m_;
    const double t1 = t + dt;

    Eigen::VectorXd f0(l_), a0(n_);
    if (l_ > 0) system_.state_derivatives(t, x.data(), y.data(), eta.data(), f0.data());
    if (n_ > 0) system_.noise_drift(eta.data(), a0.data());

    Eigen::VectorXd x1 = x, y1 = y, eta1 = eta;
    Eigen::VectorXd base(dim), bumped(dim);
    residual(t, t1, x, eta, f0, a0, x1, y1, eta1, base);

    Eigen::MatrixXd jac(dim, dim);
    auto column = [&](int col, double* slot) {
        const double v0 = *slot;
        const double h = 1e-7 * std::max(1.0, std::abs(v0));
        *slot = v0 + h;
        residual(t, t1, x, eta, f0, a0, x1, y1, eta1, bumped);
        *slot = v0;
        jac.col(col) = (bumped - base) / h;
    };
    for (int j = 0; j < l_; ++j) column(j, x1.data() + j);
    for (int j = 0; j < n_; ++j) column(l_ + j, eta1.data() + j);
    for (int j = 0; j < m_; ++j) column(l_ + n_ + j, y1.data() + j);

    lu_.compute(jac);
    if (m_ > 0) lu_gy_.compute(jac.block(l_ + n_, l_ + n_, m_, m_));

    jac_signature_.clear();
    system_.branch_signature(t, x.data(), y.data(), eta.data(), jac_signature_);
    jacobian_valid_ = true;
    steps_since_rebuild_ = 0;
}

bool TrapezoidalSdaeIntegrator::solve_step(double t0, double t1, const Eigen::VectorXd& x0,
                                           const Eigen::VectorXd& y0,
                                           const Eigen::VectorXd& eta0, double dt,
                                           Eigen::VectorXd& x1, Eigen::VectorXd& y1,
                                           Eigen::VectorXd& eta1, double& final_residual) {
    const int dim = l_ + n_ + m_;
    Eigen::VectorXd f0(l_), a0(n_);
    if (l_ > 0) system_.state_derivatives(t0, x0.data(), y0.data(), eta0.data(), f0.data());
    if (n_ > 0) system_.noise_drift(eta0.data(), a0.data());

    // Explicit-Euler predictor.
    x1 = x0 + dt * f0;
    eta1 = eta0 + dt * a0;
    y1 = y0;

    Eigen::VectorXd res(dim), dz(dim);
    double prev_norm = std::numeric_limits<double>::infinity();
    int grew = 0;
    for (int it = 0; it < config_.newton_max_iter; ++it) {
        residual(t0, t1, x0, eta0, f0, a0, x1, y1, eta1, res);
        final_residual = dim > 0 ? res.cwiseAbs().maxCoeff() : 0.0;
        if (!std::isfinite(final_residual)) return false;
        if (final_residual < config_.newton_tol) return true;
        if (final_residual > prev_norm && ++grew >= 2) return false;
        prev_norm = std::min(prev_norm, final_residual);

        dz = lu_.solve(res);
        if (!dz.allFinite()) return false;
        x1 -= dz.segment(0, l_);
        if (n_ > 0) eta1 -= dz.segment(l_, n_);
        if (m_ > 0) y1 -= dz.segment(l_ + n_, m_);
    }
    return false;
}

void TrapezoidalSdaeIntegrator::step(double t, Eigen::VectorXd& x, Eigen::VectorXd& y,
                                     Eigen::VectorXd& eta, double dt, const double* dw) {
    // Periodic refresh guards against slow drift (ramps, operating point).
    if (!jacobian_valid_ || steps_since_rebuild_ > 5000) build_jacobian(t, x, y, eta, dt);

    std::vector<int8_t> sig;
    system_.branch_signature(t, x.data(), y.data(), eta.data(), sig);
    if (sig != jac_signature_) build_jacobian(t, x, y, eta, dt);

    Eigen::VectorXd x1(l_), y1(m_), eta1(n_);
    double res_norm = 0.0;

    // Two attempts: a stale chord Jacobian is rebuilt at the current
    // point and the step retried once before giving up.
    bool ok = solve_step(t, t + dt, x, y, eta, dt, x1, y1, eta1, res_norm);
    if (!ok) {
        build_jacobian(t, x, y, eta, dt);
        ok = solve_step(t, t + dt, x, y, eta, dt, x1, y1, eta1, res_norm);
    }
    if (!ok)
        throw SimulationError("implicit step did not converge", t + dt, res_norm);

    // If the converged point activated a different piecewise branch,
    // refresh the Jacobian there and re-solve once (second active-set
    // pass); the result is accepted either way.
    std::vector<int8_t> sig1;
    system_.branch_signature(t + dt, x1.data(), y1.data(), eta1.data(), sig1);
    if (sig1 != jac_signature_) {
        build_jacobian(t + dt, x1, y1, eta1, dt);
        Eigen::VectorXd x2(l_), y2(m_), eta2(n_);
        double res2 = 0.0;
        if (solve_step(t, t + dt, x, y, eta, dt, x2, y2, eta2, res2)) {
            x1 = x2;
            y1 = y2;
            eta1 = eta2;
        }
    }

    // Euler-Maruyama diffusion kick, then restore algebraic consistency.
    if (n_ > 0 && dw != nullptr) {
        Eigen::VectorXd b(n_);
        system_.noise_diffusion(eta1.data(), b.data());
        for (int i = 0; i < n_; ++i) eta1[i] += b[i] * dw[i];
        resolve_algebraic(t + dt, x1, y1, eta1);
    }

    if (!x1.allFinite() || !y1.allFinite() || !eta1.allFinite())
        throw SimulationError("state became non-finite", t + dt, res_norm);

    x = x1;
    y = y1;
    eta = eta1;
    ++steps_since_rebuild_;
}

void TrapezoidalSdaeIntegrator::resolve_algebraic(double t, const Eigen::VectorXd& x,
                                                  Eigen::VectorXd& y,
                                                  const Eigen::VectorXd& eta) {
    if (m_ == 0) return;
    if (!jacobian_valid_) build_jacobian(t, x, y, eta, config_.dt);

    Eigen::VectorXd g(m_);
    for (int attempt = 0; attempt < 2; ++attempt) {
        for (int it = 0; it < config_.newton_max_iter; ++it) {
            system_.algebraic_residual(t, x.data(), y.data(), eta.data(), g.data());
            const double norm = g.cwiseAbs().maxCoeff();
            if (!std::isfinite(norm)) break;
            if (norm < config_.newton_tol) return;
            y -= lu_gy_.solve(g);
        }
        // Chord block went stale; rebuild at the current point and retry.
        build_jacobian(t, x, y, eta, config_.dt);
    }
    system_.algebraic_residual(t, x.data(), y.data(), eta.data(), g.data());
    throw SimulationError("algebraic re-solve did not converge", t, g.cwiseAbs().maxCoeff());
}

Trace integrate(SdaeSystem& system, const IntegrationConfig& config,
                const std::vector<TimedEvent>& events, uint64_t seed, Eigen::VectorXd x,
                Eigen::VectorXd y, Eigen::VectorXd eta) {
    if (config.t_end <= config.t_start)
        throw ConfigError("integration horizon must be positive");
    if (config.record_every < 1)
        throw ConfigError("record_every must be at least 1");
    const long n_steps = std::lround((config.t_end - config.t_start) / config.dt);
    const int n = system.noise_dim();

    TrapezoidalSdaeIntegrator stepper(system, config);
    WienerSampler rng(seed);
    std::vector<double> dw(std::max(n, 1));

    std::vector<TimedEvent> pending(events);
    std::sort(pending.begin(), pending.end(),
              [](const TimedEvent& a, const TimedEvent& b) { return a.time < b.time; });
    size_t next_event = 0;

    Trace trace;
    trace.names = system.channel_names();
    trace.data.assign(trace.names.size(), {});
    std::vector<double> row(trace.names.size());
    auto record = [&](double t) {
        trace.t.push_back(t);
        system.channels(t, x.data(), y.data(), eta.data(), row.data());
        for (size_t c = 0; c < row.size(); ++c) trace.data[c].push_back(row[c]);
    };

    system.discrete_update(config.t_start, x.data(), y.data(), eta.data());
    record(config.t_start);

    for (long k = 0; k < n_steps; ++k) {
        const double t0 = config.t_start + static_cast<double>(k) * config.dt;
        const double t1 = config.t_start + static_cast<double>(k + 1) * config.dt;

        while (next_event < pending.size() && pending[next_event].time <= t0 + 1e-9) {
            try {
                pending[next_event].apply();
                stepper.invalidate_jacobian();
                stepper.resolve_algebraic(t0, x, y, eta);
            } catch (const SimulationError&) {
                throw;
            } catch (const std::exception& e) {
                throw SimulationError(std::string("event '") + pending[next_event].label +
                                          "' failed: " + e.what(),
                                      t0, -1.0);
            }
            ++next_event;
        }

        if (n > 0) rng.increments(n, config.dt, dw.data());
        stepper.step(t0, x, y, eta, t1 - t0, n > 0 ? dw.data() : nullptr);
        system.discrete_update(t1, x.data(), y.data(), eta.data());

        if ((k + 1) % config.record_every == 0) record(t1);
    }
    return trace;
}

}  // namespace gridfreq
