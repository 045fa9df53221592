#include "sympdyn/integrators.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "sympdyn/error.hpp"

namespace sympdyn::integrators {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kEtaGuard = 700.0;
} // namespace

// ------------------------------- oracles -----------------------------------

dynamics::FieldPair LinearOracle::do_evaluate(const Ensemble& e, OracleContext& ctx) {
    ctx.xa = e.X * w_.a();
    const double inv_n = 1.0 / static_cast<double>(e.n());
    dynamics::FieldPair out;
    out.F = inv_n * (ctx.xa * mul_tn(e.X, e.Y));
    out.G = e.X * w_.v() - inv_n * ((e.Y * mul_tn(e.Y, e.X)) * w_.a());
    return out;
}

Matrix LinearOracle::do_position_rate(const OracleContext& ctx, const Matrix& x, const Matrix& y) {
    return (1.0 / static_cast<double>(x.rows())) * (ctx.xa * mul_tn(x, y));
}

Matrix LinearOracle::do_momentum_rate_at(const OracleContext&, const Matrix& x_new,
                                         const Matrix& y) {
    const double inv_n = 1.0 / static_cast<double>(x_new.rows());
    return x_new * w_.v() - inv_n * ((y * mul_tn(y, x_new)) * w_.a());
}

dynamics::FieldPair SoftmaxOracle::do_evaluate(const Ensemble& e, OracleContext& ctx) {
    ctx.scores = dynamics::softmax_scores(e, w_, guard_);
    return dynamics::softmax_fields(ctx.scores, e.X, e.Y, w_);
}

Matrix SoftmaxOracle::do_position_rate(const OracleContext& ctx, const Matrix&, const Matrix& y) {
    return dynamics::softmax_position_rate(ctx.scores.rowsum, y, w_);
}

Matrix SoftmaxOracle::do_momentum_rate_at(const OracleContext& ctx, const Matrix& x_new,
                                          const Matrix& y) {
    return dynamics::softmax_momentum_rate(ctx.scores, x_new, y, w_);
}

dynamics::FieldPair BaselineOracle::do_evaluate(const Ensemble& e, OracleContext& ctx) {
    ctx.scores = dynamics::softmax_scores(e, w_, guard_);
    dynamics::FieldPair out;
    out.F = dynamics::baseline_field(ctx.scores, e.X, w_);
    out.G = Matrix(e.n(), e.dim());
    return out;
}

Matrix BaselineOracle::do_position_rate(const OracleContext& ctx, const Matrix& x, const Matrix&) {
    return dynamics::baseline_field(ctx.scores, x, w_);
}

Matrix BaselineOracle::do_momentum_rate_at(const OracleContext&, const Matrix& x_new,
                                           const Matrix&) {
    return Matrix(x_new.rows(), x_new.cols());
}

// ------------------------------- steppers ----------------------------------

const char* method_name(Method m) {
    switch (m) {
        case Method::PlainEuler: return "plain-euler";
        case Method::ConformalEuler: return "conformal-euler";
        case Method::ExpEuler: return "exp-euler";
        case Method::Ab2: return "ab2";
        case Method::EtdAb2: return "etd-ab2";
        case Method::Rk4Reference: return "rk4";
    }
    return "?";
}

const char* system_name(SystemKind s) {
    switch (s) {
        case SystemKind::Linear: return "linear";
        case SystemKind::Softmax: return "softmax";
        case SystemKind::Baseline: return "baseline";
    }
    return "?";
}

namespace {

double plain_alpha(const IntegratorSpec& spec, long k) {
    if (spec.alpha_mode == AlphaMode::Ratio)
        return static_cast<double>(k - 1) / static_cast<double>(k + 2);
    if (!(spec.alpha_const > 0.0 && spec.alpha_const <= 1.0))
        throw DomainError("plain Euler: constant alpha must lie in (0, 1]");
    return spec.alpha_const;
}

void require_step(double h) {
    if (!(h > 0.0)) throw DomainError("integrator: step size must be positive");
}

} // namespace

Ensemble step_plain_euler(const Ensemble& e, FieldOracle& oracle, const IntegratorSpec& spec,
                          long k) {
    require_step(spec.h);
    const double a_k = plain_alpha(spec, k);
    OracleContext ctx;
    const dynamics::FieldPair f = oracle.evaluate(e, ctx);
    Matrix x_new = e.X + spec.h * f.F;
    if (spec.worked_example_compat) {
        // worked-example form: -alpha_k Y, momentum rate at the new positions
        // under the step's score matrix
        const Matrix g = oracle.momentum_rate_at(ctx, x_new, e.Y);
        return Ensemble(std::move(x_new), -a_k * e.Y + spec.h * g, e.t + spec.h);
    }
    return Ensemble(std::move(x_new), a_k * e.Y + spec.h * f.G, e.t + spec.h);
}

Ensemble step_conformal_euler(const Ensemble& e, FieldOracle& oracle, const IntegratorSpec& spec,
                              double t_k) {
    require_step(spec.h);
    const double s = sigma(spec.damping, t_k, t_k + spec.h);
    OracleContext ctx;
    const dynamics::FieldPair f = oracle.evaluate(e, ctx);
    Matrix y_new = s * (e.Y + spec.h * f.G);
    Matrix x_new = e.X + spec.h * oracle.position_rate(ctx, e.X, y_new);
    return Ensemble(std::move(x_new), std::move(y_new), e.t + spec.h);
}

Ensemble step_exp_euler(const Ensemble& e, FieldOracle& oracle, const IntegratorSpec& spec,
                        double t_k) {
    require_step(spec.h);
    const double s = sigma(spec.damping, t_k, t_k + spec.h);
    const double w = exp_euler_weight(spec.damping, spec.h);
    OracleContext ctx;
    const dynamics::FieldPair f = oracle.evaluate(e, ctx);
    return Ensemble(e.X + spec.h * f.F, s * e.Y + w * f.G, e.t + spec.h);
}

Ensemble step_ab2(const StateRecord& prev, const StateRecord& cur, double h_next) {
    require_step(h_next);
    const double h_prev = cur.t - prev.t;
    if (!(h_prev > 0.0))
        throw DomainError("step_ab2: bootstrap required (history times must be increasing)");
    const double c_cur = (2.0 * h_prev + h_next) / (2.0 * h_prev);
    const double c_prev = h_next / (2.0 * h_prev);
    return Ensemble(cur.state.X + h_next * (c_cur * cur.fx - c_prev * prev.fx),
                    cur.state.Y + h_next * (c_cur * cur.fy - c_prev * prev.fy), cur.t + h_next);
}

Ensemble rk4_step(const Ensemble& e, FieldOracle& oracle, const DampingSchedule& sched, double t,
                  double h) {
    require_step(h);
    auto stage = [&](double ts, const Matrix& x, const Matrix& y) {
        OracleContext ctx;
        dynamics::FieldPair f = oracle.evaluate(Ensemble(x, y, std::max(ts, 0.0)), ctx);
        const double a = alpha(sched, ts);
        if (a != 0.0) f.G -= a * y;
        return f;
    };
    const dynamics::FieldPair k1 = stage(t, e.X, e.Y);
    const dynamics::FieldPair k2 = stage(t + 0.5 * h, e.X + (0.5 * h) * k1.F, e.Y + (0.5 * h) * k1.G);
    const dynamics::FieldPair k3 = stage(t + 0.5 * h, e.X + (0.5 * h) * k2.F, e.Y + (0.5 * h) * k2.G);
    const dynamics::FieldPair k4 = stage(t + h, e.X + h * k3.F, e.Y + h * k3.G);
    const double w = h / 6.0;
    return Ensemble(e.X + w * (k1.F + 2.0 * k2.F + 2.0 * k3.F + k4.F),
                    e.Y + w * (k1.G + 2.0 * k2.G + 2.0 * k3.G + k4.G), e.t + h);
}

std::vector<std::vector<double>> nesterov_euclidean(
    const std::function<std::vector<double>(const std::vector<double>&)>& grad,
    const std::vector<double>& x0, double tau, long steps) {
    if (!(tau > 0.0)) throw DomainError("nesterov_euclidean: tau must be positive");
    std::vector<std::vector<double>> iterates;
    iterates.reserve(static_cast<std::size_t>(steps) + 1);
    iterates.push_back(x0);
    std::vector<double> x_prev = x0, y = x0;
    for (long k = 0; k < steps; ++k) {
        const std::vector<double> g = grad(y);
        std::vector<double> x_next(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) x_next[i] = y[i] - tau * g[i];
        const double ext = 1.0 - 3.0 / static_cast<double>(k + 3);
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] = x_next[i] + ext * (x_next[i] - x_prev[i]);
        x_prev = x_next;
        iterates.push_back(std::move(x_next));
    }
    return iterates;
}

// ------------------------------- driver ------------------------------------

namespace {

struct DiagnosticSystem {
    SystemKind kind;
    const AttentionWeights& w;
    const DampingSchedule& damping;

    StepDiagnostics compute(const Ensemble& e, long oracle_calls) const {
        StepDiagnostics d;
        d.t = e.t;
        d.oracle_calls = oracle_calls;
        d.y_norm = frobenius(e.Y);
        d.h_tilde = kNan;
        switch (kind) {
            case SystemKind::Linear:
                d.hamiltonian = dynamics::hamiltonian_linear(e, w);
                d.energy = dynamics::energy_linear(e, w);
                break;
            case SystemKind::Softmax: {
                const dynamics::ScoreMatrix sm = dynamics::softmax_scores(e, w);
                d.hamiltonian = dynamics::hamiltonian_softmax(sm, e.Y, w);
                d.energy = dynamics::energy_softmax(sm, e.n());
                if (!damping.is_zero()) {
                    const double et = eta(damping, e.t);
                    d.h_tilde = dynamics::time_dep_hamiltonian_softmax(
                        e.t, e.X, std::exp(et) * e.Y, w, damping);
                }
                break;
            }
            case SystemKind::Baseline: {
                const dynamics::ScoreMatrix sm = dynamics::softmax_scores(e, w);
                d.hamiltonian = kNan;
                d.energy = dynamics::energy_softmax(sm, e.n());
                break;
            }
        }
        return d;
    }
};

// transformed-state right-hand side of the undamped reformulation
struct EtdRhs {
    FieldOracle& oracle;
    const DampingSchedule& damping;

    dynamics::FieldPair operator()(double t, const Matrix& x, const Matrix& p) const {
        const double et = eta(damping, t);
        if (std::fabs(et) > kEtaGuard)
            throw DomainError("etd-ab2: |eta(t)| = " + std::to_string(std::fabs(et)) +
                              " exceeds the exponent guard");
        const double down = std::exp(-et);
        OracleContext ctx;
        dynamics::FieldPair f = oracle.evaluate(Ensemble(x, down * p, std::max(t, 0.0)), ctx);
        f.G *= std::exp(et);
        return f;
    }
};

} // namespace

Trajectory integrate(const Ensemble& e0, SystemKind system, const AttentionWeights& w,
                     const IntegratorSpec& spec, long steps, long record_every) {
    if (steps < 0) throw DomainError("integrate: steps must be >= 0");
    if (record_every < 1) throw DomainError("integrate: record-every must be >= 1");
    if (!spec.step_schedule.empty() &&
        spec.step_schedule.size() < static_cast<std::size_t>(steps))
        throw DomainError("integrate: step schedule shorter than the step count");

    std::optional<LinearOracle> lin;
    std::optional<SoftmaxOracle> sm;
    std::optional<BaselineOracle> base;
    FieldOracle* oracle = nullptr;
    switch (system) {
        case SystemKind::Linear: oracle = &lin.emplace(w); break;
        case SystemKind::Softmax: oracle = &sm.emplace(w); break;
        case SystemKind::Baseline: oracle = &base.emplace(w); break;
    }

    // Simulation clock starts at the schedule origin for singular schedules.
    const double t_start = spec.damping.is_zero() ? e0.t : std::max(e0.t, spec.damping.t0);
    Ensemble e(e0.X, system == SystemKind::Baseline ? Matrix(e0.n(), e0.dim()) : e0.Y, t_start);

    const DiagnosticSystem diag{system, w, spec.damping};
    Trajectory traj;
    auto record = [&](const Ensemble& state) {
        StepDiagnostics dgn = diag.compute(state, oracle->score_builds()); // may throw
        traj.times.push_back(state.t);
        traj.states.push_back(state);
        traj.diagnostics.push_back(std::move(dgn));
    };

    auto step_size = [&](long k) {
        return spec.step_schedule.empty() ? spec.h
                                          : spec.step_schedule[static_cast<std::size_t>(k - 1)];
    };
    IntegratorSpec local = spec;
    local.step_schedule.clear();

    try {
        record(e);

        // multistep history (damped state for AB-2, transformed state for ETD)
        std::optional<StateRecord> prev, cur;
        const EtdRhs etd_rhs{*oracle, spec.damping};
        auto make_damped_record = [&](const Ensemble& state) {
            OracleContext ctx;
            dynamics::FieldPair f = oracle->evaluate(state, ctx);
            const double a = alpha(spec.damping, state.t);
            if (a != 0.0) f.G -= a * state.Y;
            return StateRecord{state.t, state, std::move(f.F), std::move(f.G)};
        };
        auto make_etd_record = [&](const Ensemble& transformed) {
            dynamics::FieldPair f = etd_rhs(transformed.t, transformed.X, transformed.Y);
            return StateRecord{transformed.t, transformed, std::move(f.F), std::move(f.G)};
        };

        // ETD state: Y slot holds the transformed momentum P = e^{eta} Y.
        Ensemble etd_state = e;

        for (long k = 1; k <= steps; ++k) {
            local.h = step_size(k);
            const double t_k = e.t;
            switch (spec.method) {
                case Method::PlainEuler: e = step_plain_euler(e, *oracle, local, k); break;
                case Method::ConformalEuler:
                    e = step_conformal_euler(e, *oracle, local, t_k);
                    break;
                case Method::ExpEuler: e = step_exp_euler(e, *oracle, local, t_k); break;
                case Method::Ab2: {
                    StateRecord rec = make_damped_record(e);
                    if (!cur.has_value()) {
                        // explicit Euler bootstrap
                        e = Ensemble(e.X + local.h * rec.fx, e.Y + local.h * rec.fy,
                                     e.t + local.h);
                    } else {
                        e = step_ab2(*cur, rec, local.h);
                    }
                    prev = std::move(cur);
                    cur = std::move(rec);
                    break;
                }
                case Method::EtdAb2: {
                    StateRecord rec = make_etd_record(etd_state);
                    if (!cur.has_value()) {
                        etd_state = Ensemble(etd_state.X + local.h * rec.fx,
                                             etd_state.Y + local.h * rec.fy,
                                             etd_state.t + local.h);
                    } else {
                        etd_state = step_ab2(*cur, rec, local.h);
                    }
                    prev = std::move(cur);
                    cur = std::move(rec);
                    const double et = eta(spec.damping, etd_state.t);
                    if (std::fabs(et) > kEtaGuard)
                        throw DomainError("etd-ab2: |eta(t)| exceeds the exponent guard");
                    e = Ensemble(etd_state.X, std::exp(-et) * etd_state.Y, etd_state.t);
                    break;
                }
                case Method::Rk4Reference:
                    e = rk4_step(e, *oracle, spec.damping, t_k, local.h);
                    break;
            }
            if (k % record_every == 0) record(e);
        }
    } catch (const Error& err) {
        traj.error = err.what();
    }

    traj.score_builds = oracle->score_builds();
    traj.field_evals = oracle->field_evals();
    return traj;
}

} // namespace sympdyn::integrators
