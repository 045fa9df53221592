#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sympdyn/dynamics.hpp"

namespace sympdyn::integrators {

// ---------------------------------------------------------------------------
// Field oracle: one conservative vector field with a per-evaluation score
// cache. evaluate() is the oracle call (one score-matrix build); the *_rate
// helpers reuse the cache so momentum-linear re-evaluations stay inside the
// same oracle budget. Counters back the oracle-parity tests.
// ---------------------------------------------------------------------------
struct OracleContext {
    dynamics::ScoreMatrix scores; // softmax / baseline
    Matrix xa;                    // linear: X A
};

class FieldOracle {
public:
    virtual ~FieldOracle() = default;

    // Full (F, G) at e; builds the score cache. One oracle call.
    dynamics::FieldPair evaluate(const Ensemble& e, OracleContext& ctx) {
        ++score_builds_;
        ++field_evals_;
        return do_evaluate(e, ctx);
    }

    // F with the cached scores and fresh momenta (F is linear in Y for both
    // attention systems, so no new score build is needed).
    Matrix position_rate(const OracleContext& ctx, const Matrix& x, const Matrix& y) {
        ++field_evals_;
        return do_position_rate(ctx, x, y);
    }

    // G with the cached scores but replaced positions (worked-example
    // compatibility path of the plain Euler scheme).
    Matrix momentum_rate_at(const OracleContext& ctx, const Matrix& x_new, const Matrix& y) {
        ++field_evals_;
        return do_momentum_rate_at(ctx, x_new, y);
    }

    long score_builds() const noexcept { return score_builds_; }
    long field_evals() const noexcept { return field_evals_; }
    void reset_counters() noexcept { score_builds_ = field_evals_ = 0; }

private:
    virtual dynamics::FieldPair do_evaluate(const Ensemble& e, OracleContext& ctx) = 0;
    virtual Matrix do_position_rate(const OracleContext& ctx, const Matrix& x,
                                    const Matrix& y) = 0;
    virtual Matrix do_momentum_rate_at(const OracleContext& ctx, const Matrix& x_new,
                                       const Matrix& y) = 0;

    long score_builds_ = 0;
    long field_evals_ = 0;
};

class LinearOracle final : public FieldOracle {
public:
    explicit LinearOracle(const AttentionWeights& w) : w_(w) {}

private:
    dynamics::FieldPair do_evaluate(const Ensemble& e, OracleContext& ctx) override;
    Matrix do_position_rate(const OracleContext& ctx, const Matrix& x, const Matrix& y) override;
    Matrix do_momentum_rate_at(const OracleContext& ctx, const Matrix& x_new,
                               const Matrix& y) override;
    const AttentionWeights& w_;
};

class SoftmaxOracle final : public FieldOracle {
public:
    explicit SoftmaxOracle(const AttentionWeights& w,
                           double guard = dynamics::kDefaultScoreGuard)
        : w_(w), guard_(guard) {}

private:
    dynamics::FieldPair do_evaluate(const Ensemble& e, OracleContext& ctx) override;
    Matrix do_position_rate(const OracleContext& ctx, const Matrix& x, const Matrix& y) override;
    Matrix do_momentum_rate_at(const OracleContext& ctx, const Matrix& x_new,
                               const Matrix& y) override;
    const AttentionWeights& w_;
    double guard_;
};

// Momentum-free softmax attention flow: F = baseline_field(X), G = 0.
class BaselineOracle final : public FieldOracle {
public:
    explicit BaselineOracle(const AttentionWeights& w,
                            double guard = dynamics::kDefaultScoreGuard)
        : w_(w), guard_(guard) {}

private:
    dynamics::FieldPair do_evaluate(const Ensemble& e, OracleContext& ctx) override;
    Matrix do_position_rate(const OracleContext& ctx, const Matrix& x, const Matrix& y) override;
    Matrix do_momentum_rate_at(const OracleContext& ctx, const Matrix& x_new,
                               const Matrix& y) override;
    const AttentionWeights& w_;
    double guard_;
};

// ---------------------------------------------------------------------------
// Integrator specification and trajectories.
// ---------------------------------------------------------------------------
enum class Method { PlainEuler, ConformalEuler, ExpEuler, Ab2, EtdAb2, Rk4Reference };
enum class AlphaMode { Ratio, Constant };

struct IntegratorSpec {
    Method method = Method::ExpEuler;
    double h = 0.01;
    std::vector<double> step_schedule; // optional variable steps (AB-2); empty = fixed h
    DampingSchedule damping = DampingSchedule::zero();
    AlphaMode alpha_mode = AlphaMode::Ratio; // plain Euler only
    double alpha_const = 1.0;                // plain Euler, AlphaMode::Constant
    bool worked_example_compat = false;      // plain Euler softmax worked-example form
};

const char* method_name(Method m);

struct StepDiagnostics {
    double t = 0.0;
    double hamiltonian = 0.0;
    double h_tilde = 0.0;
    double energy = 0.0;
    double y_norm = 0.0;
    long oracle_calls = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Ensemble> states;
    std::vector<StepDiagnostics> diagnostics;
    long score_builds = 0;
    long field_evals = 0;
    std::string error; // empty when the run completed

    bool ok() const noexcept { return error.empty(); }
};

// ---------------------------------------------------------------------------
// Steppers. All return the advanced ensemble with its time field updated.
// ---------------------------------------------------------------------------

// X+ = X + h F(X, Y); Y+ = alpha_k Y + h G(X, Y); alpha_k per spec.alpha_mode,
// k is the 1-based step index (ratio mode: alpha_k = (k-1)/(k+2)).
Ensemble step_plain_euler(const Ensemble& e, FieldOracle& oracle, const IntegratorSpec& spec,
                          long k);

// Kick then damp: Y+ = sigma_k (Y + h G(X, Y)); X+ = X + h F(X, Y+).
Ensemble step_conformal_euler(const Ensemble& e, FieldOracle& oracle, const IntegratorSpec& spec,
                              double t_k);

// Y+ = sigma_k Y + w G(X, Y), w = exp_euler_weight; X+ = X + h F(X, Y).
Ensemble step_exp_euler(const Ensemble& e, FieldOracle& oracle, const IntegratorSpec& spec,
                        double t_k);

// Full right-hand side (damping included) recorded at a trajectory point.
struct StateRecord {
    double t = 0.0;
    Ensemble state;
    Matrix fx, fy; // d/dt of X and Y at (t, state)
};

// Two-step Adams-Bashforth on the stacked state with variable step sizes;
// previous step size is taken from the two record times.
Ensemble step_ab2(const StateRecord& prev, const StateRecord& cur, double h_next);

// Classical RK4 step on the damped field (four oracle calls).
Ensemble rk4_step(const Ensemble& e, FieldOracle& oracle, const DampingSchedule& sched, double t,
                  double h);

// The two-sequence Nesterov recursion; returns x^(0..steps).
std::vector<std::vector<double>> nesterov_euclidean(
    const std::function<std::vector<double>(const std::vector<double>&)>& grad,
    const std::vector<double>& x0, double tau, long steps);

// ---------------------------------------------------------------------------
// Trajectory driver.
// ---------------------------------------------------------------------------
enum class SystemKind { Linear, Softmax, Baseline };

const char* system_name(SystemKind s);

Trajectory integrate(const Ensemble& e0, SystemKind system, const AttentionWeights& w,
                     const IntegratorSpec& spec, long steps, long record_every = 1);

} // namespace sympdyn::integrators
