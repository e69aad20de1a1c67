/**
 * @file rcac.hpp
 * @brief Retrospective cost adaptive control for a single SISO loop.
 *
 * The controller is u_k = phi_k * theta_k where the regressor stacks the
 * active subset of [z_{k-1}, gamma_{k-1}, z_{k-1} - z_{k-2}, r_k].  Gains are
 * re-optimized every step by recursive least squares on the retrospective
 * cost, so theta_{k+1} is the exact minimizer of the cumulative cost over all
 * data seen so far.
 *
 * Index bookkeeping: before step k the state holds theta_k, P_k, the previous
 * regressor/input pair (phi_{k-1}, u_{k-1}) and the current pair (phi_k, u_k),
 * where u_k is the control the caller is applying during tick k.  step()
 * consumes z_k and emits u_{k+1} for the next tick.
 */
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>

namespace afw::rcac {

inline constexpr int kMaxGains = 4;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxGains, 1>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor, 1, kMaxGains>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxGains, kMaxGains>;

/// Which regressor entries are active, in the fixed order P, I, D, FF.
enum class Parameterization { P, PI, PID, PIDFF };

int gain_count(Parameterization p) noexcept;
std::string_view to_string(Parameterization p) noexcept;
Parameterization parse_parameterization(std::string_view s);

struct Hyperparams {
    double p0 = 1.0;
    double r_u = 0.0;
    double r_z = 1.0;
    /// Sign of the leading Markov parameter of the u -> z path.
    double sigma = 1.0;
    Vector theta0 = Vector::Zero(2);
    Parameterization parameterization = Parameterization::PI;
    /// Bound on |gamma|; 0 disables clamping.
    double integrator_clamp = 0.0;
    double sample_time = 0.004;

    /// Throws InputError when any invariant fails.
    void validate() const;

    static Hyperparams with(Parameterization param, double p0, double r_u, double sample_time);
};

struct State {
    Vector theta;
    Matrix p;
    double gamma = 0.0;
    double z_prev = 0.0;
    RowVector phi_prev;
    double u_prev = 0.0;
    RowVector phi;
    double u = 0.0;
    std::int64_t step = 0;

    static State initial(const Hyperparams& params);
};

/// Regressor for the next control given the newest error sample z and the
/// feedforward value r.  Does not mutate the state.
RowVector build_regressor(const State& state, double z, double r, const Hyperparams& params);

/// z_k + sigma * (phi_{k-1} theta - u_{k-1}).
double retrospective_performance(double z, const RowVector& phi_prev, const Vector& theta,
                                 double u_prev, double sigma);

/// RLS covariance contraction with the stacked regressor [sigma*phi_prev; phi]
/// and weights diag(r_z, r_u).  Evaluated through the square-root weighted
/// Woodbury identity, so r_u = 0 is admissible; the result is symmetrized.
Matrix covariance_update(const Matrix& p, const RowVector& phi, const RowVector& phi_prev,
                         double sigma, double r_z, double r_u);

struct StepOutput {
    double u_next;
    State state;
};

/// One adaptive update.  Throws InputError on non-finite z or r and
/// DivergenceError when theta or P leave the bounded region.
StepOutput rcac_step(State state, double z, double r, const Hyperparams& params);

/// In-place form used by the control loops.
double step_in_place(State& state, double z, double r, const Hyperparams& params);

/// A loop's hyperparameters together with its evolving state.
class Loop {
public:
    Loop() : Loop(Hyperparams{}) {}
    explicit Loop(Hyperparams params);

    /// Feeds z_k and returns u_{k+1}.
    double update(double z, double r = 0.0) { return step_in_place(state_, z, r, params_); }

    /// Overwrites the gain vector and recomputes the pending control.
    void force_theta(const Vector& theta);

    void reset() { state_ = State::initial(params_); }

    const Hyperparams& params() const noexcept { return params_; }
    const State& state() const noexcept { return state_; }
    double pending_control() const noexcept { return state_.u; }

private:
    Hyperparams params_;
    State state_;
};

}  // namespace afw::rcac
