/**
 * @file rcac.cpp
 * @brief Recursive retrospective-cost gain update.
 */
#include "afw/rcac.hpp"

#include "afw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace afw::rcac {

namespace {

constexpr double kDivergenceBound = 1e9;
constexpr double kSymmetryTolerance = 1e-12;

bool all_finite_and_bounded(const Vector& theta, const Matrix& p) {
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (!std::isfinite(theta(i)) || std::abs(theta(i)) > kDivergenceBound) return false;
    }
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double v = p.data()[i];
        if (!std::isfinite(v) || std::abs(v) > kDivergenceBound) return false;
    }
    return true;
}

double next_gamma(const State& state, const Hyperparams& params) {
    const double gamma = state.gamma + params.sample_time * state.z_prev;
    if (params.integrator_clamp > 0.0) {
        return std::clamp(gamma, -params.integrator_clamp, params.integrator_clamp);
    }
    return gamma;
}

}  // namespace

int gain_count(Parameterization p) noexcept {
    switch (p) {
        case Parameterization::P: return 1;
        case Parameterization::PI: return 2;
        case Parameterization::PID: return 3;
        case Parameterization::PIDFF: return 4;
    }
    return 0;
}

std::string_view to_string(Parameterization p) noexcept {
    switch (p) {
        case Parameterization::P: return "P";
        case Parameterization::PI: return "PI";
        case Parameterization::PID: return "PID";
        case Parameterization::PIDFF: return "PID+FF";
    }
    return "?";
}

Parameterization parse_parameterization(std::string_view s) {
    if (s == "P") return Parameterization::P;
    if (s == "PI") return Parameterization::PI;
    if (s == "PID") return Parameterization::PID;
    if (s == "PID+FF" || s == "PIDFF") return Parameterization::PIDFF;
    throw InputError("unknown RCAC parameterization '" + std::string(s) + "'");
}

void Hyperparams::validate() const {
    if (!(p0 > 0.0) || !std::isfinite(p0)) throw InputError("rcac: p0 must be positive");
    if (!(r_z > 0.0) || !std::isfinite(r_z)) throw InputError("rcac: r_z must be positive");
    if (!(r_u >= 0.0) || !std::isfinite(r_u)) throw InputError("rcac: r_u must be nonnegative");
    if (sigma == 0.0 || !std::isfinite(sigma)) throw InputError("rcac: sigma must be nonzero");
    if (!(integrator_clamp >= 0.0)) throw InputError("rcac: integrator_clamp must be nonnegative");
    if (!(sample_time > 0.0)) throw InputError("rcac: sample_time must be positive");
    if (theta0.size() != gain_count(parameterization)) {
        throw InputError("rcac: theta0 has " + std::to_string(theta0.size()) + " entries, " +
                         std::string(to_string(parameterization)) + " needs " +
                         std::to_string(gain_count(parameterization)));
    }
    if (!theta0.allFinite()) throw InputError("rcac: theta0 must be finite");
}

Hyperparams Hyperparams::with(Parameterization param, double p0, double r_u, double sample_time) {
    Hyperparams h;
    h.parameterization = param;
    h.p0 = p0;
    h.r_u = r_u;
    h.sample_time = sample_time;
    h.theta0 = Vector::Zero(gain_count(param));
    return h;
}

State State::initial(const Hyperparams& params) {
    params.validate();
    const int n = gain_count(params.parameterization);
    State s;
    s.theta = params.theta0;
    s.p = Matrix::Identity(n, n) * params.p0;
    s.phi_prev = RowVector::Zero(n);
    s.phi = RowVector::Zero(n);
    return s;
}

RowVector build_regressor(const State& state, double z, double r, const Hyperparams& params) {
    const double full[kMaxGains] = {z, next_gamma(state, params), z - state.z_prev, r};
    const int n = gain_count(params.parameterization);
    RowVector phi(n);
    for (int i = 0; i < n; ++i) phi(i) = full[i];
    return phi;
}

double retrospective_performance(double z, const RowVector& phi_prev, const Vector& theta,
                                 double u_prev, double sigma) {
    if (phi_prev.size() != theta.size()) {
        throw ContractViolation("retrospective_performance: regressor has " +
                                std::to_string(phi_prev.size()) + " entries, theta has " +
                                std::to_string(theta.size()));
    }
    return z + sigma * (phi_prev.dot(theta.transpose()) - u_prev);
}

Matrix covariance_update(const Matrix& p, const RowVector& phi, const RowVector& phi_prev,
                         double sigma, double r_z, double r_u) {
    const Eigen::Index n = p.rows();
    if (p.cols() != n || phi.size() != n || phi_prev.size() != n) {
        throw ContractViolation("covariance_update: dimension mismatch");
    }
    const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
    if ((p - p.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
        throw ContractViolation("covariance_update: covariance is not symmetric");
    }
    if (p.llt().info() != Eigen::Success) {
        throw ContractViolation("covariance_update: covariance is not positive definite");
    }

    // Weighted stacked regressor W * Phi with W = diag(sqrt(r_z), sqrt(r_u)).
    Eigen::Matrix<double, 2, Eigen::Dynamic, 0, 2, kMaxGains> psi(2, n);
    psi.row(0) = std::sqrt(r_z) * sigma * phi_prev;
    psi.row(1) = std::sqrt(r_u) * phi;

    const Eigen::Matrix2d innovation = Eigen::Matrix2d::Identity() + psi * p * psi.transpose();
    const Eigen::Matrix<double, Eigen::Dynamic, 2, 0, kMaxGains, 2> gain =
        p * psi.transpose() * innovation.inverse();

    // Joseph form keeps the result PD under rounding.
    const Matrix a = Matrix::Identity(n, n) - gain * psi;
    Matrix next = a * p * a.transpose() + gain * gain.transpose();
    return 0.5 * (next + next.transpose());
}

StepOutput rcac_step(State state, double z, double r, const Hyperparams& params) {
    const double u_next = step_in_place(state, z, r, params);
    return {u_next, std::move(state)};
}

double step_in_place(State& s, double z, double r, const Hyperparams& params) {
    if (!std::isfinite(z) || !std::isfinite(r)) {
        throw InputError("rcac: non-finite input at step " + std::to_string(s.step));
    }

    const Matrix p_next = covariance_update(s.p, s.phi, s.phi_prev, params.sigma, params.r_z, params.r_u);
    const double zhat = retrospective_performance(z, s.phi_prev, s.theta, s.u_prev, params.sigma);
    const double control_penalty = s.phi.dot(s.theta.transpose());

    Vector theta_next = s.theta
                        - params.sigma * params.r_z * zhat * (p_next * s.phi_prev.transpose())
                        - params.r_u * control_penalty * (p_next * s.phi.transpose());

    if (!all_finite_and_bounded(theta_next, p_next)) {
        throw DivergenceError("rcac: gains or covariance diverged", s.step);
    }

    const RowVector phi_next = build_regressor(s, z, r, params);

    s.gamma = next_gamma(s, params);
    s.z_prev = z;
    s.phi_prev = s.phi;
    s.u_prev = s.u;
    s.phi = phi_next;
    s.theta = theta_next;
    s.p = p_next;
    s.u = phi_next.dot(theta_next.transpose());
    ++s.step;
    return s.u;
}

Loop::Loop(Hyperparams params) : params_(std::move(params)), state_(State::initial(params_)) {}

void Loop::force_theta(const Vector& theta) {
    if (theta.size() != state_.theta.size()) {
        throw ContractViolation("force_theta: dimension mismatch");
    }
    state_.theta = theta;
    state_.u = state_.phi.dot(theta.transpose());
}

}  // namespace afw::rcac
