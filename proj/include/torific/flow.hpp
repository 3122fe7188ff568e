#pragma once
// Inverse Monge-Ampere flow du/dt = sigma - 1 in symplectic-potential form.
//
// The state is the smooth correction v with u = u_can + v.  The density is
//   sigma = c_norm det(D^2 u) exp(u - <x, grad u>),
// evaluated per node with the canonical contributions combined analytically
// into the precomputed envelope (grid module), and c_norm fixed by
// int_P sigma = V_P.  Explicit Euler with adaptive dt; steps are rejected and
// halved when the energy monitors or discrete convexity fail.

#include <string>
#include <utility>
#include <vector>

#include "torific/grid.hpp"

namespace torific {

struct FlowOptions {
    double t_max = 20.0;
    double kappa = 0.2;              // dt = kappa h^2 min_k lambda_min(D^2 u)/sigma
    double dt_min = 1e-10;
    double dt_growth = 2.0;          // cap on step-to-step dt increase
    double trace_dt = 0.01;          // row cadence of the trace
    double plateau_tol = 1e-6;       // |R(t) - R(t-w)| < tol (1 + R)
    double plateau_window = 1.0;
    double e_drift_tol = 1e-8;       // per-step rejection triggers
    double d_increase_tol = 1e-8;
    bool track_m_per_step = false;   // per-step M monotonicity (extra log pass)
    long long max_steps = 2000000000;
};

struct TraceRow {
    double t = 0, E = 0, D = 0, R = 0, H = 0, M = 0, ding_c = 0;
    double dist_to_limit = 0, sigma_min = 0, sigma_max = 0, dt = 0;
};

// worst per-step monitor excursions over all accepted steps
struct StepStats {
    double e_drift_step = 0.0;       // max |E(t+dt) - E(t)|
    double e_drift_total = 0.0;      // max |E(t) - E(0)|
    double d_increase = -1e300;      // max D(t+dt) - D(t)
    double r_increase = -1e300;
    double ding_increase = -1e300;
    double m_increase = -1e300;      // tracked only with track_m_per_step
    double key_slack = -1e300;       // max ((D_b' - D_b)/dt + avg(sigma-b)^2)/(1+R)
    double slope_slack = -1e300;     // same with b = 1: ((D' - D)/dt + R)/(1+R)
    double sigma_moment_max = 0.0;   // max_i |int sigma x_i| over accepted steps
    long long steps = 0;
    long long rejections = 0;
};

enum class FlowStatus { Plateau, TimeLimit, StepLimit, Aborted };

struct FlowResult {
    FlowStatus status = FlowStatus::TimeLimit;
    std::string abort_reason;
    std::vector<TraceRow> trace;
    std::vector<double> v;
    std::vector<double> sigma;
    double t_end = 0.0;
    double c_norm = 0.0;
    double R_end = 0.0;
    double max_abs_v = 0.0;
    double collar_grad_max = 0.0;  // max |grad v| over collar nodes at trace rows
    StepStats stats;
};

struct SigmaEval {
    double c_norm = 0.0;
    double sigma_min = 0.0, sigma_max = 0.0;
    double R = 0.0;
    double min_ratio = 0.0;  // min over nodes of lambda_min(D^2 u)/sigma
    bool convex = true;
    size_t bad_node = 0;
};

// writes the normalized density into sigma; on convexity loss returns
// convex = false with the offending node and leaves sigma unspecified
SigmaEval eval_sigma(const Grid& g, const std::vector<double>& v, std::vector<double>& sigma);

/// "zero" | "bump:EPS" (v0 = EPS prod_F l_F^2) | "file:PATH" (saved state)
std::vector<double> init_state(const Grid& g, const std::string& spec);

// b is the predicted limit density d + ell; when absent it defaults to ell
FlowResult run_flow(const Grid& g, const std::vector<double>& v0, const FlowOptions& opts,
                    const PLConvexFn* limit_b = nullptr);

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows,
                     const std::vector<std::pair<std::string, std::string>>& metadata);
std::vector<TraceRow> read_trace_csv(const std::string& path,
                                     std::vector<std::pair<std::string, std::string>>* metadata);

void save_state(const std::string& path, const Grid& g, const std::vector<double>& v, double t);
std::vector<double> load_state(const std::string& path, const Grid& g);

}  // namespace torific
