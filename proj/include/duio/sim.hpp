#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "duio/synthesis.hpp"

namespace duio {

struct SimConfig {
    double dt = 1e-4;
    double t_end = 5.0;
    enum class Integrator { Euler, Rk4 };
    Integrator integrator = Integrator::Rk4;
    double boundary_layer = 1e-3;  // 0 selects hard sign
    int record_stride = 1;

    void validate() const;
};

// Exogenous inputs. `global_input` produces the full m-vector u(t); each
// node's known/unknown slices are taken per its NodeSpec column indices.
struct Signals {
    std::function<Vec(double)> global_input;
    double declared_bound = 0.0;  // u_bar_max the gains were computed against

    static Signals zero(int m);
};

// Feedback hook evaluated once per step (zero-order hold): receives the time,
// the plant state and all current estimates, returns the global input.
using Controller =
    std::function<Vec(double t, const Vec& x, const std::vector<Vec>& xhat,
                      const DuioDesign& design)>;

struct Trajectory {
    std::vector<double> times;
    Mat x;                      // T x n
    std::vector<Mat> xhat;      // per node, T x n
    std::vector<Mat> uhat_bar;  // per node, T x (m - l_i)

    Vec error(int step, int node) const;      // x - xhat_i at a sample
    double error_norm(int step, int node) const;
    int n_samples() const { return static_cast<int>(times.size()); }
};

// Componentwise switching function: hard sign with sign(0) = 0, or the
// boundary-layer saturation clamp(s/eps, -1, 1) when eps > 0.
Vec switching(const Vec& s, double boundary_layer);

// Right-hand side of node i's observer, per the networked estimator law.
Vec observer_rhs(const DuioDesign& design, int i, const std::vector<Vec>& xhat,
                 const Vec& y_i, const Vec& u_i, double boundary_layer);

Vec estimate_unknown_input(const DuioDesign& design, int i,
                           const std::vector<Vec>& xhat, double boundary_layer,
                           const Tolerances& tol = {});

Trajectory simulate(const DuioDesign& design, const Vec& plant_init,
                    const std::vector<Vec>& estimates_init, const Signals& signals,
                    const SimConfig& config,
                    const std::optional<Controller>& controller = std::nullopt);

struct ErrorCoordinates {
    Mat eps_a;  // T x sum(w_i)
    Mat eps_b;  // T x sum(n - w_i)
};

// eps = T' e with T = [W_g  M]; e = T eps holds exactly (T orthonormal).
ErrorCoordinates transform_errors(const DuioDesign& design, const Trajectory& traj);

// V(t) = eps_a' Q eps_a, the consensus Lyapunov diagnostic.
std::vector<double> lyapunov_series(const DuioDesign& design, const Mat& eps_a);

// CSV export: time, x[1..n], then per node xhat_i[1..n], err_norm_i,
// uhat_bar_i[...]; >= 12 significant digits.
void write_csv(const std::string& path, const DuioDesign& design,
               const Trajectory& traj);

}  // namespace duio
