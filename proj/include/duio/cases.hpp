#pragma once

#include <string>

#include "duio/sim.hpp"

namespace duio {

// Four-vehicle platoon with first-order actuator lag; each vehicle carries
// state (position, velocity, acceleration) and measures its own (s, v).
struct PlatoonParams {
    int n_vehicles = 4;
    double tau = 0.07;   // inertial lag [s]
    double k_s = 3.5;
    double k_v = 4.0;
    double k_a = 1.0;
    double d_gap = 20.0;  // desired inter-vehicle distance [m]
    double u_clip = 7.0;         // actuator acceleration limit for every vehicle [m/s^2]
    double uhat_filter_tau = 0.1;  // low-pass time constant for the Eq.-22 feedforward [s]
    Vec x0 = (Vec(12) << 150, 22, 0, 120, 21, 1.1, 90, 21.5, 0.6, 60, 20, 1.3).finished();
};

struct PlatoonSystem {
    Mat A;
    Mat B;
    std::vector<NodeSpec> nodes;
    Graph graph;
};

PlatoonSystem build_platoon(const PlatoonParams& params,
                            const std::string& graph_kind = "path");

// Bounded time-varying leader acceleration command; the followers never see it.
double leader_input(double t);
constexpr double kLeaderInputBound = 2.0;

// Predecessor-following law driven by each follower's own observer: estimated
// states of all preceding vehicles plus the reconstructed input of the
// vehicle directly ahead.
Controller platoon_controller(const PlatoonParams& params, double boundary_layer);

// Benchmark law using true states and true predecessor inputs; for
// equilibrium-comparison runs only.
Controller ideal_platoon_controller(const PlatoonParams& params);

// Initial estimates for the formation run: each vehicle seeds its own
// measured position/velocity and assumes the nominal d_gap spacing and a
// common velocity for the others.
std::vector<Vec> formation_estimates(const PlatoonParams& params);

// Open-loop vehicle inputs for the decoupling diagnostic: every vehicle
// applies a phase-shifted bounded acceleration, so each node's unknown
// inputs respect the declared bound.
Controller bounded_exogenous_inputs(double bound);

struct CheckResult {
    std::string name;
    bool pass;
    double measured;
    double threshold;
    std::string detail;
};

struct CaseOverrides {
    bool paper_gains = false;     // chi = 82.3039, gamma = 383.1159
    std::string graph = "path";   // or "complete"
    double gain_scale = 1.0;      // applied after synthesis (negative controls)
    SimConfig sim;
    std::string output_dir;       // empty = no files written
};

// The case study exercises the synthesized design in three simulations:
//  - estimation run: no prior knowledge in the observers, actuator-limited
//    followers; validates estimation convergence.
//  - formation run: formation-prior initialization and a smoothed switching
//    term; validates the spacing / velocity-tracking objectives.
//  - diagnostic run: bound-respecting open-loop inputs and a small estimate
//    perturbation; validates the error-coordinate decoupling and the
//    Lyapunov decrease.
struct CaseStudyResult {
    DuioDesign design;
    Trajectory estimation;
    Trajectory formation;
    Trajectory diagnostic;
    std::vector<CheckResult> checks;
    bool all_pass = false;
    std::string report;
};

constexpr double kPaperChi = 82.3039;
constexpr double kPaperGamma = 383.1159;

// Per-node convergence threshold: ||e_i(t)|| <= max(0.05, 0.02 ||e_i(0)||).
double convergence_threshold(double initial_error_norm);

CaseStudyResult run_case_study(const CaseOverrides& overrides = {});

}  // namespace duio
