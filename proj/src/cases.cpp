#include "duio/cases.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "duio/svgplot.hpp"

namespace duio {

PlatoonSystem build_platoon(const PlatoonParams& params, const std::string& graph_kind) {
    const int nv = params.n_vehicles;
    const int n = 3 * nv;
    const double inv_tau = 1.0 / params.tau;

    Mat block(3, 3);
    block << 0, 1, 0,
             0, 0, 1,
             0, 0, -inv_tau;

    PlatoonSystem sys;
    sys.A = kron(Mat::Identity(nv, nv), block);
    // Acceleration channel gain +1/tau, matching a_dot = -(a - u)/tau.
    sys.B = Mat::Zero(n, nv);
    for (int i = 0; i < nv; ++i) sys.B(3 * i + 2, i) = inv_tau;

    for (int i = 0; i < nv; ++i) {
        NodeSpec node;
        node.index = i;
        node.C = Mat::Zero(2, n);
        node.C(0, 3 * i) = 1.0;      // own position
        node.C(1, 3 * i + 1) = 1.0;  // own velocity
        node.known_cols = {i};
        node.B_known = sys.B.col(i);
        node.B_unknown = Mat(n, nv - 1);
        for (int j = 0, c = 0; j < nv; ++j) {
            if (j == i) continue;
            node.unknown_cols.push_back(j);
            node.B_unknown.col(c++) = sys.B.col(j);
        }
        sys.nodes.push_back(std::move(node));
    }

    if (graph_kind == "path") {
        sys.graph = Graph::path(nv);
    } else if (graph_kind == "complete") {
        sys.graph = Graph::complete(nv);
    } else {
        throw ValidationError("unknown platoon graph kind: " + graph_kind);
    }
    return sys;
}

double leader_input(double t) {
    return std::clamp(1.5 * std::sin(0.5 * t), -kLeaderInputBound, kLeaderInputBound);
}

Controller platoon_controller(const PlatoonParams& params, double boundary_layer) {
    // The switching-based reconstruction carries the unknown input in its
    // average (equivalent) value; a first-order low-pass extracts it before
    // it is used as feedforward.
    struct FilterState {
        Vec value;
        double last_t = 0.0;
        bool primed = false;
    };
    auto filt = std::make_shared<FilterState>();
    return [params, boundary_layer, filt](double t, const Vec& x, const std::vector<Vec>& xhat,
                                          const DuioDesign& design) {
        const int nv = params.n_vehicles;
        Vec uhat_raw(nv - 1);
        for (int i = 1; i < nv; ++i) {
            const Vec uhat = estimate_unknown_input(design, i, xhat, boundary_layer);
            const auto& cols = design.nodes[i].spec.unknown_cols;
            const auto it = std::find(cols.begin(), cols.end(), i - 1);
            // Eq. (22) can rail at +/- gamma * ||Bbar^+ W|| during transients;
            // the unknown input itself is declared bounded, so clamp to that.
            uhat_raw(i - 1) =
                std::clamp(uhat(static_cast<Eigen::Index>(it - cols.begin())),
                           -design.u_bar_max, design.u_bar_max);
        }
        if (!filt->primed || t < filt->last_t) {
            filt->value = uhat_raw;
            filt->primed = true;
        } else if (t > filt->last_t && params.uhat_filter_tau > 0.0) {
            const double a = std::clamp((t - filt->last_t) / params.uhat_filter_tau, 0.0, 1.0);
            filt->value += a * (uhat_raw - filt->value);
        } else if (params.uhat_filter_tau <= 0.0) {
            filt->value = uhat_raw;
        }
        filt->last_t = t;

        Vec u(nv);
        u(0) = leader_input(t);
        for (int i = 1; i < nv; ++i) {
            double acc = filt->value(i - 1);

            const double s_i = x(3 * i);      // measured by vehicle i
            const double v_i = x(3 * i + 1);
            const double a_i_hat = xhat[i](3 * i + 2);
            for (int j = 0; j < i; ++j) {
                const double s_j_hat = xhat[i](3 * j);
                const double v_j_hat = xhat[i](3 * j + 1);
                const double a_j_hat = xhat[i](3 * j + 2);
                const double d_ij = (i - j) * params.d_gap;
                acc += params.k_s * (s_j_hat - s_i - d_ij) +
                       params.k_v * (v_j_hat - v_i) +
                       params.k_a * (a_j_hat - a_i_hat);
            }
            // Assumption 2 bounds every vehicle's input by the declared
            // actuator limit; the followers share the leader's actuator.
            u(i) = std::clamp(acc, -params.u_clip, params.u_clip);
        }
        return u;
    };
}

Controller ideal_platoon_controller(const PlatoonParams& params) {
    return [params](double t, const Vec& x, const std::vector<Vec>&, const DuioDesign&) {
        const int nv = params.n_vehicles;
        Vec u(nv);
        u(0) = leader_input(t);
        for (int i = 1; i < nv; ++i) {
            const double acc =
                u(i - 1) +
                params.k_s * (x(3 * (i - 1)) - x(3 * i) - params.d_gap) +
                params.k_v * (x(3 * (i - 1) + 1) - x(3 * i + 1)) +
                params.k_a * (x(3 * (i - 1) + 2) - x(3 * i + 2));
            u(i) = std::clamp(acc, -params.u_clip, params.u_clip);
        }
        return u;
    };
}

std::vector<Vec> formation_estimates(const PlatoonParams& params) {
    const int nv = params.n_vehicles;
    std::vector<Vec> init(nv);
    for (int i = 0; i < nv; ++i) {
        Vec xh = Vec::Zero(3 * nv);
        const double s_i = params.x0(3 * i);
        const double v_i = params.x0(3 * i + 1);
        for (int j = 0; j < nv; ++j) {
            xh(3 * j) = s_i + (i - j) * params.d_gap;
            xh(3 * j + 1) = v_i;
        }
        init[i] = xh;
    }
    return init;
}

Controller bounded_exogenous_inputs(double bound) {
    return [bound](double t, const Vec&, const std::vector<Vec>&, const DuioDesign& design) {
        Vec u(design.n_inputs());
        for (int i = 0; i < design.n_inputs(); ++i)
            u(i) = std::clamp(1.5 * std::sin(0.5 * t + 0.7 * i), -bound, bound);
        return u;
    };
}

double convergence_threshold(double initial_error_norm) {
    return std::max(0.05, 0.02 * initial_error_norm);
}

namespace {

void write_case_plots(const std::string& dir, const PlatoonParams& params,
                      const DuioDesign& design, const Trajectory& est,
                      const Trajectory& form) {
    const int nv = params.n_vehicles;
    std::vector<PlotSeries> err(nv), vel(nv), gap(nv - 1);
    for (int i = 0; i < nv; ++i) {
        err[i].label = "node " + std::to_string(i + 1);
        vel[i].label = "vehicle " + std::to_string(i + 1);
        if (i > 0) gap[i - 1].label = "s" + std::to_string(i) + " - s" + std::to_string(i + 1);
    }
    for (int k = 0; k < est.n_samples(); ++k) {
        for (int i = 0; i < nv; ++i) {
            err[i].x.push_back(est.times[k]);
            err[i].y.push_back(est.error_norm(k, i));
        }
    }
    for (int k = 0; k < form.n_samples(); ++k) {
        const double t = form.times[k];
        for (int i = 0; i < nv; ++i) {
            vel[i].x.push_back(t);
            vel[i].y.push_back(form.x(k, 3 * i + 1));
            if (i > 0) {
                gap[i - 1].x.push_back(t);
                gap[i - 1].y.push_back(form.x(k, 3 * (i - 1)) - form.x(k, 3 * i));
            }
        }
    }
    write_svg_plot(dir + "/error_norms.svg", "Estimation error norm per node", "t [s]",
                   "||e_i(t)||", err);
    write_svg_plot(dir + "/velocities.svg", "Vehicle velocities", "t [s]", "v [m/s]", vel);
    write_svg_plot(dir + "/spacings.svg", "Inter-vehicle distance", "t [s]", "gap [m]", gap);
    write_csv(dir + "/estimation.csv", design, est);
    write_csv(dir + "/formation.csv", design, form);
}

}  // namespace

CaseStudyResult run_case_study(const CaseOverrides& overrides) {
    const PlatoonParams params;
    const PlatoonSystem sys = build_platoon(params, overrides.graph);
    const GoodRegion region;
    const Tolerances tol;
    const int nv = params.n_vehicles;

    CaseStudyResult out;
    out.design = synthesize(sys.A, sys.B, sys.nodes, sys.graph, region, kLeaderInputBound, tol);
    if (overrides.paper_gains) {
        out.design.chi = kPaperChi;
        out.design.gamma = kPaperGamma;
    }
    out.design.chi *= overrides.gain_scale;
    out.design.gamma *= overrides.gain_scale;

    Signals signals = Signals::zero(nv);
    signals.declared_bound = kLeaderInputBound;

    // A fixed-step integrator chatters when the per-step sliding kick
    // dt * gamma overshoots the boundary layer; keep a 3x margin.
    const double chatter_guard = 3.0 * overrides.sim.dt * out.design.gamma;

    // --- estimation run: observers start with no prior information.
    const std::vector<Vec> no_prior(nv, Vec::Zero(out.design.n_states()));
    out.estimation =
        simulate(out.design, params.x0, no_prior, signals, overrides.sim,
                 platoon_controller(params, overrides.sim.boundary_layer));

    // --- formation run: formation-prior estimates, unconstrained actuators,
    // widened switching layer so the reconstructed feedforward is smooth.
    PlatoonParams form_params = params;
    form_params.u_clip = 1e9;
    SimConfig form_cfg = overrides.sim;
    form_cfg.boundary_layer = std::max(0.01, chatter_guard);
    out.formation =
        simulate(out.design, params.x0, formation_estimates(params), signals, form_cfg,
                 platoon_controller(form_params, form_cfg.boundary_layer));

    // --- diagnostic run: bound-respecting open-loop inputs, estimates
    // perturbed off the true state; dense sampling for finite differences.
    SimConfig diag_cfg = overrides.sim;
    diag_cfg.record_stride = 1;
    diag_cfg.boundary_layer = std::max(diag_cfg.boundary_layer, chatter_guard);
    std::vector<Vec> perturbed(nv);
    for (int i = 0; i < nv; ++i) {
        Vec delta(out.design.n_states());
        for (int k = 0; k < delta.size(); ++k) delta(k) = std::sin(1.0 + k + i);
        perturbed[i] = params.x0 + 0.5 * delta / delta.norm();
    }
    out.diagnostic = simulate(out.design, params.x0, perturbed, signals, diag_cfg,
                              bounded_exogenous_inputs(kLeaderInputBound));

    // Check 1: estimation error below threshold for all t in [0.5 s, t_end].
    for (int i = 0; i < nv; ++i) {
        const double threshold = convergence_threshold(out.estimation.error_norm(0, i));
        double worst = 0.0;
        for (int k = 0; k < out.estimation.n_samples(); ++k)
            if (out.estimation.times[k] >= 0.5)
                worst = std::max(worst, out.estimation.error_norm(k, i));
        out.checks.push_back({"estimation convergence node " + std::to_string(i + 1),
                              worst <= threshold, worst, threshold,
                              "max ||e|| over t in [0.5, t_end], estimation run"});
    }

    // Check 2: spacing and velocity tracking for t >= 4 s on the formation run.
    double worst_gap = 0.0, worst_vel = 0.0;
    for (int k = 0; k < out.formation.n_samples(); ++k) {
        if (out.formation.times[k] < 4.0) continue;
        for (int i = 1; i < nv; ++i) {
            worst_gap = std::max(
                worst_gap,
                std::abs(out.formation.x(k, 3 * (i - 1)) - out.formation.x(k, 3 * i) -
                         params.d_gap));
            worst_vel = std::max(
                worst_vel,
                std::abs(out.formation.x(k, 3 * i + 1) - out.formation.x(k, 1)));
        }
    }
    out.checks.push_back({"inter-vehicle spacing (t >= 4 s)", worst_gap <= 0.5, worst_gap,
                          0.5, "max |gap - 20 m|, formation run"});
    out.checks.push_back({"velocity tracking (t >= 4 s)", worst_vel <= 0.2, worst_vel, 0.2,
                          "max |v_i - v_leader|, formation run"});

    // Check 3: the per-node rank condition fails everywhere, yet the joint
    // geometric condition holds.
    bool any_rank = false;
    for (const auto& node : sys.nodes) any_rank = any_rank || check_rank_condition(node, tol);
    const bool joint = check_joint_condition(out.design.nodes, tol);
    out.checks.push_back({"rank condition fails at every node", !any_rank,
                          any_rank ? 1.0 : 0.0, 0.0, "rank(C_i Bbar_i) < rank(Bbar_i)"});
    out.checks.push_back({"joint condition holds", joint, joint ? 1.0 : 0.0, 1.0,
                          "intersection of all W_g,i is zero"});

    // Check 4: error-coordinate decoupling and Lyapunov decrease on the
    // diagnostic run.
    {
        const ErrorCoordinates ec = transform_errors(out.design, out.diagnostic);
        Mat Ab = Mat::Zero(ec.eps_b.cols(), ec.eps_b.cols());
        int off = 0;
        for (const auto& node : out.design.nodes) {
            Ab.block(off, off, node.induced.rows(), node.induced.cols()) = node.induced;
            off += static_cast<int>(node.induced.rows());
        }
        const double dt = out.diagnostic.times[1] - out.diagnostic.times[0];
        double mismatch = 0.0;
        for (int k = 1; k + 1 < out.diagnostic.n_samples(); ++k) {
            const Vec fd =
                (ec.eps_b.row(k + 1) - ec.eps_b.row(k - 1)).transpose() / (2.0 * dt);
            const Vec model = Ab * ec.eps_b.row(k).transpose();
            mismatch = std::max(mismatch, (fd - model).cwiseAbs().maxCoeff());
        }
        const std::vector<double> V = lyapunov_series(out.design, ec.eps_a);
        double worst_increment = 0.0;
        for (size_t k = 1; k + 1 < V.size(); ++k)
            if (out.diagnostic.times[k] >= 0.01)
                worst_increment = std::max(worst_increment, V[k + 1] - V[k]);
        out.checks.push_back({"eps_b decoupling (finite difference)", mismatch <= 1e-3,
                              mismatch, 1e-3, "max |d eps_b/dt - A_b eps_b|, diagnostic run"});
        out.checks.push_back({"Lyapunov non-increase after 10 ms", worst_increment <= 1e-3,
                              worst_increment, 1e-3,
                              "max V(t+dt) - V(t), diagnostic run"});
    }

    out.all_pass = true;
    std::ostringstream rep;
    rep << "platoon case study report\n"
        << "graph: " << overrides.graph << ", chi = " << out.design.chi
        << ", gamma = " << out.design.gamma
        << (overrides.paper_gains ? " (paper gains)" : " (synthesized)") << "\n"
        << "runs: estimation (no-prior observers, |u_i| <= " << params.u_clip
        << "), formation (formation prior, layer 0.01), diagnostic (open-loop bounded "
           "inputs)\n";
    for (int i = 0; i < nv; ++i)
        rep << "node " << i + 1 << ": dim W_g = " << out.design.nodes[i].Wg.dim()
            << ", max Re eig(induced) = " << max_real_eig(out.design.nodes[i].induced)
            << "\n";
    rep << "note: B uses +1/tau in the acceleration row (the dynamics display); the\n"
        << "opposite sign convention only flips the sign of u.\n";
    for (const auto& c : out.checks) {
        out.all_pass = out.all_pass && c.pass;
        rep << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": measured " << c.measured
            << " vs threshold " << c.threshold << " (" << c.detail << ")\n";
    }
    out.report = rep.str();

    if (!overrides.output_dir.empty()) {
        std::filesystem::create_directories(overrides.output_dir);
        write_case_plots(overrides.output_dir, params, out.design, out.estimation,
                         out.formation);
        std::ofstream rep_file(overrides.output_dir + "/report.txt");
        rep_file << out.report;
    }
    return out;
}

}  // namespace duio
