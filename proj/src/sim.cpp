#include "duio/sim.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace duio {

void SimConfig::validate() const {
    if (dt <= 0.0) throw ValidationError("sim config: dt must be positive");
    if (t_end < dt) throw ValidationError("sim config: t_end must be >= dt");
    if (boundary_layer < 0.0) throw ValidationError("sim config: boundary layer must be >= 0");
    if (boundary_layer == 0.0 && dt >= 1e-3)
        throw ValidationError("sim config: hard sign switching requires dt < 1e-3");
    if (record_stride < 1) throw ValidationError("sim config: record stride must be >= 1");
}

Signals Signals::zero(int m) {
    Signals s;
    s.global_input = [m](double) { return Vec::Zero(m); };
    s.declared_bound = 0.0;
    return s;
}

Vec switching(const Vec& s, double boundary_layer) {
    Vec out(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (boundary_layer > 0.0) {
            out(k) = std::clamp(s(k) / boundary_layer, -1.0, 1.0);
        } else {
            out(k) = s(k) > 0.0 ? 1.0 : (s(k) < 0.0 ? -1.0 : 0.0);
        }
    }
    return out;
}

namespace {

Vec select_cols(const Vec& u, const std::vector<int>& cols) {
    Vec out(static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out(static_cast<Eigen::Index>(k)) = u(cols[k]);
    return out;
}

// W' * sum_j a_ij (xhat_j - xhat_i), the consensus disagreement seen by node i.
Vec disagreement(const DuioDesign& design, int i, const std::vector<Vec>& xhat) {
    const auto& d = design.nodes[i];
    Vec acc = Vec::Zero(design.n_states());
    for (int j : design.graph.neighbors(i)) acc += xhat[j] - xhat[i];
    return d.insertion.transpose() * acc;
}

}  // namespace

Vec observer_rhs(const DuioDesign& design, int i, const std::vector<Vec>& xhat,
                 const Vec& y_i, const Vec& u_i, double boundary_layer) {
    const auto& d = design.nodes[i];
    const Vec s = disagreement(design, i, xhat);
    Vec rhs = d.A_L * xhat[i] - d.L * y_i;
    rhs += design.chi * (d.insertion * s);
    rhs += design.gamma * (d.insertion * switching(s, boundary_layer));
    if (u_i.size() > 0) rhs += d.spec.B_known * u_i;
    return rhs;
}

Vec estimate_unknown_input(const DuioDesign& design, int i, const std::vector<Vec>& xhat,
                           double boundary_layer, const Tolerances& tol) {
    const auto& d = design.nodes[i];
    if (d.spec.B_unknown.cols() == 0) return Vec(0);
    const Vec s = disagreement(design, i, xhat);
    return design.gamma * pinv(d.spec.B_unknown, tol) *
           (d.insertion * switching(s, boundary_layer));
}

Trajectory simulate(const DuioDesign& design, const Vec& plant_init,
                    const std::vector<Vec>& estimates_init, const Signals& signals,
                    const SimConfig& config, const std::optional<Controller>& controller) {
    config.validate();
    const int n = design.n_states();
    const int N = design.n_nodes();
    if (plant_init.size() != n) throw ValidationError("simulate: bad plant initial state");
    if (static_cast<int>(estimates_init.size()) != N)
        throw ValidationError("simulate: need one initial estimate per node");

    // One flat state: [x; xhat_1; ...; xhat_N].
    Vec state(n * (N + 1));
    state.head(n) = plant_init;
    for (int i = 0; i < N; ++i) state.segment(n * (i + 1), n) = estimates_init[i];

    const auto unpack = [&](const Vec& z) {
        std::vector<Vec> xhat(N);
        for (int i = 0; i < N; ++i) xhat[i] = z.segment(n * (i + 1), n);
        return xhat;
    };

    // u is held fixed over the step (and its RK4 substeps).
    const auto rhs = [&](const Vec& z, const Vec& u) {
        Vec dz(z.size());
        const Vec x = z.head(n);
        const std::vector<Vec> xhat = unpack(z);
        dz.head(n) = design.A * x + design.B * u;
        for (int i = 0; i < N; ++i) {
            const auto& d = design.nodes[i];
            const Vec y_i = d.spec.C * x;
            const Vec u_i = select_cols(u, d.spec.known_cols);
            dz.segment(n * (i + 1), n) =
                observer_rhs(design, i, xhat, y_i, u_i, config.boundary_layer);
        }
        return dz;
    };

    const int steps = static_cast<int>(std::llround(config.t_end / config.dt));
    Trajectory traj;
    const int n_records = steps / config.record_stride + 1;
    traj.x.resize(n_records, n);
    traj.xhat.assign(N, Mat(n_records, n));
    traj.uhat_bar.resize(N);
    for (int i = 0; i < N; ++i)
        traj.uhat_bar[i].resize(n_records, design.nodes[i].spec.B_unknown.cols());

    Tolerances tol;
    const auto record = [&](int row, double t, const Vec& z) {
        traj.times.push_back(t);
        traj.x.row(row) = z.head(n).transpose();
        const std::vector<Vec> xhat = unpack(z);
        for (int i = 0; i < N; ++i) {
            traj.xhat[i].row(row) = xhat[i].transpose();
            traj.uhat_bar[i].row(row) =
                estimate_unknown_input(design, i, xhat, config.boundary_layer, tol)
                    .transpose();
        }
    };

    int row = 0;
    record(row++, 0.0, state);

    for (int k = 0; k < steps; ++k) {
        const double t = k * config.dt;
        const Vec u = controller ? (*controller)(t, state.head(n), unpack(state), design)
                                 : signals.global_input(t);

        if (config.integrator == SimConfig::Integrator::Euler) {
            state += config.dt * rhs(state, u);
        } else {
            const Vec k1 = rhs(state, u);
            const Vec k2 = rhs(state + 0.5 * config.dt * k1, u);
            const Vec k3 = rhs(state + 0.5 * config.dt * k2, u);
            const Vec k4 = rhs(state + config.dt * k3, u);
            state += (config.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }

        if (!state.allFinite() || state.cwiseAbs().maxCoeff() > 1e9)
            throw NumericalBlowup("simulate: state norm exceeded 1e9 at t = " +
                                  std::to_string((k + 1) * config.dt));

        if ((k + 1) % config.record_stride == 0) record(row++, (k + 1) * config.dt, state);
    }
    return traj;
}

Vec Trajectory::error(int step, int node) const {
    return (x.row(step) - xhat[node].row(step)).transpose();
}

double Trajectory::error_norm(int step, int node) const { return error(step, node).norm(); }

ErrorCoordinates transform_errors(const DuioDesign& design, const Trajectory& traj) {
    const int n = design.n_states();
    const int N = design.n_nodes();
    const Mat Wg = stacked_insertion(design.nodes);
    const Mat M = stacked_complement(design.nodes);

    ErrorCoordinates out;
    out.eps_a.resize(traj.n_samples(), Wg.cols());
    out.eps_b.resize(traj.n_samples(), M.cols());
    Vec e(n * N);
    for (int k = 0; k < traj.n_samples(); ++k) {
        for (int i = 0; i < N; ++i) e.segment(n * i, n) = traj.error(k, i);
        out.eps_a.row(k) = (Wg.transpose() * e).transpose();
        out.eps_b.row(k) = (M.transpose() * e).transpose();
    }
    return out;
}

std::vector<double> lyapunov_series(const DuioDesign& design, const Mat& eps_a) {
    std::vector<double> out(eps_a.rows());
    for (Eigen::Index k = 0; k < eps_a.rows(); ++k) {
        const Vec v = eps_a.row(k).transpose();
        out[k] = v.dot(design.Q * v);
    }
    return out;
}

void write_csv(const std::string& path, const DuioDesign& design, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open CSV output file: " + path);
    out << std::setprecision(14);

    const int n = design.n_states();
    const int N = design.n_nodes();
    out << "time";
    for (int j = 1; j <= n; ++j) out << ",x" << j;
    for (int i = 1; i <= N; ++i) {
        for (int j = 1; j <= n; ++j) out << ",xhat" << i << "_" << j;
        out << ",err_norm" << i;
        for (Eigen::Index j = 1; j <= traj.uhat_bar[i - 1].cols(); ++j)
            out << ",uhat_bar" << i << "_" << j;
    }
    out << "\n";

    for (int k = 0; k < traj.n_samples(); ++k) {
        out << traj.times[k];
        for (int j = 0; j < n; ++j) out << "," << traj.x(k, j);
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < n; ++j) out << "," << traj.xhat[i](k, j);
            out << "," << traj.error_norm(k, i);
            for (Eigen::Index j = 0; j < traj.uhat_bar[i].cols(); ++j)
                out << "," << traj.uhat_bar[i](k, j);
        }
        out << "\n";
    }
}

}  // namespace duio
