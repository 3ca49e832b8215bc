#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "duio/cases.hpp"
#include "duio/errors.hpp"
#include "duio/svgplot.hpp"
#include "duio/sysdesc.hpp"

namespace {

using namespace duio;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitJointCondition = 3;
constexpr int kExitBlowup = 4;

Tolerances tolerances_from_env() {
    Tolerances tol;
    if (const char* raw = std::getenv("GEO_DUIO_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(raw, &end);
        if (end == raw || *end != '\0' || v <= 0.0)
            throw ValidationError("GEO_DUIO_TOL must be a positive number");
        tol.rank = v;
    }
    return tol;
}

void print_usage(std::ostream& out) {
    out << "usage: geoduio <command> [options]\n"
           "\n"
           "commands:\n"
           "  synthesize <input> <output>   design observers for a system description;\n"
           "                                write a structured report\n"
           "  simulate <input> [design]     run the networked observers; an optional\n"
           "                                synthesize report supplies gain overrides\n"
           "    --t-end T --dt DT --integrator euler|rk4 --boundary-layer EPS\n"
           "    --csv PATH (default trajectory.csv) --svg PATH\n"
           "  platoon [--paper-gains] [--graph path|complete] [--gain-scale S] [--out DIR]\n"
           "    --write-description PATH    write the platoon description file and exit\n"
           "                                run the four-vehicle case study\n"
           "\n"
           "GEO_DUIO_TOL overrides the numerical rank tolerance.\n";
}

std::string spectrum_string(const Mat& M) {
    std::ostringstream out;
    out.precision(6);
    const Eigen::VectorXcd eigs = Eigen::EigenSolver<Mat>(M).eigenvalues();
    for (Eigen::Index k = 0; k < eigs.size(); ++k) {
        if (k) out << ", ";
        out << eigs(k).real();
        if (std::abs(eigs(k).imag()) > 1e-12)
            out << (eigs(k).imag() >= 0 ? "+" : "") << eigs(k).imag() << "i";
    }
    return out.str();
}

std::string design_report(const SystemDescription& desc, const DuioDesign& design,
                          const Tolerances& tol) {
    std::ostringstream out;
    out.precision(10);
    out << "observer design report\n";
    out << "states " << design.n_states() << " inputs " << design.n_inputs() << " nodes "
        << design.n_nodes() << "\n";
    out << "chi " << design.chi << "\n";
    out << "gamma " << design.gamma << "\n";
    out << "u_bar_max " << design.u_bar_max << "\n";
    bool any_rank = false;
    const auto specs = desc.node_specs();
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const bool rank_ok = check_rank_condition(specs[i], tol);
        any_rank = any_rank || rank_ok;
        const auto& node = design.nodes[i];
        out << "node " << i + 1 << "\n";
        out << "  rank condition: " << (rank_ok ? "PASS" : "FAIL") << "\n";
        out << "  dim W_g: " << node.Wg.dim() << "\n";
        out << "  restricted spectrum: " << spectrum_string(node.restricted) << "\n";
        out << "  induced spectrum: " << spectrum_string(node.induced) << "\n";
    }
    out << "rank condition (any node): " << (any_rank ? "PASS" : "FAIL") << "\n";
    out << "joint condition: "
        << (check_joint_condition(design.nodes, tol) ? "PASS" : "FAIL") << "\n";
    return out.str();
}

// Pull "chi <v>" / "gamma <v>" out of a synthesize report.
void apply_design_overrides(const std::string& path, DuioDesign& design) {
    std::ifstream file(path);
    if (!file) throw ValidationError("cannot open design file: " + path);
    std::string word;
    while (file >> word) {
        if (word == "chi") {
            if (!(file >> design.chi)) throw ValidationError("design file: bad chi value");
        } else if (word == "gamma") {
            if (!(file >> design.gamma))
                throw ValidationError("design file: bad gamma value");
        }
    }
    if (design.chi <= 0.0 || design.gamma <= 0.0)
        throw ValidationError("design file must carry positive chi and gamma");
}

int cmd_synthesize(const std::vector<std::string>& args) {
    if (args.size() != 2)
        throw ValidationError("synthesize expects <input> <output>");
    const Tolerances tol = tolerances_from_env();
    const SystemDescription desc = load_system(args[0]);
    const DuioDesign design = synthesize(desc.A, desc.B, desc.node_specs(), desc.graph(),
                                         GoodRegion{desc.alpha}, desc.u_bar_max, tol);
    std::ofstream out(args[1]);
    if (!out) throw ValidationError("cannot open output file: " + args[1]);
    out << design_report(desc, design, tol);
    std::cout << "design report written to " << args[1] << "\n";
    return kExitOk;
}

int cmd_simulate(const std::vector<std::string>& args) {
    std::vector<std::string> positional;
    std::optional<double> t_end, dt, boundary_layer;
    std::optional<SimConfig::Integrator> integrator;
    std::string csv_path = "trajectory.csv";
    std::string svg_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        auto value = [&](const char* flag) -> std::string {
            if (i + 1 >= args.size())
                throw ValidationError(std::string(flag) + " requires a value");
            return args[++i];
        };
        if (a == "--t-end")
            t_end = std::stod(value("--t-end"));
        else if (a == "--dt")
            dt = std::stod(value("--dt"));
        else if (a == "--boundary-layer")
            boundary_layer = std::stod(value("--boundary-layer"));
        else if (a == "--integrator") {
            const std::string v = value("--integrator");
            if (v == "euler")
                integrator = SimConfig::Integrator::Euler;
            else if (v == "rk4")
                integrator = SimConfig::Integrator::Rk4;
            else
                throw ValidationError("--integrator must be euler or rk4");
        } else if (a == "--csv")
            csv_path = value("--csv");
        else if (a == "--svg")
            svg_path = value("--svg");
        else if (!a.empty() && a[0] == '-')
            throw ValidationError("unknown simulate option: " + a);
        else
            positional.push_back(a);
    }
    if (positional.empty() || positional.size() > 2)
        throw ValidationError("simulate expects <input> [design] plus options");

    const Tolerances tol = tolerances_from_env();
    SystemDescription desc = load_system(positional[0]);
    if (t_end) desc.sim.t_end = *t_end;
    if (dt) desc.sim.dt = *dt;
    if (boundary_layer) desc.sim.boundary_layer = *boundary_layer;
    if (integrator) desc.sim.integrator = *integrator;
    if (desc.sim.t_end <= 0.0) throw ValidationError("--t-end must be positive");
    desc.sim.validate();

    DuioDesign design = synthesize(desc.A, desc.B, desc.node_specs(), desc.graph(),
                                   GoodRegion{desc.alpha}, desc.u_bar_max, tol);
    if (positional.size() == 2) apply_design_overrides(positional[1], design);

    Signals signals = Signals::zero(desc.m);
    signals.declared_bound = desc.u_bar_max;
    const Vec x0 = desc.x0.size() ? desc.x0 : Vec::Zero(desc.n);
    const std::vector<Vec> estimates(design.n_nodes(), Vec::Zero(desc.n));
    const Trajectory traj = simulate(design, x0, estimates, signals, desc.sim);

    write_csv(csv_path, design, traj);
    if (!svg_path.empty()) {
        std::vector<PlotSeries> err(design.n_nodes());
        for (int i = 0; i < design.n_nodes(); ++i) {
            err[i].label = "node " + std::to_string(i + 1);
            for (int k = 0; k < traj.n_samples(); ++k) {
                err[i].x.push_back(traj.times[k]);
                err[i].y.push_back(traj.error_norm(k, i));
            }
        }
        write_svg_plot(svg_path, "Estimation error norm per node", "t [s]", "||e_i(t)||",
                       err);
    }
    std::cout.precision(10);
    std::cout << "final error norms at t = " << traj.times.back() << ":";
    for (int i = 0; i < design.n_nodes(); ++i)
        std::cout << " " << traj.error_norm(traj.n_samples() - 1, i);
    std::cout << "\ntrajectory written to " << csv_path << "\n";
    return kExitOk;
}

int cmd_platoon(const std::vector<std::string>& args) {
    CaseOverrides overrides;
    overrides.output_dir = "platoon_out";
    std::string description_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        auto value = [&](const char* flag) -> std::string {
            if (i + 1 >= args.size())
                throw ValidationError(std::string(flag) + " requires a value");
            return args[++i];
        };
        if (a == "--write-description")
            description_path = value("--write-description");
        else if (a == "--paper-gains")
            overrides.paper_gains = true;
        else if (a == "--graph") {
            overrides.graph = value("--graph");
            if (overrides.graph != "path" && overrides.graph != "complete")
                throw ValidationError("--graph must be path or complete");
        } else if (a == "--out")
            overrides.output_dir = value("--out");
        else if (a == "--gain-scale") {
            overrides.gain_scale = std::stod(value("--gain-scale"));
            if (overrides.gain_scale <= 0.0)
                throw ValidationError("--gain-scale must be positive");
        }
        else
            throw ValidationError("unknown platoon option: " + a);
    }
    if (!description_path.empty()) {
        std::ofstream out(description_path);
        if (!out) throw ValidationError("cannot open output file: " + description_path);
        out << serialize_system(platoon_description(overrides.graph));
        std::cout << "system description written to " << description_path << "\n";
        return kExitOk;
    }
    const CaseStudyResult result = run_case_study(overrides);
    std::cout << result.report;
    return result.all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
        print_usage(args.empty() ? std::cerr : std::cout);
        return args.empty() ? kExitValidation : kExitOk;
    }
    const std::string command = args[0];
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    try {
        if (command == "synthesize") return cmd_synthesize(rest);
        if (command == "simulate") return cmd_simulate(rest);
        if (command == "platoon") return cmd_platoon(rest);
        throw ValidationError("unknown command: " + command);
    } catch (const JointConditionViolated& e) {
        std::cerr << "joint condition violated: " << e.what() << "\n";
        return kExitJointCondition;
    } catch (const NumericalBlowup& e) {
        std::cerr << "numerical blowup: " << e.what() << "\n";
        return kExitBlowup;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
