#include "duio/sysdesc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "duio/cases.hpp"
#include "duio/errors.hpp"

namespace duio {

namespace {

// Token stream over the description text; '#' comments run to end of line.
class TokenReader {
public:
    explicit TokenReader(const std::string& text) {
        std::string stripped;
        stripped.reserve(text.size());
        bool in_comment = false;
        for (char c : text) {
            if (c == '#') in_comment = true;
            if (c == '\n') in_comment = false;
            stripped.push_back(in_comment ? ' ' : c);
        }
        stream_.str(stripped);
    }

    std::string word(const std::string& context) {
        std::string w;
        if (!(stream_ >> w))
            throw ValidationError("description ended early while reading " + context);
        return w;
    }

    void expect(const std::string& keyword) {
        const std::string w = word("keyword '" + keyword + "'");
        if (w != keyword)
            throw ValidationError("expected '" + keyword + "', found '" + w + "'");
    }

    double number(const std::string& context) {
        const std::string w = word(context);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(w, &used);
        } catch (const std::exception&) {
            throw ValidationError("expected a number for " + context + ", found '" + w + "'");
        }
        if (used != w.size())
            throw ValidationError("expected a number for " + context + ", found '" + w + "'");
        return v;
    }

    int integer(const std::string& context) {
        const double v = number(context);
        if (v != std::floor(v) || std::abs(v) > 1e9)
            throw ValidationError("expected an integer for " + context);
        return static_cast<int>(v);
    }

    Mat matrix(int rows, int cols, const std::string& context) {
        Mat M(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) M(r, c) = number(context);
        return M;
    }

    bool done() {
        std::string w;
        return !(stream_ >> w);
    }

private:
    std::istringstream stream_;
};

void write_matrix(std::ostream& out, const Mat& M) {
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        for (Eigen::Index c = 0; c < M.cols(); ++c) out << (c ? " " : "  ") << M(r, c);
        out << "\n";
    }
}

}  // namespace

void SystemDescription::validate() const {
    if (n <= 0 || m <= 0) throw ValidationError("n and m must be positive");
    if (A.rows() != n || A.cols() != n)
        throw ValidationError("A must be n x n");
    if (B.rows() != n || B.cols() != m)
        throw ValidationError("B must be n x m");
    if (!A.allFinite() || !B.allFinite())
        throw ValidationError("A and B must be finite");
    if (nodes.empty()) throw ValidationError("at least one node is required");
    const int N = static_cast<int>(nodes.size());
    if (adjacency.rows() != N || adjacency.cols() != N)
        throw ValidationError("graph adjacency must be one row and column per node");
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            const double a = adjacency(i, j);
            if (a != 0.0 && a != 1.0)
                throw ValidationError("graph adjacency must be 0/1 (weighted graphs are "
                                      "not supported)");
            if (a != adjacency(j, i))
                throw ValidationError("graph adjacency must be symmetric");
        }
        if (adjacency(i, i) != 0.0)
            throw ValidationError("graph adjacency must have a zero diagonal");
    }
    if (!is_connected(Graph(adjacency)))
        throw ValidationError("graph must be connected (Assumption 1)");
    for (int i = 0; i < N; ++i) {
        const auto& node = nodes[i];
        const std::string tag = "node " + std::to_string(i + 1);
        if (node.C.cols() != n || node.C.rows() < 1)
            throw ValidationError(tag + ": C must have n columns and at least one row");
        if (!node.C.allFinite()) throw ValidationError(tag + ": C must be finite");
        std::vector<int> cols = node.known_cols;
        std::sort(cols.begin(), cols.end());
        if (std::adjacent_find(cols.begin(), cols.end()) != cols.end())
            throw ValidationError(tag + ": duplicate known-input column");
        for (int c : cols)
            if (c < 0 || c >= m)
                throw ValidationError(tag + ": known-input column out of range");
        if (static_cast<int>(cols.size()) >= m)
            throw ValidationError(tag + ": every input is known; nothing to observe");
    }
    if (u_bar_max <= 0.0) throw ValidationError("u_bar_max must be positive");
    if (alpha <= 0.0) throw ValidationError("good-region margin must be positive");
    if (x0.size() != 0 && x0.size() != n)
        throw ValidationError("x0 must have n entries when given");
    sim.validate();
}

std::vector<NodeSpec> SystemDescription::node_specs() const {
    std::vector<NodeSpec> specs;
    specs.reserve(nodes.size());
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        NodeSpec spec;
        spec.index = i;
        spec.C = nodes[i].C;
        spec.known_cols = nodes[i].known_cols;
        std::sort(spec.known_cols.begin(), spec.known_cols.end());
        for (int c = 0; c < m; ++c)
            if (!std::binary_search(spec.known_cols.begin(), spec.known_cols.end(), c))
                spec.unknown_cols.push_back(c);
        spec.B_known = Mat(n, spec.known_cols.size());
        for (std::size_t k = 0; k < spec.known_cols.size(); ++k)
            spec.B_known.col(k) = B.col(spec.known_cols[k]);
        spec.B_unknown = Mat(n, spec.unknown_cols.size());
        for (std::size_t k = 0; k < spec.unknown_cols.size(); ++k)
            spec.B_unknown.col(k) = B.col(spec.unknown_cols[k]);
        specs.push_back(std::move(spec));
    }
    return specs;
}

Graph SystemDescription::graph() const { return Graph(adjacency); }

bool operator==(const SystemDescription& a, const SystemDescription& b) {
    if (a.n != b.n || a.m != b.m || a.u_bar_max != b.u_bar_max || a.alpha != b.alpha)
        return false;
    if (a.A != b.A || a.B != b.B || a.adjacency != b.adjacency) return false;
    if (a.x0.size() != b.x0.size() || a.x0 != b.x0) return false;
    if (a.sim.dt != b.sim.dt || a.sim.t_end != b.sim.t_end ||
        a.sim.integrator != b.sim.integrator ||
        a.sim.boundary_layer != b.sim.boundary_layer ||
        a.sim.record_stride != b.sim.record_stride)
        return false;
    if (a.nodes.size() != b.nodes.size()) return false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i)
        if (a.nodes[i].C != b.nodes[i].C || a.nodes[i].known_cols != b.nodes[i].known_cols)
            return false;
    return true;
}

SystemDescription parse_system(const std::string& text) {
    TokenReader in(text);
    in.expect("duio-system");
    const int version = in.integer("format version");
    if (version != 1)
        throw ValidationError("unsupported description version " + std::to_string(version));

    SystemDescription d;
    in.expect("n");
    d.n = in.integer("n");
    in.expect("m");
    d.m = in.integer("m");
    if (d.n <= 0 || d.m <= 0) throw ValidationError("n and m must be positive");
    in.expect("u_bar_max");
    d.u_bar_max = in.number("u_bar_max");
    in.expect("alpha");
    d.alpha = in.number("alpha");
    in.expect("A");
    d.A = in.matrix(d.n, d.n, "A");
    in.expect("B");
    d.B = in.matrix(d.n, d.m, "B");
    in.expect("graph");
    const int N = in.integer("graph node count");
    if (N <= 0) throw ValidationError("graph node count must be positive");
    d.adjacency = in.matrix(N, N, "graph adjacency");
    in.expect("nodes");
    const int n_nodes = in.integer("node count");
    if (n_nodes != N)
        throw ValidationError("node count must match the graph node count");
    for (int i = 0; i < n_nodes; ++i) {
        in.expect("node");
        const int idx = in.integer("node index");
        if (idx != i + 1)
            throw ValidationError("node blocks must appear in order 1.." +
                                  std::to_string(n_nodes));
        NodeBlock nb;
        in.expect("p");
        const int p = in.integer("output row count");
        if (p <= 0) throw ValidationError("output row count must be positive");
        in.expect("C");
        nb.C = in.matrix(p, d.n, "C");
        in.expect("known");
        const int k = in.integer("known-input count");
        if (k < 0) throw ValidationError("known-input count must be nonnegative");
        for (int j = 0; j < k; ++j)
            nb.known_cols.push_back(in.integer("known-input column"));
        d.nodes.push_back(std::move(nb));
    }
    in.expect("x0");
    const int x0_size = in.integer("x0 entry count");
    if (x0_size != 0 && x0_size != d.n)
        throw ValidationError("x0 must be empty or have n entries");
    d.x0 = Vec(x0_size);
    for (int j = 0; j < x0_size; ++j) d.x0(j) = in.number("x0");
    in.expect("sim");
    in.expect("dt");
    d.sim.dt = in.number("dt");
    in.expect("t_end");
    d.sim.t_end = in.number("t_end");
    in.expect("integrator");
    const std::string integ = in.word("integrator");
    if (integ == "euler")
        d.sim.integrator = SimConfig::Integrator::Euler;
    else if (integ == "rk4")
        d.sim.integrator = SimConfig::Integrator::Rk4;
    else
        throw ValidationError("integrator must be euler or rk4, found '" + integ + "'");
    in.expect("boundary_layer");
    d.sim.boundary_layer = in.number("boundary_layer");
    in.expect("record_stride");
    d.sim.record_stride = in.integer("record_stride");
    if (!in.done()) throw ValidationError("unexpected trailing content in description");

    d.validate();
    return d;
}

SystemDescription load_system(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw ValidationError("cannot open description file: " + path);
    std::ostringstream buf;
    buf << file.rdbuf();
    return parse_system(buf.str());
}

std::string serialize_system(const SystemDescription& desc) {
    std::ostringstream out;
    out.precision(std::numeric_limits<double>::max_digits10);
    out << "duio-system 1\n";
    out << "n " << desc.n << "\n";
    out << "m " << desc.m << "\n";
    out << "u_bar_max " << desc.u_bar_max << "\n";
    out << "alpha " << desc.alpha << "\n";
    out << "A\n";
    write_matrix(out, desc.A);
    out << "B\n";
    write_matrix(out, desc.B);
    out << "graph " << desc.adjacency.rows() << "\n";
    write_matrix(out, desc.adjacency);
    out << "nodes " << desc.nodes.size() << "\n";
    for (std::size_t i = 0; i < desc.nodes.size(); ++i) {
        out << "node " << i + 1 << "\n";
        out << "p " << desc.nodes[i].C.rows() << "\n";
        out << "C\n";
        write_matrix(out, desc.nodes[i].C);
        out << "known " << desc.nodes[i].known_cols.size();
        for (int c : desc.nodes[i].known_cols) out << " " << c;
        out << "\n";
    }
    out << "x0 " << desc.x0.size();
    for (Eigen::Index j = 0; j < desc.x0.size(); ++j) out << " " << desc.x0(j);
    out << "\n";
    out << "sim dt " << desc.sim.dt << " t_end " << desc.sim.t_end << " integrator "
        << (desc.sim.integrator == SimConfig::Integrator::Euler ? "euler" : "rk4")
        << " boundary_layer " << desc.sim.boundary_layer << " record_stride "
        << desc.sim.record_stride << "\n";
    return out.str();
}

SystemDescription platoon_description(const std::string& graph_kind) {
    const PlatoonParams params;
    const PlatoonSystem sys = build_platoon(params, graph_kind);
    SystemDescription d;
    d.n = static_cast<int>(sys.A.rows());
    d.m = static_cast<int>(sys.B.cols());
    d.A = sys.A;
    d.B = sys.B;
    for (const auto& spec : sys.nodes) d.nodes.push_back({spec.C, spec.known_cols});
    d.adjacency = sys.graph.adjacency();
    d.u_bar_max = kLeaderInputBound;
    d.alpha = GoodRegion{}.alpha;
    d.x0 = params.x0;
    return d;
}

}  // namespace duio
