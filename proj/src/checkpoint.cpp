#include "gmcf/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gmcf {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& body) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ConfigError("cannot write checkpoint: " + path);
        out << body;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw ConfigError("cannot finalize checkpoint: " + path);
}

}  // namespace

void save_checkpoint(const std::string& path, const FlowState& state) {
    const GridMap& map = state.map;
    std::ostringstream out;
    out << "gmcf-checkpoint 1\n";
    out << "kind torus\n";
    out << "n " << map.spec.n << "\nm " << map.spec.m << "\n";
    out << "k1 " << fmt(map.spec.k1) << "\nk2 " << fmt(map.spec.k2) << "\n";
    out << "t " << fmt(state.t) << "\n";
    out << "shape";
    for (int s : map.shape) out << ' ' << s;
    out << "\nwinding";
    for (int w : map.winding) out << ' ' << w;
    out << "\nvalues " << map.values.size() << "\n";
    const int m = map.spec.m;
    for (long p = 0; p < map.points(); ++p) {
        for (int c = 0; c < m; ++c) {
            if (c) out << ' ';
            out << fmt(map.values[p * m + c]);
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

void save_checkpoint(const std::string& path, const ProfileState& state) {
    std::ostringstream out;
    out << "gmcf-checkpoint 1\n";
    out << "kind sphere_equivariant\n";
    out << "n " << state.n << "\n";
    out << "boundary_kind " << to_string(state.boundary) << "\n";
    out << "t " << fmt(state.t) << "\n";
    out << "shape " << state.num_nodes << "\n";
    out << "values " << state.num_nodes << "\n";
    for (double v : state.psi) out << fmt(v) << '\n';
    atomic_write(path, out.str());
}

CheckpointKind checkpoint_kind(const std::string& path) {
    std::ifstream in(path);
    if (!in) return CheckpointKind::unknown;
    std::string magic;
    in >> magic;
    if (magic == "gmcf-cloud") return CheckpointKind::cloud;
    if (magic != "gmcf-checkpoint") return CheckpointKind::unknown;
    int version;
    std::string key, kind;
    in >> version >> key >> kind;
    if (kind == "torus") return CheckpointKind::torus;
    if (kind == "sphere_equivariant") return CheckpointKind::sphere_equivariant;
    return CheckpointKind::unknown;
}

namespace {

void expect_key(std::istream& in, const std::string& want, const std::string& path) {
    std::string key;
    in >> key;
    if (key != want) throw ConfigError("checkpoint " + path + ": expected '" + want + "'");
}

}  // namespace

FlowState load_torus_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read checkpoint: " + path);
    std::string magic, key, kind;
    int version;
    in >> magic >> version >> key >> kind;
    if (magic != "gmcf-checkpoint" || kind != "torus")
        throw ConfigError("not a torus checkpoint: " + path);

    FlowState st;
    GridMap& map = st.map;
    map.spec.chart_kind = ChartKind::flat_torus;
    expect_key(in, "n", path);
    in >> map.spec.n;
    expect_key(in, "m", path);
    in >> map.spec.m;
    expect_key(in, "k1", path);
    in >> map.spec.k1;
    expect_key(in, "k2", path);
    in >> map.spec.k2;
    expect_key(in, "t", path);
    in >> st.t;
    expect_key(in, "shape", path);
    map.shape.resize(map.spec.n);
    for (int& s : map.shape) in >> s;
    expect_key(in, "winding", path);
    map.winding.resize(map.spec.n * map.spec.m);
    for (int& w : map.winding) in >> w;
    expect_key(in, "values", path);
    std::size_t count;
    in >> count;
    map.values.resize(count);
    for (double& v : map.values) in >> v;
    if (!in) throw ConfigError("truncated checkpoint: " + path);
    return st;
}

ProfileState load_sphere_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read checkpoint: " + path);
    std::string magic, key, kind, boundary;
    int version;
    in >> magic >> version >> key >> kind;
    if (magic != "gmcf-checkpoint" || kind != "sphere_equivariant")
        throw ConfigError("not a sphere checkpoint: " + path);

    ProfileState st;
    expect_key(in, "n", path);
    in >> st.n;
    expect_key(in, "boundary_kind", path);
    in >> boundary;
    st.boundary = boundary == "degree_one" ? BoundaryKind::degree_one
                                           : BoundaryKind::null_homotopic;
    expect_key(in, "t", path);
    in >> st.t;
    expect_key(in, "shape", path);
    in >> st.num_nodes;
    expect_key(in, "values", path);
    std::size_t count;
    in >> count;
    st.psi.resize(count);
    for (double& v : st.psi) in >> v;
    if (!in) throw ConfigError("truncated checkpoint: " + path);
    return st;
}

}  // namespace gmcf
