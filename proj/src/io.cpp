#include "kirchhoff/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

std::string format_float(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StructuralError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw StructuralError("short write to '" + path + "'");
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ostringstream out;
    out << "t,L2sq,H1sq,Lq1,J,I,H,D\n";
    for (std::size_t k = 0; k < traj.rows(); ++k) {
        out << format_float(traj.times[k]) << ',' << format_float(traj.l2sq[k]) << ','
            << format_float(traj.h1sq[k]) << ',' << format_float(traj.lq1[k]) << ','
            << format_float(traj.energy[k]) << ',' << format_float(traj.nehari[k]) << ','
            << format_float(traj.aux[k]) << ',' << format_float(traj.dissipation[k]) << '\n';
    }
    write_text_file(path, out.str());
}

void write_field_csv(const std::string& path, const Field& u) {
    const Mesh& m = u.mesh;
    std::ostringstream out;
    if (m.dimension() == 1) {
        out << "x,u\n";
        for (int i = 0; i < m.interior_nodes(0); ++i)
            out << format_float(m.coordinate(0, i)) << ','
                << format_float(u[static_cast<std::size_t>(i)]) << '\n';
    } else {
        out << "x,y,u\n";
        for (int iy = 0; iy < m.interior_nodes(1); ++iy)
            for (int ix = 0; ix < m.interior_nodes(0); ++ix)
                out << format_float(m.coordinate(0, ix)) << ',' << format_float(m.coordinate(1, iy))
                    << ',' << format_float(u[m.flat_index(ix, iy)]) << '\n';
    }
    write_text_file(path, out.str());
}

Field read_field_csv(const std::string& path, const Mesh& m) {
    std::ifstream in(path);
    if (!in) throw StructuralError("cannot open field file '" + path + "'");
    std::vector<double> values;
    values.reserve(m.node_count());
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) { // header
            first = false;
            continue;
        }
        if (line.empty()) continue;
        const std::size_t comma = line.rfind(',');
        const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
        try {
            values.push_back(std::stod(cell));
        } catch (...) {
            throw StructuralError("bad value '" + cell + "' in field file '" + path + "'");
        }
    }
    if (values.size() != m.node_count()) {
        std::ostringstream msg;
        msg << "field file '" << path << "' has " << values.size() << " values but the mesh has "
            << m.node_count() << " nodes";
        throw StructuralError(msg.str());
    }
    return Field(m, std::move(values));
}

} // namespace kirchhoff
