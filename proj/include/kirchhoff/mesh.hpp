#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

/// Uniform Dirichlet grid on an interval (n=1) or axis-aligned rectangle (n=2).
/// Only interior nodes are stored; the boundary value is identically zero.
/// Immutable value object: safe to copy and share between threads.
class Mesh {
public:
    static Mesh interval(double extent, int interior_nodes) {
        return Mesh(1, {extent, 0.0}, {interior_nodes, 1});
    }

    static Mesh rectangle(double extent_x, double extent_y, int nodes_x, int nodes_y) {
        return Mesh(2, {extent_x, extent_y}, {nodes_x, nodes_y});
    }

    int dimension() const { return dimension_; }
    double extent(int axis) const { return extent_[static_cast<std::size_t>(axis)]; }
    int interior_nodes(int axis) const { return nodes_[static_cast<std::size_t>(axis)]; }

    // spacing == extent / (count + 1) exactly, by construction
    double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }

    std::size_t node_count() const {
        std::size_t n = static_cast<std::size_t>(nodes_[0]);
        if (dimension_ == 2) n *= static_cast<std::size_t>(nodes_[1]);
        return n;
    }

    // Quadrature weight of one node (midpoint rule cell).
    double cell_measure() const {
        return dimension_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1];
    }

    // Interior node coordinate along `axis` for 0-based index i (node i sits at (i+1)h).
    double coordinate(int axis, int i) const {
        return spacing_[static_cast<std::size_t>(axis)] * static_cast<double>(i + 1);
    }

    // Row-major flattening for 2D: x index varies fastest.
    std::size_t flat_index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nodes_[0]) +
               static_cast<std::size_t>(ix);
    }

    bool operator==(const Mesh& o) const {
        return dimension_ == o.dimension_ && extent_ == o.extent_ && nodes_ == o.nodes_;
    }
    bool operator!=(const Mesh& o) const { return !(*this == o); }

private:
    Mesh(int dim, std::array<double, 2> extent, std::array<int, 2> nodes)
        : dimension_(dim), extent_(extent), nodes_(nodes) {
        if (dim != 1 && dim != 2) throw StructuralError("mesh dimension must be 1 or 2");
        for (int ax = 0; ax < dim; ++ax) {
            const auto a = static_cast<std::size_t>(ax);
            if (!(extent_[a] > 0.0)) throw StructuralError("mesh extent must be positive");
            if (nodes_[a] < 1) throw StructuralError("mesh needs at least one interior node per axis");
            spacing_[a] = extent_[a] / static_cast<double>(nodes_[a] + 1);
        }
        if (dim == 1) {
            nodes_[1] = 1;
            extent_[1] = 0.0;
            spacing_[1] = 1.0;
        }
    }

    int dimension_;
    std::array<double, 2> extent_;
    std::array<int, 2> nodes_;
    std::array<double, 2> spacing_{0.0, 0.0};
};

/// Nodal values of a discrete H^1_0 representative: interior values only,
/// boundary implicitly zero.
struct Field {
    Mesh mesh;
    std::vector<double> values;

    Field(const Mesh& m, std::vector<double> v) : mesh(m), values(std::move(v)) {
        if (values.size() != mesh.node_count())
            throw StructuralError("field value count does not match mesh node count");
    }

    static Field zero(const Mesh& m) { return Field(m, std::vector<double>(m.node_count(), 0.0)); }

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

inline void require_same_mesh(const Field& u, const Field& v, const char* where) {
    if (u.mesh != v.mesh) throw StructuralError(std::string(where) + ": fields live on different meshes");
}

inline Field& operator+=(Field& u, const Field& v) {
    require_same_mesh(u, v, "operator+=");
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += v[i];
    return u;
}

inline Field& operator-=(Field& u, const Field& v) {
    require_same_mesh(u, v, "operator-=");
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= v[i];
    return u;
}

inline Field& operator*=(Field& u, double c) {
    for (double& x : u.values) x *= c;
    return u;
}

inline Field operator+(Field u, const Field& v) { return u += v; }
inline Field operator-(Field u, const Field& v) { return u -= v; }
inline Field operator*(double c, Field u) { return u *= c; }

// u + c*v in one pass
inline Field axpy(const Field& u, double c, const Field& v) {
    require_same_mesh(u, v, "axpy");
    Field w = u;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += c * v[i];
    return w;
}

} // namespace kirchhoff
