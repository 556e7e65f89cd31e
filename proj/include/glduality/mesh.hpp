#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace glduality {

// Rectangular grid of interior nodes with homogeneous Dirichlet boundary.
// Node ordering is lexicographic with x fastest. Quadrature is a uniform
// measure-preserving rule: every interior node carries weight |Omega|/n^dim,
// so constants integrate exactly and the weighted inner product keeps the
// difference operators self-adjoint.
struct Mesh {
    int dim = 1;        // 1 or 2
    int n = 1;          // interior nodes per dimension
    double length = 1;  // edge length of the domain per dimension
    double h = 0.5;     // stencil spacing, length/(n+1)
    double weight = 1;  // quadrature weight per interior node

    int size() const { return dim == 1 ? n : n * n; }
    double measure() const { return dim == 1 ? length : length * length; }
    // physical coordinate of grid line k (k = 0..n-1 interior)
    double coord(int k) const { return (k + 1) * h; }

    friend bool operator==(const Mesh& a, const Mesh& b) {
        return a.dim == b.dim && a.n == b.n && a.length == b.length;
    }
};

inline Mesh build_mesh(int dim, int n, double length) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("build_mesh: dim must be 1 or 2");
    if (n < 1) throw std::invalid_argument("build_mesh: need at least one interior node");
    if (!(length > 0.0)) throw std::invalid_argument("build_mesh: length must be positive");
    Mesh m;
    m.dim = dim;
    m.n = n;
    m.length = length;
    m.h = length / (n + 1);
    const int total = (dim == 1 ? n : n * n);
    m.weight = m.measure() / total;
    return m;
}

// Nodal values of a function on the interior nodes of a mesh.
struct Field {
    Mesh mesh;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Mesh& m, double fill = 0.0) : mesh(m), v(m.size(), fill) {}
    Field(const Mesh& m, std::vector<double> values) : mesh(m), v(std::move(values)) {
        if (static_cast<int>(v.size()) != m.size())
            throw std::invalid_argument("Field: value count does not match mesh");
    }

    int size() const { return static_cast<int>(v.size()); }
    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }

    bool finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

inline void require_same_mesh(const Field& a, const Field& b, const char* where) {
    if (!(a.mesh == b.mesh)) throw std::invalid_argument(std::string(where) + ": mesh mismatch");
}

inline double inner(const Field& a, const Field& b) {
    require_same_mesh(a, b, "inner");
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return a.mesh.weight * s;
}

inline double integrate(const Field& a) {
    double s = 0.0;
    for (double x : a.v) s += x;
    return a.mesh.weight * s;
}

inline double norm_l2(const Field& a) { return std::sqrt(inner(a, a)); }

inline double norm_inf(const Field& a) {
    double m = 0.0;
    for (double x : a.v) m = std::max(m, std::abs(x));
    return m;
}

inline Field operator+(Field a, const Field& b) {
    require_same_mesh(a, b, "operator+");
    for (int i = 0; i < a.size(); ++i) a.v[i] += b[i];
    return a;
}

inline Field operator-(Field a, const Field& b) {
    require_same_mesh(a, b, "operator-");
    for (int i = 0; i < a.size(); ++i) a.v[i] -= b[i];
    return a;
}

inline Field operator*(double c, Field a) {
    for (double& x : a.v) x *= c;
    return a;
}

inline Field& axpy(Field& y, double c, const Field& x) {
    require_same_mesh(y, x, "axpy");
    for (int i = 0; i < y.size(); ++i) y.v[i] += c * x[i];
    return y;
}

// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// CSV persistence: header "x,u" in 1D or "x,y,u" in 2D, one row per interior
// node in lexicographic order, full round-trip precision.
inline void write_field_csv(std::ostream& os, const Field& f) {
    const Mesh& m = f.mesh;
    if (m.dim == 1) {
        os << "x,u\n";
        for (int i = 0; i < m.n; ++i)
            os << format_double(m.coord(i)) << ',' << format_double(f[i]) << '\n';
    } else {
        os << "x,y,u\n";
        for (int j = 0; j < m.n; ++j)
            for (int i = 0; i < m.n; ++i)
                os << format_double(m.coord(i)) << ',' << format_double(m.coord(j)) << ','
                   << format_double(f[j * m.n + i]) << '\n';
    }
}

inline void write_field_csv(const std::string& path, const Field& f) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_field_csv: cannot open " + path);
    write_field_csv(os, f);
}

inline Field read_field_csv(std::istream& is, const Mesh& mesh) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_field_csv: empty input");
    const std::string expect = mesh.dim == 1 ? "x,u" : "x,y,u";
    if (line != expect)
        throw std::runtime_error("read_field_csv: expected header '" + expect + "', got '" + line + "'");
    Field f(mesh);
    int row = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (row >= mesh.size()) throw std::runtime_error("read_field_csv: too many rows");
        std::istringstream ss(line);
        std::string tok;
        double last = 0.0;
        int cols = 0;
        while (std::getline(ss, tok, ',')) {
            last = std::stod(tok);
            ++cols;
        }
        if (cols != mesh.dim + 1) throw std::runtime_error("read_field_csv: bad column count");
        f[row++] = last;
    }
    if (row != mesh.size()) throw std::runtime_error("read_field_csv: row count does not match mesh");
    return f;
}

inline Field read_field_csv(const std::string& path, const Mesh& mesh) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_field_csv: cannot open " + path);
    return read_field_csv(is, mesh);
}

}  // namespace glduality
