#include "hypsub/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

namespace hypsub {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || (*end != '\0' && *end != '\r'))
        throw Error(ErrorKind::config, "not a number '" + s + "' in " + where);
    return x;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <typename Pos>
Mesh grid_mesh(const Grid2& g, const SliceSpec& spec, int N, Pos&& pos, const std::function<bool(int, int)>& regular) {
    for (int a : spec.axes)
        if (a < 0 || a >= N) throw Error(ErrorKind::config, "projection axis outside the ambient dimension");
    Mesh m;
    m.vertices.resize(static_cast<Eigen::Index>(g.Nu) * g.Nv, 3);
    std::vector<char> ok(static_cast<size_t>(g.Nu) * g.Nv);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const int id = i * g.Nv + j;
            const Eigen::VectorXd p = pos(i, j);
            for (int k = 0; k < 3; ++k) m.vertices(id, k) = p(spec.axes[static_cast<size_t>(k)]);
            ok[static_cast<size_t>(id)] = regular(i, j);
            if (!ok[static_cast<size_t>(id)]) ++m.masked_vertices;
        }
    for (int i = 0; i + 1 < g.Nu; ++i)
        for (int j = 0; j + 1 < g.Nv; ++j) {
            const int a = i * g.Nv + j, b = (i + 1) * g.Nv + j, c = (i + 1) * g.Nv + j + 1, d = i * g.Nv + j + 1;
            const auto keep = [&](int x, int y, int z) {
                return ok[static_cast<size_t>(x)] && ok[static_cast<size_t>(y)] && ok[static_cast<size_t>(z)];
            };
            if (keep(a, b, c)) m.faces.push_back({a, b, c});
            if (keep(a, c, d)) m.faces.push_back({a, c, d});
        }
    char buf[160];
    std::snprintf(buf, sizeof buf, "grid %d x %d on [%.6g,%.6g] x [%.6g,%.6g]", g.Nu, g.Nv, g.u0, g.u_end(), g.v0,
                  g.v_end());
    m.comments.push_back(buf);
    std::string t = "slice t =";
    for (int k = 0; k < spec.t.size(); ++k) t += " " + fmt17(spec.t(k));
    if (spec.t.size() == 0) t += " 0";
    m.comments.push_back(t);
    std::snprintf(buf, sizeof buf, "projection axes %d %d %d; masked vertices %d", spec.axes[0], spec.axes[1],
                  spec.axes[2], m.masked_vertices);
    m.comments.push_back(buf);
    return m;
}

Eigen::VectorXd slice_t(const SliceSpec& spec, int m) {
    if (spec.t.size() == 0) return Eigen::VectorXd::Zero(m);
    if (spec.t.size() != m) throw Error(ErrorKind::config, "slice t has the wrong dimension");
    return spec.t;
}

}  // namespace

int FieldTable::column(const std::string& name) const {
    for (size_t k = 0; k < columns.size(); ++k)
        if (columns[k] == name) return static_cast<int>(k);
    return -1;
}

FieldTable field_table(const Grid2& g, const std::vector<std::pair<std::string, const ScalarField2*>>& fields) {
    FieldTable t;
    t.columns = {"u", "v"};
    for (const auto& f : fields) {
        if (f.second->grid != g) throw Error(ErrorKind::size, "field '" + f.first + "' lives on a different grid");
        t.columns.push_back(f.first);
    }
    t.rows.resize(static_cast<Eigen::Index>(g.Nu) * g.Nv, static_cast<Eigen::Index>(t.columns.size()));
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const Eigen::Index r = static_cast<Eigen::Index>(i) * g.Nv + j;
            t.rows(r, 0) = g.u(i);
            t.rows(r, 1) = g.v(j);
            for (size_t k = 0; k < fields.size(); ++k) t.rows(r, static_cast<Eigen::Index>(k) + 2) = (*fields[k].second)(i, j);
        }
    return t;
}

void write_csv(const std::string& path, const FieldTable& t) {
    std::ostringstream out;
    for (size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << t.columns[k];
    out << '\n';
    for (Eigen::Index r = 0; r < t.rows.rows(); ++r) {
        for (Eigen::Index k = 0; k < t.rows.cols(); ++k) out << (k ? "," : "") << fmt17(t.rows(r, k));
        out << '\n';
    }
    write_text(path, out.str());
}

FieldTable read_csv(const std::string& path) {
    std::istringstream in(read_text(path));
    std::string line;
    FieldTable t;
    if (!std::getline(in, line)) throw Error(ErrorKind::config, "empty CSV file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    t.columns = split(line, ',');
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split(line, ',');
        if (cells.size() != t.columns.size())
            throw Error(ErrorKind::config, "row " + std::to_string(rows.size() + 1) + " of " + path + " has " +
                                               std::to_string(cells.size()) + " cells");
        std::vector<double> row;
        for (const std::string& c : cells) row.push_back(parse_double(c, path));
        rows.push_back(std::move(row));
    }
    t.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.columns.size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t k = 0; k < rows[r].size(); ++k)
            t.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k];
    return t;
}

Mesh slice_mesh(const ImmersionChart& c, const SliceSpec& spec) {
    const Eigen::VectorXd t = slice_t(spec, c.n() - 2);
    const auto pos = [&](int i, int j) {
        Eigen::VectorXd p = c.Z.at(i, j);
        for (int k = 0; k < t.size(); ++k) p += t(k) * c.rulings[static_cast<size_t>(k)].at(i, j);
        return p;
    };
    const auto regular = [&](int i, int j) {
        Eigen::MatrixXd J = coordinate_frame(c, i, j);
        for (int k = 0; k < t.size(); ++k) {
            J.col(0) += t(k) * c.rulings_u[static_cast<size_t>(k)].at(i, j);
            J.col(1) += t(k) * c.rulings_v[static_cast<size_t>(k)].at(i, j);
        }
        return relative_gram_det(J) > 1e-10;
    };
    return grid_mesh(c.grid(), spec, c.ambient_dim(), pos, regular);
}

Mesh slice_mesh(const ReconstructedChart& c, const SliceSpec& spec) {
    const Eigen::VectorXd t = slice_t(spec, c.n - 2);
    const auto pos = [&](int i, int j) {
        Eigen::VectorXd p = c.Z.at(i, j);
        for (int k = 0; k < t.size(); ++k) p += t(k) * c.ruling(k).at(i, j);
        return p;
    };
    // Regularity is judged on the cross-section; ruling derivatives are not stored.
    const auto regular = [&](int i, int j) {
        Eigen::MatrixXd J(c.ambient_dim(), c.n);
        J.col(0) = c.Z_u.at(i, j);
        J.col(1) = c.Z_v.at(i, j);
        for (int k = 0; k < c.n - 2; ++k) J.col(2 + k) = c.ruling(k).at(i, j);
        return relative_gram_det(J) > 1e-10;
    };
    return grid_mesh(c.grid, spec, c.ambient_dim(), pos, regular);
}

void write_obj(const std::string& path, const Mesh& m) {
    std::ostringstream out;
    for (const std::string& c : m.comments) out << "# " << c << '\n';
    for (Eigen::Index r = 0; r < m.vertices.rows(); ++r)
        out << "v " << fmt17(m.vertices(r, 0)) << ' ' << fmt17(m.vertices(r, 1)) << ' ' << fmt17(m.vertices(r, 2))
            << '\n';
    for (const auto& f : m.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    write_text(path, out.str());
}

Mesh read_obj(const std::string& path) {
    std::istringstream in(read_text(path));
    std::string line;
    Mesh m;
    std::vector<Eigen::Vector3d> verts;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("# ", 0) == 0) {
            m.comments.push_back(line.substr(2));
            continue;
        }
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            std::string a, b, c;
            ls >> a >> b >> c;
            verts.emplace_back(parse_double(a, path), parse_double(b, path), parse_double(c, path));
        } else if (tag == "f") {
            std::array<int, 3> f{};
            for (int& k : f) {
                std::string tok;
                ls >> tok;
                k = std::atoi(split(tok, '/').front().c_str()) - 1;  // v, v/vt or v//vn
                if (k < 0) throw Error(ErrorKind::config, "bad face index in " + path);
            }
            m.faces.push_back(f);
        }
    }
    m.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
    for (size_t r = 0; r < verts.size(); ++r) m.vertices.row(static_cast<Eigen::Index>(r)) = verts[r].transpose();
    for (const auto& f : m.faces)
        for (int k : f)
            if (k >= static_cast<int>(verts.size())) throw Error(ErrorKind::config, "face index out of range in " + path);
    return m;
}

Curve curve_from_samples(const Eigen::VectorXd& x, const Eigen::MatrixXd& P) {
    const Eigen::Index n = x.size();
    if (n < 4 || P.rows() != n) throw Error(ErrorKind::size, "curve samples need at least 4 rows");
    const double h = (x(n - 1) - x(0)) / static_cast<double>(n - 1);
    for (Eigen::Index k = 1; k < n; ++k)
        if (!(std::abs(x(k) - x(k - 1) - h) <= 1e-9 * std::max(1.0, std::abs(h))))
            throw Error(ErrorKind::config, "curve samples must be uniformly spaced in the parameter");
    auto splines = std::make_shared<std::vector<Spline1D>>();
    for (Eigen::Index c = 0; c < P.cols(); ++c) splines->emplace_back(x(0), h, P.col(c));
    Curve cv;
    cv.d1 = [splines](double s) {
        Eigen::VectorXd d(static_cast<Eigen::Index>(splines->size()));
        for (size_t c = 0; c < splines->size(); ++c) d(static_cast<Eigen::Index>(c)) = (*splines)[c].derivative(s);
        return d;
    };
    cv.d2 = [splines](double s) {
        Eigen::VectorXd d(static_cast<Eigen::Index>(splines->size()));
        for (size_t c = 0; c < splines->size(); ++c)
            d(static_cast<Eigen::Index>(c)) = (*splines)[c].second_derivative(s);
        return d;
    };
    cv.origin.resize(P.cols());
    for (Eigen::Index c = 0; c < P.cols(); ++c) cv.origin(c) = (*splines)[static_cast<size_t>(c)](0.0);
    return cv;
}

Curve read_curve_csv(const std::string& path) {
    const FieldTable t = read_csv(path);
    if (t.rows.cols() < 3) throw Error(ErrorKind::config, path + ": need a parameter column and coordinates");
    return curve_from_samples(t.rows.col(0), t.rows.rightCols(t.rows.cols() - 1));
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::config, "cannot open " + path + " for writing");
    out << content;
    if (!out) throw Error(ErrorKind::config, "write failed for " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::config, "cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t x) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

}  // namespace hypsub
