#pragma once

#include "hypsub/curves.hpp"
#include "hypsub/immersion.hpp"
#include "hypsub/reconstruct.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hypsub {

// Column-major table of doubles with named columns. Values are written with
// %.17g, which strtod reads back bit-exactly.
struct FieldTable {
    std::vector<std::string> columns;
    Eigen::MatrixXd rows;

    int column(const std::string& name) const;  // -1 when absent
};

// One row per grid node in (i, j) order with leading u, v columns.
FieldTable field_table(const Grid2& g, const std::vector<std::pair<std::string, const ScalarField2*>>& fields);

void write_csv(const std::string& path, const FieldTable& t);
FieldTable read_csv(const std::string& path);

// Triangle mesh in grid order. Vertices of non-regular nodes are kept so that
// indices stay in grid order; faces touching them are dropped.
struct Mesh {
    Eigen::MatrixXd vertices;  // rows
    std::vector<std::array<int, 3>> faces;  // zero-based
    std::vector<std::string> comments;
    int masked_vertices = 0;
};

// Fixed ruling parameter t and the three ambient coordinates kept in the projection.
struct SliceSpec {
    Eigen::VectorXd t;  // empty means t = 0
    std::array<int, 3> axes{0, 1, 2};
};

Mesh slice_mesh(const ImmersionChart& chart, const SliceSpec& spec);
Mesh slice_mesh(const ReconstructedChart& chart, const SliceSpec& spec);

void write_obj(const std::string& path, const Mesh& m);
Mesh read_obj(const std::string& path);

// A curve sampled at uniform parameters: columns are the parameter and the
// ambient coordinates of the position. Derivatives come from cubic splines.
Curve curve_from_samples(const Eigen::VectorXd& x, const Eigen::MatrixXd& positions);
Curve read_curve_csv(const std::string& path);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t x);

}  // namespace hypsub
