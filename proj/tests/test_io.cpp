#include "hypsub/io.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace hypsub;
using hypsub::testing::lab;

namespace {

std::string tmp(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "hypsub_test_io";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST_CASE("field CSV round-trips bit-exactly") {
    const hypsub::testing::Lab& L = lab("wave", 33);
    const FieldTable t = field_table(L.g, {{"theta", &L.S.theta},
                                           {"s", &L.P->s},
                                           {"Lambda_u", &L.S.lambda_u},
                                           {"Lambda_v", &L.S.lambda_v}});
    CHECK(t.columns.front() == "u");
    CHECK(t.rows.rows() == 33 * 33);
    write_csv(tmp("fields.csv"), t);
    const FieldTable back = read_csv(tmp("fields.csv"));
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    CHECK(back.column("Lambda_v") == 5);
    CHECK(back.column("nope") == -1);
}

TEST_CASE("malformed CSV is a config error") {
    write_text(tmp("bad.csv"), "u,v\n1,abc\n");
    try {
        read_csv(tmp("bad.csv"));
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
    }
}

TEST_CASE("OBJ slices round-trip and carry a provenance header") {
    const ImmersionChart& c = lab("intersection", 17).chart;
    const Mesh m = slice_mesh(c, {});
    CHECK(m.vertices.rows() == 17 * 17);
    CHECK(m.faces.size() == 2 * 16 * 16);
    CHECK(m.masked_vertices == 0);
    CHECK_FALSE(m.comments.empty());
    write_obj(tmp("slice.obj"), m);
    const Mesh back = read_obj(tmp("slice.obj"));
    CHECK(back.vertices == m.vertices);
    CHECK(back.faces == m.faces);
    CHECK(back.comments == m.comments);
    const std::string text = read_text(tmp("slice.obj"));
    CHECK(text.rfind("# ", 0) == 0);
    CHECK(text.find("\nf 1 18 19\n") != std::string::npos);  // one-based indices
}

TEST_CASE("two slices differ by the ruling direction times t") {
    const ImmersionChart& c = lab("intersection", 17).chart;
    SliceSpec s0, s1;
    s1.t = Eigen::VectorXd::Constant(1, 0.05);
    s0.axes = s1.axes = {0, 3, 4};
    const Mesh a = slice_mesh(c, s0), b = slice_mesh(c, s1);
    double worst = 0;
    for (int i = 0; i < 17; ++i)
        for (int j = 0; j < 17; ++j) {
            const Eigen::VectorXd r = c.rulings[0].at(i, j);
            const Eigen::Vector3d expect(0.05 * r(0), 0.05 * r(3), 0.05 * r(4));
            worst = std::max(worst, (b.vertices.row(i * 17 + j).transpose() - a.vertices.row(i * 17 + j).transpose() -
                                     expect)
                                        .norm());
        }
    CHECK(worst < 1e-14);
}

TEST_CASE("sampled curves rebuild a helix") {
    const int n = 129;
    Eigen::VectorXd x(n);
    Eigen::MatrixXd P(n, 3);
    for (int k = 0; k < n; ++k) {
        x(k) = -0.5 + k / (n - 1.0);
        P.row(k) << std::cos(x(k)), std::sin(x(k)), 0.3 * x(k);
    }
    const Curve c = curve_from_samples(x, P);
    CHECK(c.dim() == 3);
    CHECK((c.d1(0.2) - Eigen::Vector3d(-std::sin(0.2), std::cos(0.2), 0.3)).norm() < 1e-6);
    CHECK((c.position(0.3) - Eigen::Vector3d(std::cos(0.3), std::sin(0.3), 0.09)).norm() < 1e-7);
    x(5) += 1e-3;
    CHECK_THROWS_AS(curve_from_samples(x, P), Error);
}

TEST_CASE("FNV-1a reference values") {
    CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
    CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
}
