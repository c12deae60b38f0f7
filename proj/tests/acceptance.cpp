// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "hypsub/hypersurface.hpp"
#include "hypsub/intersection_type.hpp"
#include "hypsub/invariants.hpp"
#include "hypsub/io.hpp"
#include "hypsub/moduli.hpp"
#include "hypsub/pipeline.hpp"
#include "hypsub/reconstruct.hpp"

#include "support.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

using namespace hypsub;
using hypsub::testing::Lab;
using hypsub::testing::lab;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
        char buf[256];
        va_list ap;
        va_start(ap, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        va_end(ap);
        if (!detail.empty()) detail += "; ";
        detail += buf;
        if (!ok) {
            detail += " [violated]";
            pass = false;
        }
    }
};

const Grid2 kGrid = Grid2::box(0, 1, 0, 1, 65, 65);

DeformationPair family(const Lab& L, const Primitives& P, double t) {
    return intersection_family(P, L.seed.curves.proj_speed1, L.seed.curves.proj_speed2, t);
}

// Non-member with oscillation numbers (12 + k, 15 - k).
DeformationPair non_member(const SurfaceData& S, int k) {
    const double w1 = 12 + k, w2 = 15 - k;
    return make_pair(
        S, [=](double u) { return 1 + 0.8 * std::sin(w1 * u + k); },
        [=](double v) { return 1 + 0.8 * std::cos(w2 * v - k); });
}

Verdict conjugacy() {
    Verdict v;
    for (const char* name : {"intersection", "separable", "three_term", "wave"}) {
        const SeedFamily seed = hypsub::testing::named_seed(name);
        const PolarSurface coarse = build_polar(seed, Grid2::box(0, 1, 0, 1, 33, 33), 5);
        const PolarSurface fine = build_polar(seed, kGrid, 5);
        const double scale = std::max(1.0, max_norm(fine.g));
        const double tol = 10 * kGrid.h2() * scale;
        // Sum-of-curves seeds are conjugate in exact arithmetic: the residual sits at
        // the roundoff floor on every grid and has no truncation error left to halve.
        const double floor = 1e-10 * scale;
        const bool at_floor = coarse.conjugacy_residual <= floor && fine.conjugacy_residual <= floor;
        const double ratio = coarse.conjugacy_residual / fine.conjugacy_residual;
        v.require(fine.conjugacy_residual <= tol, "%s %.2e <= %.2e", name, fine.conjugacy_residual, tol);
        if (at_floor)
            v.require(true, "%s at roundoff floor", name);
        else
            v.require(ratio >= 3.5, "%s halving ratio %.2f", name, ratio);
    }
    return v;
}

Verdict duality() {
    Verdict v;
    for (const char* name : {"intersection", "wave"}) {
        const DualityCheck d = duality_check(lab(name).chart, 120, 17);
        v.require(d.points - d.skipped >= 100 && d.max_defect <= 1e-3, "%s %d points, max defect %.2e rad", name,
                  d.points - d.skipped, d.max_defect);
    }
    return v;
}

Verdict gauss() {
    Verdict v;
    for (const char* name : {"intersection", "separable", "three_term", "wave"})
        v.require(lab(name).an.gauss_residual <= 1e-3, "%s %.2e", name, lab(name).an.gauss_residual);
    return v;
}

Verdict invariance() {
    Verdict v;
    const Lab& L = lab("intersection");
    const Primitives P = primitives(L.S);
    const std::array<double, 6> tol = invariant_tolerances(compute_invariants(L.S));
    double worst_member = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double t = -std::pow(10.0, -1.0 + 2.0 * k / 9);
        const std::array<double, 6> r = invariance_residual(L.S, build_taus(family(L, P, t), L.S).S_hat);
        for (int q = 0; q < 6; ++q) worst_member = std::max(worst_member, r[static_cast<size_t>(q)] / tol[static_cast<size_t>(q)]);
    }
    v.require(worst_member <= 1.0, "10 members: max residual/tol_inv %.2e", worst_member);
    double min_R = INFINITY, worst_other = 0.0;
    for (int k = 0; k < 10; ++k) {
        const std::array<double, 6> r = invariance_residual(L.S, build_taus(non_member(L.S, k), L.S).S_hat);
        min_R = std::min(min_R, r[5] / tol[5]);
        for (int q = 0; q < 5; ++q) worst_other = std::max(worst_other, r[static_cast<size_t>(q)] / tol[static_cast<size_t>(q)]);
    }
    v.require(min_R > 10, "10 non-members: min R residual/tol_inv %.1f", min_R);
    v.require(worst_other <= 1.0, "non-members: other five max residual/tol_inv %.2e", worst_other);
    return v;
}

Verdict moduli_family() {
    Verdict v;
    const Lab& L = lab("intersection");
    std::vector<double> ts = default_t_sweep();
    ts.push_back(0.5);
    ts.push_back(5.0);
    const IntersectionModuli im = intersection_moduli(L.S, *L.P, L.seed.curves.proj_speed1, L.seed.curves.proj_speed2, ts);
    int members = 0, honest = 0, sweep = 0, positive = 0, positive_bad = 0;
    for (const FamilyMember& m : im.members) {
        if (m.t > 0) {
            ++positive;
            positive_bad += m.admissible ? 0 : 1;
        } else if (!m.probe) {
            ++sweep;
            members += m.member ? 1 : 0;
            honest += m.genuineness == Genuineness::genuine_honest ? 1 : 0;
        }
    }
    v.require(sweep == 16 && members == 16, "%d/%d sweep values are members", members, sweep);
    v.require(honest == 16, "%d/16 genuine_honest", honest);
    v.require(positive_bad == positive && positive > 0, "%d/%d positive-t probes inadmissible", positive_bad, positive);
    for (const BoundaryDatum& b : im.boundary) {
        const ReconstructedChart r = reconstruct_from_data(L.chart, L.an, b.S_hat);
        const int rank = affine_rank(r);
        v.require(rank == L.chart.n() + 1, "boundary %s affine rank %d", b.label.c_str(), rank);
    }
    return v;
}

Verdict discriminant_law() {
    Verdict v;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    struct Case {
        const Lab* L;
        DeformationPair pair;
    };
    std::vector<Case> cases;
    {
        const Lab& L = lab("intersection");
        const Primitives P = primitives(L.S);
        for (int k = 0; k < 20; ++k) cases.push_back({&L, family(L, P, -std::pow(10.0, -1 + 2 * unit(rng)))});
    }
    for (const char* name : {"intersection", "separable", "three_term"}) {
        const Lab& L = lab(name);
        for (int k = 0; k < 4; ++k) {
            const double a = 0.1 + 1.2 * unit(rng), b = 0.4 * (unit(rng) - 0.5);
            const auto lin = [a, b](double x) { return a + b * x; };
            const auto zero = [](double) { return 0.0; };
            cases.push_back({&L, k % 2 ? make_pair(L.S, lin, zero) : make_pair(L.S, zero, lin)});
        }
    }
    {
        const Lab& L = lab("lambda_zero");
        AnglePreservingOptions opt;
        for (int k = 0; k < 9; ++k) opt.family_params.push_back(0.3 + 2.5 * unit(rng));
        const AnglePreservingReport ap = angle_preserving_scan(L.S, opt);
        for (const DeformationPair& p : ap.pairs) cases.push_back({&L, p});
        for (int k = 0; cases.size() < 50; ++k) {
            const double u0 = (k % 2 ? 1.0 : -0.4) * (0.1 + 0.5 * unit(rng));
            const double a = 0.05 + 0.3 * unit(rng), w = 1 + 4 * unit(rng);
            cases.push_back({&L, make_pair(
                                     L.S, [u0](double) { return u0; },
                                     [a, w](double x) { return 0.5 + a * std::sin(w * x); })});
        }
    }
    int members = 0, disc = 0, roots = 0, samples = 0, signs[3] = {0, 0, 0};
    for (const Case& c : cases) {
        if (!check_admissibility(c.pair, c.L->S).ok || !moduli_residual(c.pair, c.L->S).member) continue;
        ++members;
        const ClassificationReport r = classify(c.pair, c.L->S, *c.L->P);
        disc += r.disc_law_violations;
        roots += r.root_count_violations;
        samples += static_cast<int>(r.h_samples.size());
        if (r.uv_sign >= -1 && r.uv_sign <= 1) ++signs[r.uv_sign + 1];
    }
    v.require(members >= 50, "%d/%zu candidates are admissible members", members, cases.size());
    v.require(signs[0] > 0 && signs[1] > 0 && signs[2] > 0, "UV<0: %d, UV=0: %d, UV>0: %d", signs[0], signs[1],
              signs[2]);
    v.require(disc == 0, "%d sign(disc) != sign(-UV) over %d samples", disc, samples);
    v.require(roots == 0, "%d root-count mismatches", roots);
    return v;
}

Verdict hypersurface() {
    Verdict v;
    {
        const SurfaceData& S = lab("intersection").S;
        const HypersurfaceReport r = hypersurface_admission(S);
        v.require(r.verdict == HypersurfaceClass::discrete_class, "intersection seed: %s", to_string(r.verdict));
        double worst = INFINITY;
        if (r.admissible_mus.size() == 2) {
            worst = 0;
            for (int i = 0; i < S.grid().Nu; ++i)
                for (int j = 0; j < S.grid().Nv; ++j) {
                    const double s = std::pow(std::sin(S.theta(i, j)), 2);
                    worst = std::max(worst, std::abs(r.admissible_mus[0].mu(i, j) - (1 / s - 1)) / (1 / s - 1));
                    worst = std::max(worst, std::abs(r.admissible_mus[1].mu(i, j) - 1 / s) / (1 / s));
                }
        }
        v.require(worst <= 1e-3, "roots vs 1/s - 1, 1/s: %.2e relative", worst);
    }
    {
        const SurfaceData& S = lab("separable").S;
        const HypersurfaceReport r = hypersurface_admission(S);
        v.require(r.verdict == HypersurfaceClass::continuous_class, "separable seed: %s", to_string(r.verdict));
        const double tol_mod = r.hh_tol;  // 100 (du^2 + dv^2) times the coefficient scale
        const auto lambda_field = [&](const std::function<double(int)>& lam) {
            ScalarField2 mu(S.grid());
            for (int i = 0; i < S.grid().Nu; ++i)
                for (int j = 0; j < S.grid().Nv; ++j) mu(i, j) = lam(j) + 1 / std::pow(std::sin(S.theta(i, j)), 2);
            const auto [ru, rv] = hh_residual(r, mu);
            return std::max(ru, rv);
        };
        v.require(lambda_field([](int) { return 0.0; }) <= tol_mod, "lambda = 0: %.2e",
                  lambda_field([](int) { return 0.0; }));
        v.require(lambda_field([](int) { return -1.0; }) <= tol_mod, "lambda = -1: %.2e",
                  lambda_field([](int) { return -1.0; }));
        // Generic lambda: integrate lambda' = -2 lambda (lambda + 1) b'/b along v by RK4, with b = cos theta(u0, .).
        const int n = S.grid().Nv;
        Eigen::VectorXd b(n);
        for (int j = 0; j < n; ++j) b(j) = std::cos(S.theta(0, j));
        const Spline1D bs(S.grid().v0, S.grid().dv, b);
        const auto rhs = [&](double v, double lam) { return -2 * lam * (lam + 1) * bs.derivative(v) / bs(v); };
        Eigen::VectorXd lam(n);
        lam(0) = 0.25;
        for (int j = 0; j + 1 < n; ++j) {
            const double h = S.grid().dv, x = S.grid().v(j), y = lam(j);
            const double k1 = rhs(x, y), k2 = rhs(x + h / 2, y + h * k1 / 2), k3 = rhs(x + h / 2, y + h * k2 / 2),
                         k4 = rhs(x + h, y + h * k3);
            lam(j + 1) = y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6;
        }
        const double generic = lambda_field([&](int j) { return lam(j); });
        v.require(generic <= tol_mod, "generic lambda(v0) = 0.25: %.2e (tol_mod %.2e)", generic, tol_mod);
    }
    return v;
}

Verdict reconstruction() {
    Verdict v;
    const Lab& L = lab("intersection");
    const ReconstructedChart id = reconstruct_from_data(L.chart, L.an, L.S);
    const Alignment a0 = congruence(L.chart, id);
    v.require(a0.max_distance <= 1e-4 * a0.diameter, "U = V = 0 aligns to %.2e diameter", a0.max_distance / a0.diameter);
    const DeformedData d = build_taus(family(L, primitives(L.S), -1.0), L.S);
    const ReconstructedChart r = reconstruct_from_data(L.chart, L.an, d.S_hat);
    v.require(r.gram_relative_error <= 50 * kGrid.h2(), "t = -1 Gram error %.2e <= %.2e", r.gram_relative_error,
              50 * kGrid.h2());
    const Alignment a = congruence(L.chart, r);
    v.require(a.max_distance > 1e-2 * a.diameter, "t = -1 Procrustes residual %.2e diameter",
              a.max_distance / a.diameter);
    return v;
}

Verdict shared_dimension_check() {
    Verdict v;
    const std::pair<const char*, int> cases[] = {{"separable", 1}, {"intersection", 2}, {"three_term", 3}};
    for (const auto& [name, k] : cases) {
        const SharedDimension sd = shared_dimension(hypsub::testing::named_seed(name).curves);
        v.require(sd.I == k && sd.gap >= 1e3, "k = %d: I = %d, gap %.1e", k, sd.I, sd.gap);
    }
    return v;
}

Verdict angle_preserving() {
    Verdict v;
    const SurfaceData& S = lab("lambda_zero").S;
    const AnglePreservingReport r = angle_preserving_scan(S);
    v.require(r.which == AnglePreservingCase::family_lambda_zero, "case %s", to_string(r.which));
    v.require(r.pairs.size() >= 2, "%zu pairs", r.pairs.size());
    v.require(r.all_members, "all pass the moduli residual");
    v.require(r.all_uv_negative, "every pair has UV < 0");
    double spread = 0.0;
    for (const DeformationPair& p : r.pairs) {
        const DeformedData d = build_taus(p, S);
        spread = std::max(spread, d.tau_u.values.maxCoeff() - d.tau_u.values.minCoeff());
        spread = std::max(spread, (d.tau_u.values.array() * d.tau_v.values.array() - 1).abs().maxCoeff());
    }
    v.require(spread < 1e-10, "tau constant with tau^u tau^v = 1 to %.1e", spread);
    return v;
}

Verdict determinism() {
    Verdict v;
    const auto dir = std::filesystem::temp_directory_path() / "hypsub_acceptance";
    std::string reports[2];
    for (int k = 0; k < 2; ++k) {
        ojson doc = ojson::parse(R"({"moduli_scan": {"random_probes": 4}, "random_seed": 99})");
        doc["out_dir"] = (dir / std::to_string(k)).string();
        const PipelineConfig cfg = parse_config(doc);
        const RunReport r = run(cfg);
        write_report(r, cfg);
        v.require(r.exit_code == 0, "run %d exit %d", k, r.exit_code);
        reports[k] = read_text((dir / std::to_string(k) / "report.json").string());
    }
    v.require(reports[0] == reports[1], "reports byte-identical (%zu bytes)", reports[0].size());
    const FieldTable csv = read_csv((dir / "0" / "fields.csv").string());
    write_csv((dir / "copy.csv").string(), csv);
    v.require(read_csv((dir / "copy.csv").string()).rows == csv.rows && csv.rows.rows() == 65 * 65,
              "CSV round-trip exact");
    const Mesh mesh = read_obj((dir / "0" / "reconstructed_1.obj").string());
    write_obj((dir / "copy.obj").string(), mesh);
    const Mesh back = read_obj((dir / "copy.obj").string());
    v.require(back.vertices == mesh.vertices && back.faces == mesh.faces && !mesh.faces.empty(),
              "OBJ round-trip exact (%zu faces)", mesh.faces.size());
    return v;
}

}  // namespace

int main() {
    const std::pair<const char*, Verdict (*)()> criteria[] = {
        {"wave/conjugacy", conjugacy},
        {"parametrization duality", duality},
        {"Gauss identity", gauss},
        {"invariance", invariance},
        {"moduli family", moduli_family},
        {"discriminant law", discriminant_law},
        {"hypersurface admission", hypersurface},
        {"reconstruction isometry", reconstruction},
        {"shared dimension", shared_dimension_check},
        {"angle-preserving", angle_preserving},
        {"determinism and format", determinism},
    };
    int failed = 0;
    for (size_t k = 0; k < std::size(criteria); ++k) {
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("error: ") + e.what();
        }
        failed += v.pass ? 0 : 1;
        std::printf("%s %2zu %-26s %s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, v.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
