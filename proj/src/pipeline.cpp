#include "hypsub/pipeline.hpp"

#include "hypsub/hypersurface.hpp"
#include "hypsub/immersion.hpp"
#include "hypsub/intersection_type.hpp"
#include "hypsub/invariants.hpp"
#include "hypsub/io.hpp"
#include "hypsub/moduli.hpp"
#include "hypsub/reconstruct.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>

namespace hypsub {

namespace {

const std::vector<std::pair<Stage, const char*>>& stage_names() {
    static const std::vector<std::pair<Stage, const char*>> names = {
        {Stage::polar, "polar"},
        {Stage::immersion, "immersion"},
        {Stage::invariants, "invariants"},
        {Stage::moduli, "moduli"},
        {Stage::classify, "classify"},
        {Stage::hypersurface, "hypersurface"},
        {Stage::intersection, "intersection"},
        {Stage::angle_preserving, "angle_preserving"},
        {Stage::reconstruct, "reconstruct"},
        {Stage::export_mesh, "export"},
    };
    return names;
}

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::config, what); }

void check_keys(const ojson& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) config_error(where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) config_error("unknown key '" + it.key() + "' in " + where);
    }
}

template <typename T>
T get(const ojson& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        config_error(std::string("bad value for '") + key + "' in " + where);
    }
}

double param(const ojson& params, const char* key, double fallback) {
    return get<double>(params, key, fallback, "seed.params");
}

SeedFamily make_seed(const SeedSpec& s) {
    const ojson& p = s.params;
    if (s.family == "intersection") {
        check_keys(p, "seed.params", {"p0", "p1", "q0", "q1", "phi1_0", "phi1_1", "phi2_0", "phi2_1", "k1"});
        RotatingPlaneParams r;
        r.p = {param(p, "p0", r.p.c0), param(p, "p1", r.p.c1)};
        r.q = {param(p, "q0", r.q.c0), param(p, "q1", r.q.c1)};
        r.phi1 = {param(p, "phi1_0", r.phi1.c0), param(p, "phi1_1", r.phi1.c1)};
        r.phi2 = {param(p, "phi2_0", r.phi2.c0), param(p, "phi2_1", r.phi2.c1)};
        r.k1 = param(p, "k1", r.k1);
        return intersection_seed(r);
    }
    if (s.family == "separable") {
        check_keys(p, "seed.params", {"a0", "a1", "b0", "b1", "k1", "k2"});
        SeparableParams r;
        r.a = {param(p, "a0", r.a.c0), param(p, "a1", r.a.c1)};
        r.b = {param(p, "b0", r.b.c0), param(p, "b1", r.b.c1)};
        r.k1 = param(p, "k1", r.k1);
        r.k2 = param(p, "k2", r.k2);
        return separable_seed(r);
    }
    if (s.family == "three_term") {
        check_keys(p, "seed.params", {"r1", "r2", "c1", "c2", "k1", "k2", "delta"});
        ThreeTermParams r;
        r.r1 = param(p, "r1", r.r1);
        r.r2 = param(p, "r2", r.r2);
        r.c1 = param(p, "c1", r.c1);
        r.c2 = param(p, "c2", r.c2);
        r.k1 = param(p, "k1", r.k1);
        r.k2 = param(p, "k2", r.k2);
        r.delta = param(p, "delta", r.delta);
        return three_term_seed(r);
    }
    if (s.family == "wave") {
        check_keys(p, "seed.params", {"gamma_u_amp", "gamma_v_amp"});
        return wave_seed(param(p, "gamma_u_amp", 0.3), param(p, "gamma_v_amp", 0.2));
    }
    if (s.family == "curves_csv") {
        check_keys(p, "seed.params", {});
        SeedFamily f;
        f.kind = SeedKind::sum_of_curves;
        f.curves.alpha1 = read_curve_csv(s.curve1_csv);
        f.curves.alpha2 = read_curve_csv(s.curve2_csv);
        f.curves.family = "curves_csv";
        f.label = "curves_csv";
        return f;
    }
    config_error("unknown seed family '" + s.family + "'");
}

bool curve_based(const std::string& family) { return family != "wave"; }

std::string resolved_mode(const PipelineConfig& cfg) {
    if (cfg.scan.mode != "auto") return cfg.scan.mode;
    return cfg.seed.family == "intersection" ? "t_sweep" : "lattice";
}

ojson field_range(const ScalarField2& f) {
    return {{"min", f.values.minCoeff()}, {"max", f.values.maxCoeff()}};
}

ojson admissibility_json(const Admissibility& a) {
    ojson j = {{"ok", a.ok}, {"margin", a.margin}};
    if (!a.ok) j["violation"] = a.message;
    return j;
}

// Everything a run accumulates between stages.
struct Context {
    const PipelineConfig& cfg;
    RunReport& rr;
    Grid2 g;
    SeedFamily seed;
    PolarSurfacePtr polar;
    std::unique_ptr<ImmersionChart> chart;
    ImmersionAnalysis an;
    SurfaceData S;
    std::optional<InvariantSet> inv;
    std::optional<Primitives> prim;
    struct Candidate {
        DeformationPair pair;
        double t = 0.0;
        bool from_sweep = false, probe = false;
        bool member = false;
    };
    std::vector<Candidate> candidates;
    std::vector<BoundaryDatum> boundary;
    std::vector<std::pair<std::string, ReconstructedChart>> reconstructions;

    double scale() const { return cfg.tol.scale; }

    bool check(const char* stage, const std::string& name, double value, double tol, ojson& where) {
        const bool pass = value <= tol;
        rr.assertions.push_back({stage, name, value, tol, pass});
        where["checks"][name] = {{"value", value}, {"tol", tol}, {"pass", pass}};
        return pass;
    }
    // Boolean checks carry value 0 (holds) or 1 (fails) against tol 0.
    bool check_true(const char* stage, const std::string& name, bool ok, ojson& where) {
        return check(stage, name, ok ? 0.0 : 1.0, 0.0, where);
    }

    // Squared projected speeds for the t family: closed form when the seed has
    // it, splines through the shared-plane samples otherwise.
    std::pair<std::function<double(double)>, std::function<double(double)>> projected_speeds() const {
        if (seed.curves.proj_speed1 && seed.curves.proj_speed2)
            return {seed.curves.proj_speed1, seed.curves.proj_speed2};
        KernelWindow w{g.u0, g.u_end(), g.v0, g.v_end(), 65};
        const SharedDimension sd = shared_dimension(seed.curves, w, cfg.tol.rank_tol);
        if (sd.I != 2) throw Error(ErrorKind::precondition, "t family needs shared dimension 2");
        auto s1 = std::make_shared<Spline1D>(w.u0, (w.u1 - w.u0) / (w.n - 1), sd.proj_speed1);
        auto s2 = std::make_shared<Spline1D>(w.v0, (w.v1 - w.v0) / (w.n - 1), sd.proj_speed2);
        return {[s1](double u) { return (*s1)(u); }, [s2](double v) { return (*s2)(v); }};
    }

    double tol_mod(const ModuliResidual& mr) const { return (cfg.tol.tol_mod > 0 ? cfg.tol.tol_mod : mr.tol) * scale(); }
};

void stage_polar(Context& c, ojson& out) {
    c.seed = make_seed(c.cfg.seed);
    if (c.seed.curves.dim() != c.cfg.ambient_dim)
        config_error("seed curves live in R^" + std::to_string(c.seed.curves.dim()) + ", ambient_dim is " +
                     std::to_string(c.cfg.ambient_dim));
    c.polar = std::make_shared<PolarSurface>(build_polar(c.seed, c.g, c.cfg.ambient_dim));
    const PolarSurface& P = *c.polar;
    out["seed"] = {{"label", c.seed.label}, {"kind", to_string(c.seed.kind)}};
    ojson params = ojson::object();
    for (const auto& [k, v] : c.seed.params) params[k] = v;
    out["seed"]["params"] = params;
    out["nowhere_flat"] = P.nowhere_flat;
    out["flat"] = P.flat;
    out["min_independence_sv"] = P.min_independence_sv;
    out["s"] = field_range(P.s);
    out["Lambda_u"] = field_range(P.lambda_u);
    out["Lambda_v"] = field_range(P.lambda_v);
    const double tol = (c.cfg.tol.tol > 0 ? c.cfg.tol.tol : 10 * c.g.h2() * std::max(1.0, max_norm(P.g))) * c.scale();
    c.check("polar", "conjugacy", P.conjugacy_residual, tol, out);
}

void stage_immersion(Context& c, ojson& out) {
    const RhoData rho = default_rho(*c.polar);
    c.chart = std::make_unique<ImmersionChart>(build_chart(c.polar, rho, c.cfg.t_extent));
    c.an = analyze(*c.chart, c.cfg.tol.hyperbolicity);
    c.S = surface_data(*c.chart, c.an);
    const ImmersionAnalysis& an = c.an;
    out["rho"] = rho.description;
    out["n"] = c.chart->n();
    out["t_extent"] = c.chart->t_extent;
    out["hessian_residual"] = c.chart->eta.hessian_residual;
    out["rho_wave_residual"] = c.chart->eta.wave_residual;
    out["min_gram_det"] = an.min_gram_det;
    out["cos_theta_residual"] = an.cos_theta_residual;
    out["nullity_residual"] = an.nullity_residual;
    out["rank_one_residual"] = an.rank_one_residual;
    out["normal_signs"] = {an.sign1, an.sign2};
    out["theta"] = field_range(an.theta);
    out["lambda1"] = field_range(an.lambda1);
    out["lambda2"] = field_range(an.lambda2);
    c.check("immersion", "gauss_identity", an.gauss_residual, c.cfg.tol.gauss * c.scale(), out);
    const DualityCheck d = duality_check(*c.chart, 100, c.cfg.random_seed);
    out["duality_points"] = d.points;
    out["duality_skipped"] = d.skipped;
    c.check("immersion", "normal_space_duality", d.max_defect, c.cfg.tol.duality * c.scale(), out);
}

void stage_invariants(Context& c, ojson& out) {
    c.inv = compute_invariants(c.S);
    const InvariantSet& inv = *c.inv;
    const std::array<double, 6> tols = invariant_tolerances(inv);
    int masked = 0;
    for (int i = 0; i < c.g.Nu; ++i)
        for (int j = 0; j < c.g.Nv; ++j) masked += inv.mask(i, j) ? 0 : 1;
    out["masked_nodes"] = masked;
    for (int k = 0; k < 6; ++k) {
        const ScalarField2& f = inv[k];
        out["fields"][InvariantSet::names[static_cast<size_t>(k)]] = {
            {"max_abs", max_abs_masked(f, inv.mask)},
            {"tol_inv", (c.cfg.tol.tol_inv > 0 ? c.cfg.tol.tol_inv : tols[static_cast<size_t>(k)]) * c.scale()}};
    }
}

void add_candidate(Context& c, DeformationPair pair, double t, bool sweep, bool probe) {
    c.candidates.push_back({std::move(pair), t, sweep, probe, false});
}

void stage_moduli(Context& c, ojson& out) {
    c.prim = primitives(c.S);
    const std::string mode = resolved_mode(c.cfg);
    out["mode"] = mode;
    out["window"] = {{"u", {c.g.u0, c.g.u_end()}}, {"v", {c.g.v0, c.g.v_end()}}};
    if (mode == "t_sweep") {
        const auto [p1, p2] = c.projected_speeds();
        std::vector<double> ts = c.cfg.scan.t;
        if (ts.empty()) {
            ts = default_t_sweep();
            ts.push_back(0.5);
            ts.push_back(5.0);
        }
        std::mt19937_64 rng(c.cfg.random_seed);
        std::uniform_real_distribution<double> ex(-1.0, 1.0);
        for (int k = 0; k < c.cfg.scan.random_probes; ++k) ts.push_back(-std::pow(10.0, ex(rng)));
        for (double t : ts) {
            const bool probe = t < 0 && (std::abs(t) > 10 || std::abs(t) < 0.1);
            add_candidate(c, intersection_family(*c.prim, p1, p2, t), t, true, probe);
        }
    } else if (mode == "lattice") {
        const double u0 = c.g.u0, v0 = c.g.v0;
        for (double a0 : c.cfg.scan.lattice_values)
            for (double a1 : c.cfg.scan.lattice_slopes)
                for (double b0 : c.cfg.scan.lattice_values)
                    for (double b1 : c.cfg.scan.lattice_slopes) {
                        if (a0 == 0 && a1 == 0 && b0 == 0 && b1 == 0) continue;
                        char label[96];
                        std::snprintf(label, sizeof label, "U=%g%+g(u-u0) V=%g%+g(v-v0)", a0, a1, b0, b1);
                        add_candidate(c,
                                      make_pair(
                                          *c.prim, [=](double u) { return a0 + a1 * (u - u0); },
                                          [=](double v) { return b0 + b1 * (v - v0); }, label),
                                      0.0, false, false);
                    }
    } else {
        const double u0 = c.g.u0, v0 = c.g.v0;
        for (const LinearPair& lp : c.cfg.scan.pairs) {
            char label[96];
            std::snprintf(label, sizeof label, "U=%g%+g(u-u0) V=%g%+g(v-v0)", lp.a0, lp.a1, lp.b0, lp.b1);
            add_candidate(c,
                          make_pair(
                              *c.prim, [=](double u) { return lp.a0 + lp.a1 * (u - u0); },
                              [=](double v) { return lp.b0 + lp.b1 * (v - v0); }, label),
                          0.0, false, false);
        }
    }

    const std::array<double, 6> tol_inv = invariant_tolerances(*c.inv);
    int members = 0, admissible = 0;
    bool sweep_members = true, positive_inadmissible = true;
    double worst_sweep = 0.0, worst_margin = -std::numeric_limits<double>::infinity(), sweep_tol = 0.0;
    double worst_inv_ratio = 0.0;
    ojson rows = ojson::array();
    for (Context::Candidate& cand : c.candidates) {
        ojson row = {{"label", cand.pair.label}};
        if (cand.from_sweep) {
            row["t"] = cand.t;
            if (cand.probe) row["probe"] = true;
        }
        const Admissibility adm = check_admissibility(cand.pair, c.S);
        row["admissibility"] = admissibility_json(adm);
        if (cand.from_sweep && cand.t > 0) {
            positive_inadmissible = positive_inadmissible && !adm.ok;
            worst_margin = std::max(worst_margin, adm.margin);
        }
        if (adm.ok) {
            ++admissible;
            try {
                const ModuliResidual mr = moduli_residual(cand.pair, c.S);
                // Lattice points are blind probes: keep the scan threshold of lattice_scan.
                const double tol = (mode == "lattice" ? 1e-2 : 1.0) * c.tol_mod(mr);
                cand.member = mr.max_abs <= tol;
                row["residual"] = mr.max_abs;
                row["tol_mod"] = tol;
                if (cand.member) {
                    ++members;
                    const DeformedData d = build_taus(cand.pair, c.S);
                    const std::array<double, 6> r = invariance_residual(c.S, d.S_hat);
                    ojson ir = ojson::object();
                    for (int k = 0; k < 6; ++k) {
                        const double t = (c.cfg.tol.tol_inv > 0 ? c.cfg.tol.tol_inv : tol_inv[static_cast<size_t>(k)]) *
                                         c.scale();
                        ir[InvariantSet::names[static_cast<size_t>(k)]] = r[static_cast<size_t>(k)];
                        worst_inv_ratio = std::max(worst_inv_ratio, r[static_cast<size_t>(k)] / t);
                    }
                    row["invariance_residual"] = ir;
                }
                if (cand.from_sweep && cand.t < 0 && !cand.probe) {
                    worst_sweep = std::max(worst_sweep, mr.max_abs / tol);
                    sweep_tol = tol;
                }
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::boundary && e.kind() != ErrorKind::inadmissible_pair) throw;
                row["error"] = e.what();
            }
        }
        row["member"] = cand.member;
        if (cand.from_sweep && cand.t < 0 && !cand.probe) sweep_members = sweep_members && cand.member;
        rows.push_back(row);
    }
    out["candidates"] = rows;
    out["admissible"] = admissible;
    out["members"] = members;
    if (mode == "t_sweep") {
        out["sweep_tol_mod"] = sweep_tol;
        c.check("moduli", "sweep_members (max residual / tol_mod)", worst_sweep, 1.0, out);
        c.check_true("moduli", "sweep_all_members", sweep_members, out);
        if (std::isfinite(worst_margin))
            c.check("moduli", "positive_t_inadmissible (max margin)", worst_margin, 0.0, out);
        else
            out["positive_t_inadmissible"] = positive_inadmissible;
    }
    if (members > 0) c.check("moduli", "member_invariance (max residual / tol_inv)", worst_inv_ratio, 1.0, out);
}

void stage_classify(Context& c, ojson& out) {
    ojson rows = ojson::array();
    int disc = 0, roots = 0;
    for (const Context::Candidate& cand : c.candidates) {
        if (!cand.member) continue;
        ClassifyOptions opt;
        opt.tol_mod = (c.cfg.tol.tol_mod > 0 ? c.cfg.tol.tol_mod : 0.0) * c.scale();
        if (opt.tol_mod == 0.0) opt.tol_mod = c.tol_mod(moduli_residual(cand.pair, c.S));
        const ClassificationReport r = classify(cand.pair, c.S, *c.polar, opt);
        ojson row = {{"label", cand.pair.label},
                     {"moduli_residual", r.moduli_residual},
                     {"tol_mod", r.tol_mod},
                     {"composition", r.is_composition},
                     {"branch", to_string(r.branch)},
                     {"composition_nodes", {{"u", r.composition_nodes_u}, {"v", r.composition_nodes_v}, {"of", r.nodes}}},
                     {"min_composition_derivative", {{"u", r.min_comp_u}, {"v", r.min_comp_v}}},
                     {"tol_comp", r.tol_comp},
                     {"flat_extension", to_string(r.flat_extension)},
                     {"uv_sign", r.uv_sign},
                     {"genuineness", to_string(r.genuineness)},
                     {"honest", r.honest},
                     {"h_samples", r.h_samples.size()},
                     {"disc_law_violations", r.disc_law_violations},
                     {"root_count_violations", r.root_count_violations},
                     {"max_disc_mismatch", r.max_disc_mismatch},
                     {"max_cr_residual", r.max_cr_residual}};
        if (cand.from_sweep) row["t"] = cand.t;
        if (!r.note.empty()) row["note"] = r.note;
        disc += r.disc_law_violations;
        roots += r.root_count_violations;
        rows.push_back(row);
    }
    out["classified"] = rows;
    c.check("classify", "discriminant_law_violations", disc, 0, out);
    c.check("classify", "root_count_violations", roots, 0, out);
}

void stage_hypersurface(Context& c, ojson& out) {
    HypersurfaceOptions opt;
    if (c.cfg.tol.tol > 0) opt.tol = c.cfg.tol.tol * c.scale();
    HypersurfaceReport rep = hypersurface_admission(c.S, opt);
    if (c.cfg.tol.scale != 1.0 && opt.tol == 0.0) {
        opt.tol = rep.P_tol * c.scale();
        rep = hypersurface_admission(c.S, opt);
    }
    out["verdict"] = to_string(rep.verdict);
    out["P_norm"] = rep.P_norm;
    out["P_tol"] = rep.P_tol;
    out["hh_tol"] = rep.hh_tol;
    out["ambiguous"] = rep.ambiguous;
    out["identity_residual"] = rep.identity_residual;
    out["positive_roots"] = {{"min", rep.min_positive_roots}, {"max", rep.max_positive_roots}};
    out["root_count_nodes"] = {rep.root_count_nodes[0], rep.root_count_nodes[1], rep.root_count_nodes[2]};
    out["nonexistence_nodes"] = rep.nonexistence_nodes;
    out["nodes"] = rep.nodes;
    if (!rep.note.empty()) out["note"] = rep.note;
    ojson roots = ojson::array();
    for (size_t k = 0; k < rep.admissible_mus.size(); ++k) {
        const RootField& rf = rep.admissible_mus[k];
        ojson row = {{"hh_residual_u", rf.hh_residual_u}, {"hh_residual_v", rf.hh_residual_v},
                     {"satisfies_hh", rf.satisfies_hh}, {"mu", field_range(rf.mu)}};
        if (rf.satisfies_hh) {
            try {
                const MuIntegration mi = integrate_mu(rep, rf.mu(0, 0), static_cast<int>(k));
                row["integration"] = {{"consistency", mi.consistency},
                                      {"branch_mismatch", mi.branch_mismatch},
                                      {"refinements", mi.refinements}};
            } catch (const Error& e) {
                if (!is_numerical(e.kind())) throw;
                row["integration"] = {{"error", e.what()}};
            }
        }
        roots.push_back(row);
    }
    out["roots"] = roots;
    if (rep.verdict == HypersurfaceClass::discrete_class && rep.admissible_mus.size() == 2) {
        // Root fields against 1/s - 1 and 1/s, relative.
        double worst = 0.0;
        const ScalarField2& s = c.polar->s;
        for (int i = 0; i < c.g.Nu; ++i)
            for (int j = 0; j < c.g.Nv; ++j) {
                if (!rep.mask(i, j)) continue;
                const double lo = 1 / s(i, j) - 1, hi = 1 / s(i, j);
                worst = std::max(worst, std::abs(rep.admissible_mus[0].mu(i, j) - lo) / std::abs(lo));
                worst = std::max(worst, std::abs(rep.admissible_mus[1].mu(i, j) - hi) / std::abs(hi));
            }
        out["roots_vs_inverse_s"] = worst;
    }
    if (rep.verdict == HypersurfaceClass::continuous_class) {
        ojson fam = ojson::object();
        for (double lam : {0.0, -1.0}) {
            const ScalarField2 mu = map1(c.polar->s, [lam](double s) { return lam + 1 / s; });
            const auto [ru, rv] = hh_residual(rep, mu);
            fam[lam == 0.0 ? "lambda=0" : "lambda=-1"] = {{"hh_residual", std::max(ru, rv)}, {"tol", rep.hh_tol}};
        }
        out["closed_form_members"] = fam;
    }
    if (!c.cfg.expect.hypersurface_verdict.empty())
        c.check_true("hypersurface", "verdict == " + c.cfg.expect.hypersurface_verdict,
                     c.cfg.expect.hypersurface_verdict == to_string(rep.verdict), out);
}

void stage_intersection(Context& c, ojson& out) {
    KernelWindow w{c.g.u0, c.g.u_end(), c.g.v0, c.g.v_end(), 65};
    const SharedDimension sd = shared_dimension(c.seed.curves, w, c.cfg.tol.rank_tol);
    const std::vector<int> win = windowed_shared_dimension(c.seed.curves, w, c.cfg.tol.rank_tol);
    out["shared_dimension"] = sd.I;
    out["singular_value_gap"] = std::isfinite(sd.gap) ? ojson(sd.gap) : ojson("inf");
    std::vector<double> rel;
    for (int k = 0; k < std::min<int>(6, static_cast<int>(sd.singular_values.size())); ++k)
        rel.push_back(sd.singular_values(k) / sd.singular_values(0));
    out["relative_singular_values"] = rel;
    out["windowed_shared_dimension"] = win;
    out["verdict"] = honest_verdict(sd.I);
    if (c.cfg.expect.shared_dimension >= 0)
        c.check_true("intersection", "shared_dimension == " + std::to_string(c.cfg.expect.shared_dimension),
                     sd.I == c.cfg.expect.shared_dimension, out);

    if (sd.I == 2) {
        const auto [p1, p2] = c.projected_speeds();
        std::vector<double> ts = default_t_sweep();
        ts.push_back(0.5);
        ts.push_back(5.0);
        IntersectionModuli im = intersection_moduli(c.S, *c.polar, p1, p2, ts);
        ojson rows = ojson::array();
        bool members = true, honest = true;
        double worst_margin = -std::numeric_limits<double>::infinity();
        for (const FamilyMember& m : im.members) {
            const double tol = (c.cfg.tol.tol_mod > 0 ? c.cfg.tol.tol_mod : m.tol_mod) * c.scale();
            const bool member = m.admissible && m.moduli_residual <= tol;
            ojson row = {{"t", m.t}, {"admissible", m.admissible}};
            if (m.probe) row["probe"] = true;
            if (m.admissible) {
                row["moduli_residual"] = m.moduli_residual;
                row["tol_mod"] = tol;
                row["member"] = member;
                row["genuineness"] = to_string(m.genuineness);
                row["honest"] = m.honest;
                row["phi_residual"] = m.phi_residual;
            } else {
                row["violation"] = m.admissibility.message;
            }
            if (m.t < 0 && !m.probe) {
                members = members && member;
                honest = honest && m.honest;
            }
            if (m.t > 0) worst_margin = std::max(worst_margin, m.admissibility.margin);
            rows.push_back(row);
        }
        out["family"] = rows;
        c.check_true("intersection", "sweep_members", members, out);
        c.check_true("intersection", "sweep_genuine_honest", honest, out);
        c.check("intersection", "positive_t_inadmissible (max margin)", worst_margin, 0.0, out);
        ojson bd = ojson::array();
        for (const BoundaryDatum& b : im.boundary)
            bd.push_back({{"label", b.label}, {"U", b.U}, {"V", b.V}, {"flat_extension", to_string(b.flat_extension)}});
        out["boundary"] = bd;
        c.boundary = std::move(im.boundary);
    } else if (sd.I >= 3) {
        const LatticeScan scan = lattice_scan(c.S, c.cfg.scan.lattice_values, c.cfg.scan.lattice_slopes);
        out["lattice_scan"] = {{"points", scan.hits.size()},
                               {"tol", scan.tol},
                               {"members", scan.members},
                               {"nontrivial_members", scan.nontrivial_members},
                               {"min_nontrivial_residual", scan.min_nontrivial_residual},
                               {"max_branch_residual", scan.max_branch_residual},
                               {"evidence", "scan resolution only"}};
    }
}

void stage_angle_preserving(Context& c, ojson& out) {
    AnglePreservingOptions opt;
    if (c.cfg.tol.tol_mod > 0) opt.tol_mod = c.cfg.tol.tol_mod * c.scale();
    const AnglePreservingReport r = angle_preserving_scan(c.S, opt);
    out["case"] = to_string(r.which);
    out["verdict"] = r.verdict;
    out["zero_tol"] = r.zero_tol;
    if (r.tau.grid.Nu > 0) out["sbcasy"] = {{"residual", r.sbcasy_residual}, {"tol", r.sbcasy_tol}};
    ojson rows = ojson::array();
    for (size_t k = 0; k < r.pairs.size(); ++k)
        rows.push_back({{"label", r.pairs[k].label},
                        {"param", k < r.params.size() ? r.params[k] : 0.0},
                        {"moduli_residual", k < r.residuals.size() ? r.residuals[k] : 0.0},
                        {"root_mismatch", k < r.root_mismatch.size() ? r.root_mismatch[k] : 0.0}});
    out["pairs"] = rows;
    if (!r.pairs.empty()) {
        c.check_true("angle_preserving", "pairs_are_members", r.all_members, out);
        c.check_true("angle_preserving", "pairs_uv_negative", r.all_uv_negative, out);
    }
    if (!c.cfg.expect.angle_preserving_case.empty())
        c.check_true("angle_preserving", "case == " + c.cfg.expect.angle_preserving_case,
                     c.cfg.expect.angle_preserving_case == to_string(r.which), out);
}

ojson reconstruction_json(Context& c, const ReconstructedChart& r, const Alignment& al) {
    return {{"compatibility_residual", r.compatibility_residual},
            {"tol_compat", r.tol_compat},
            {"orthonormality_drift", r.orthonormality_drift},
            {"gram_relative_error", r.gram_relative_error},
            {"procrustes_max_distance", al.max_distance},
            {"diameter", al.diameter},
            {"congruent_to_base", al.congruent()},
            {"affine_rank", affine_rank(r, c.cfg.tol.rank_tol)}};
}

void stage_reconstruct(Context& c, ojson& out) {
    ReconstructOptions opt;
    opt.tol_compat = (c.cfg.tol.tol_compat > 0 ? c.cfg.tol.tol_compat : c.g.h2()) * c.scale();
    const double gram_tol = 50 * c.g.h2() * c.scale();
    const auto attempt = [&](const std::string& label, const SurfaceData& data, ojson& row) -> const ReconstructedChart* {
        try {
            ReconstructedChart r = reconstruct_from_data(*c.chart, c.an, data, opt);
            const Alignment al = congruence(*c.chart, r);
            row = reconstruction_json(c, r, al);
            c.reconstructions.emplace_back(label, std::move(r));
            return &c.reconstructions.back().second;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::data_inconsistency) throw;
            row = {{"error", e.what()}};
            return nullptr;
        }
    };

    ojson id;
    const ReconstructedChart* r0 = attempt("identity", c.S, id);
    out["identity"] = id;
    if (r0) {
        const Alignment al = congruence(*c.chart, *r0);
        c.check("reconstruct", "identity_alignment (relative)", al.max_distance / al.diameter, 1e-4 * c.scale(), out);
    } else {
        c.check_true("reconstruct", "identity_compatibility", false, out);
    }

    ojson rows = ojson::array();
    int taken = 0;
    double worst_gram = 0.0;
    bool compatible = true;
    for (const Context::Candidate& cand : c.candidates) {
        if (!cand.member || cand.probe || taken >= 3) continue;
        ++taken;
        const DeformedData d = build_taus(cand.pair, c.S);
        ojson row;
        const ReconstructedChart* r = attempt(cand.pair.label, d.S_hat, row);
        row["label"] = cand.pair.label;
        if (r)
            worst_gram = std::max(worst_gram, r->gram_relative_error);
        else
            compatible = false;
        rows.push_back(row);
    }
    out["members"] = rows;
    if (r0) worst_gram = std::max(worst_gram, r0->gram_relative_error);
    c.check("reconstruct", "gram_relative_error", worst_gram, gram_tol, out);
    if (taken > 0) c.check_true("reconstruct", "member_compatibility", compatible, out);

    if (!c.boundary.empty()) {
        ojson bd = ojson::array();
        bool hyper = true;
        for (const BoundaryDatum& b : c.boundary) {
            ojson row;
            const ReconstructedChart* r = attempt("boundary " + b.label, b.S_hat, row);
            row["label"] = b.label;
            hyper = hyper && r && affine_rank(*r, c.cfg.tol.rank_tol) == c.chart->n() + 1;
            bd.push_back(row);
        }
        out["boundary"] = bd;
        c.check_true("reconstruct", "boundary_in_hyperplane (rank n+1)", hyper, out);
    }
}

void stage_export(Context& c, ojson& out) {
    const std::string& dir = c.cfg.out_dir;
    ojson files = ojson::array();
    bool roundtrip = true;
    const auto emit = [&](const std::string& name, const Mesh& m) {
        ojson row = {{"file", name}, {"vertices", m.vertices.rows()}, {"faces", m.faces.size()},
                     {"masked_vertices", m.masked_vertices}};
        if (!dir.empty()) {
            const std::string path = (std::filesystem::path(dir) / name).string();
            Mesh tagged = m;
            tagged.comments.insert(tagged.comments.begin(), "hypsub mesh, config " + config_hash(c.cfg));
            write_obj(path, tagged);
            const Mesh back = read_obj(path);
            roundtrip = roundtrip && back.vertices == m.vertices && back.faces == m.faces;
        }
        files.push_back(row);
    };
    const int m = c.chart->n() - 2;
    for (size_t k = 0; k < c.cfg.export_spec.t.size(); ++k) {
        SliceSpec spec;
        spec.t = Eigen::VectorXd::Constant(m, c.cfg.export_spec.t[k]);
        spec.axes = c.cfg.export_spec.axes;
        emit("base_slice_" + std::to_string(k) + ".obj", slice_mesh(*c.chart, spec));
    }
    for (size_t k = 0; k < c.reconstructions.size(); ++k) {
        SliceSpec spec;
        spec.axes = c.cfg.export_spec.axes;
        emit("reconstructed_" + std::to_string(k) + ".obj", slice_mesh(c.reconstructions[k].second, spec));
    }
    out["meshes"] = files;

    if (c.cfg.export_spec.fields_csv) {
        std::vector<std::pair<std::string, const ScalarField2*>> cols = {
            {"theta", &c.S.theta},      {"s", &c.polar->s},           {"Lambda_u", &c.S.lambda_u},
            {"Lambda_v", &c.S.lambda_v}, {"kappa_u", &c.S.kappa_u}, {"kappa_v", &c.S.kappa_v}};
        const ScalarField2 wave = wave_residual(c.chart->rho.rho, c.polar->gamma_u, c.polar->gamma_v);
        cols.emplace_back("rho_wave_residual", &wave);
        if (c.inv)
            for (int k = 0; k < 6; ++k) cols.emplace_back(InvariantSet::names[static_cast<size_t>(k)], &(*c.inv)[k]);
        const FieldTable t = field_table(c.g, cols);
        out["fields_csv"] = {{"file", "fields.csv"}, {"columns", t.columns}, {"rows", t.rows.rows()}};
        if (!dir.empty()) {
            const std::string path = (std::filesystem::path(dir) / "fields.csv").string();
            write_csv(path, t);
            const FieldTable back = read_csv(path);
            roundtrip = roundtrip && back.columns == t.columns && back.rows == t.rows;
        }
    }
    if (!dir.empty()) c.check_true("export", "roundtrip", roundtrip, out);
}

std::vector<double> number_list(const ojson& j, const std::string& where) {
    try {
        return j.get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
        config_error(where + " must be a list of numbers");
    }
}

}  // namespace

const char* to_string(Stage s) {
    for (const auto& [st, name] : stage_names())
        if (st == s) return name;
    return "?";
}

Stage stage_from_string(const std::string& name) {
    for (const auto& [st, n] : stage_names())
        if (name == n) return st;
    config_error("unknown stage '" + name + "'");
}

const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> all = [] {
        std::vector<Stage> v;
        for (const auto& p : stage_names()) v.push_back(p.first);
        return v;
    }();
    return all;
}

std::vector<Stage> stage_dependencies(Stage s) {
    switch (s) {
        case Stage::polar: return {};
        case Stage::immersion: return {Stage::polar};
        case Stage::invariants: return {Stage::immersion};
        case Stage::moduli: return {Stage::invariants};
        case Stage::classify: return {Stage::moduli};
        case Stage::hypersurface: return {Stage::immersion};
        case Stage::intersection: return {Stage::immersion};
        case Stage::angle_preserving: return {Stage::immersion};
        case Stage::reconstruct: return {Stage::moduli};
        case Stage::export_mesh: return {Stage::immersion};
    }
    return {};
}

std::set<Stage> close_dependencies(const std::set<Stage>& stages) {
    std::set<Stage> out = stages;
    bool grew = true;
    while (grew) {
        grew = false;
        for (Stage s : std::set<Stage>(out))
            for (Stage d : stage_dependencies(s)) grew = out.insert(d).second || grew;
    }
    return out;
}

PipelineConfig parse_config(const ojson& doc) {
    check_keys(doc, "config", {"seed", "grid", "ambient_dim", "t_extent", "tolerances", "stages", "moduli_scan",
                               "export", "expect", "out_dir", "random_seed"});
    PipelineConfig cfg;
    if (doc.contains("seed")) {
        const ojson& s = doc["seed"];
        check_keys(s, "seed", {"family", "params", "curve1_csv", "curve2_csv"});
        cfg.seed.family = get<std::string>(s, "family", cfg.seed.family, "seed");
        if (s.contains("params")) cfg.seed.params = s["params"];
        cfg.seed.curve1_csv = get<std::string>(s, "curve1_csv", "", "seed");
        cfg.seed.curve2_csv = get<std::string>(s, "curve2_csv", "", "seed");
    }
    if (doc.contains("grid")) {
        const ojson& g = doc["grid"];
        check_keys(g, "grid", {"u0", "u1", "v0", "v1", "nu", "nv"});
        cfg.grid.u0 = get<double>(g, "u0", cfg.grid.u0, "grid");
        cfg.grid.u1 = get<double>(g, "u1", cfg.grid.u1, "grid");
        cfg.grid.v0 = get<double>(g, "v0", cfg.grid.v0, "grid");
        cfg.grid.v1 = get<double>(g, "v1", cfg.grid.v1, "grid");
        cfg.grid.nu = get<int>(g, "nu", cfg.grid.nu, "grid");
        cfg.grid.nv = get<int>(g, "nv", cfg.grid.nv, "grid");
    }
    cfg.ambient_dim = get<int>(doc, "ambient_dim", cfg.ambient_dim, "config");
    cfg.t_extent = get<double>(doc, "t_extent", cfg.t_extent, "config");
    if (doc.contains("tolerances")) {
        const ojson& t = doc["tolerances"];
        check_keys(t, "tolerances",
                   {"tol", "tol_inv", "tol_mod", "tol_compat", "rank_tol", "gauss", "duality", "hyperbolicity", "scale"});
        Tolerances& o = cfg.tol;
        o.tol = get<double>(t, "tol", o.tol, "tolerances");
        o.tol_inv = get<double>(t, "tol_inv", o.tol_inv, "tolerances");
        o.tol_mod = get<double>(t, "tol_mod", o.tol_mod, "tolerances");
        o.tol_compat = get<double>(t, "tol_compat", o.tol_compat, "tolerances");
        o.rank_tol = get<double>(t, "rank_tol", o.rank_tol, "tolerances");
        o.gauss = get<double>(t, "gauss", o.gauss, "tolerances");
        o.duality = get<double>(t, "duality", o.duality, "tolerances");
        o.hyperbolicity = get<double>(t, "hyperbolicity", o.hyperbolicity, "tolerances");
        o.scale = get<double>(t, "scale", o.scale, "tolerances");
    }
    if (!doc.contains("stages") || (doc["stages"].is_string() && doc["stages"] == "all")) {
        cfg.stages = std::set<Stage>(all_stages().begin(), all_stages().end());
    } else if (doc["stages"].is_array()) {
        for (const ojson& s : doc["stages"]) {
            if (!s.is_string()) config_error("stages must be names");
            cfg.stages.insert(stage_from_string(s.get<std::string>()));
        }
    } else {
        config_error("stages must be \"all\" or a list of names");
    }
    if (doc.contains("moduli_scan")) {
        const ojson& m = doc["moduli_scan"];
        check_keys(m, "moduli_scan", {"mode", "t", "lattice_values", "lattice_slopes", "pairs", "random_probes"});
        ModuliScanSpec& s = cfg.scan;
        s.mode = get<std::string>(m, "mode", "auto", "moduli_scan");
        if (m.contains("t")) s.t = number_list(m["t"], "moduli_scan.t");
        if (m.contains("lattice_values")) s.lattice_values = number_list(m["lattice_values"], "moduli_scan.lattice_values");
        if (m.contains("lattice_slopes")) s.lattice_slopes = number_list(m["lattice_slopes"], "moduli_scan.lattice_slopes");
        if (m.contains("pairs")) {
            if (!m["pairs"].is_array()) config_error("moduli_scan.pairs must be a list");
            for (const ojson& p : m["pairs"]) {
                const std::vector<double> v = number_list(p, "moduli_scan.pairs entry");
                if (v.size() != 4) config_error("moduli_scan.pairs entries are [a0, a1, b0, b1]");
                s.pairs.push_back({v[0], v[1], v[2], v[3]});
            }
        }
        s.random_probes = get<int>(m, "random_probes", 0, "moduli_scan");
    } else {
        cfg.scan.mode = "auto";
    }
    if (doc.contains("export")) {
        const ojson& e = doc["export"];
        check_keys(e, "export", {"t", "axes", "fields_csv"});
        if (e.contains("t")) cfg.export_spec.t = number_list(e["t"], "export.t");
        if (e.contains("axes")) {
            const std::vector<double> a = number_list(e["axes"], "export.axes");
            if (a.size() != 3) config_error("export.axes needs three coordinates");
            for (int k = 0; k < 3; ++k) cfg.export_spec.axes[static_cast<size_t>(k)] = static_cast<int>(a[static_cast<size_t>(k)]);
        }
        cfg.export_spec.fields_csv = get<bool>(e, "fields_csv", true, "export");
    }
    if (doc.contains("expect")) {
        const ojson& e = doc["expect"];
        check_keys(e, "expect", {"hypersurface_verdict", "shared_dimension", "angle_preserving_case"});
        cfg.expect.hypersurface_verdict = get<std::string>(e, "hypersurface_verdict", "", "expect");
        cfg.expect.shared_dimension = get<int>(e, "shared_dimension", -1, "expect");
        cfg.expect.angle_preserving_case = get<std::string>(e, "angle_preserving_case", "", "expect");
    }
    cfg.out_dir = get<std::string>(doc, "out_dir", "", "config");
    cfg.random_seed = get<unsigned long long>(doc, "random_seed", 1ULL, "config");
    validate(cfg);
    return cfg;
}

void validate(const PipelineConfig& cfg) {
    for (Stage s : cfg.stages)
        for (Stage d : stage_dependencies(s))
            if (!cfg.stages.count(d))
                config_error(std::string("stage '") + to_string(s) + "' requires '" + to_string(d) + "'");
    const GridSpec& g = cfg.grid;
    if (!(g.u1 > g.u0) || !(g.v1 > g.v0)) config_error("grid box is empty");
    if (g.nu < 9 || g.nv < 9) config_error("grid needs at least 9 nodes per axis");
    const std::string& f = cfg.seed.family;
    if (f != "intersection" && f != "separable" && f != "three_term" && f != "wave" && f != "curves_csv")
        config_error("unknown seed family '" + f + "'");
    if (f == "curves_csv" && (cfg.seed.curve1_csv.empty() || cfg.seed.curve2_csv.empty()))
        config_error("curves_csv needs curve1_csv and curve2_csv");
    if (f != "curves_csv" && cfg.ambient_dim != 5) config_error("preset seeds live in R^5; set ambient_dim to 5");
    if (!cfg.seed.params.is_object()) config_error("seed.params must be an object");
    if (cfg.stages.count(Stage::intersection) && !curve_based(f))
        config_error("stage 'intersection' needs a sum-of-curves seed");
    const std::string mode = resolved_mode(cfg);
    if (mode != "t_sweep" && mode != "lattice" && mode != "pairs") config_error("unknown moduli_scan.mode '" + mode + "'");
    if (mode == "t_sweep" && !curve_based(f)) config_error("t_sweep needs a sum-of-curves seed");
    for (double t : cfg.scan.t)
        if (t == 0.0) config_error("moduli_scan.t must not contain 0");
    if (cfg.scan.random_probes < 0) config_error("moduli_scan.random_probes must be >= 0");
    const Tolerances& t = cfg.tol;
    for (double x : {t.tol, t.tol_inv, t.tol_mod, t.tol_compat})
        if (!(x >= 0)) config_error("tolerances must be >= 0");
    for (double x : {t.rank_tol, t.gauss, t.duality, t.hyperbolicity, t.scale})
        if (!(x > 0)) config_error("rank_tol, gauss, duality, hyperbolicity and scale must be > 0");
    if (!(cfg.t_extent > 0)) config_error("t_extent must be > 0");
    for (int a : cfg.export_spec.axes)
        if (a < 0 || a >= cfg.ambient_dim) config_error("export.axes outside the ambient dimension");
    for (double x : cfg.export_spec.t)
        if (std::abs(x) > cfg.t_extent) config_error("export.t outside t_extent");
    const std::string& hv = cfg.expect.hypersurface_verdict;
    if (!hv.empty() && hv != "continuous_class" && hv != "discrete_class" && hv != "rigid" && hv != "none")
        config_error("unknown expected hypersurface verdict '" + hv + "'");
}

ojson to_json(const PipelineConfig& cfg) {
    ojson stages = ojson::array();
    for (Stage s : all_stages())
        if (cfg.stages.count(s)) stages.push_back(to_string(s));
    ojson pairs = ojson::array();
    for (const LinearPair& p : cfg.scan.pairs) pairs.push_back({p.a0, p.a1, p.b0, p.b1});
    ojson seed = {{"family", cfg.seed.family}, {"params", cfg.seed.params}};
    if (cfg.seed.family == "curves_csv") {
        seed["curve1_csv"] = cfg.seed.curve1_csv;
        seed["curve2_csv"] = cfg.seed.curve2_csv;
    }
    return {{"seed", seed},
            {"grid",
             {{"u0", cfg.grid.u0}, {"u1", cfg.grid.u1}, {"v0", cfg.grid.v0}, {"v1", cfg.grid.v1},
              {"nu", cfg.grid.nu}, {"nv", cfg.grid.nv}}},
            {"ambient_dim", cfg.ambient_dim},
            {"t_extent", cfg.t_extent},
            {"tolerances",
             {{"tol", cfg.tol.tol}, {"tol_inv", cfg.tol.tol_inv}, {"tol_mod", cfg.tol.tol_mod},
              {"tol_compat", cfg.tol.tol_compat}, {"rank_tol", cfg.tol.rank_tol}, {"gauss", cfg.tol.gauss},
              {"duality", cfg.tol.duality}, {"hyperbolicity", cfg.tol.hyperbolicity}, {"scale", cfg.tol.scale}}},
            {"stages", stages},
            {"moduli_scan",
             {{"mode", cfg.scan.mode}, {"t", cfg.scan.t}, {"lattice_values", cfg.scan.lattice_values},
              {"lattice_slopes", cfg.scan.lattice_slopes}, {"pairs", pairs}, {"random_probes", cfg.scan.random_probes}}},
            {"export",
             {{"t", cfg.export_spec.t}, {"axes", cfg.export_spec.axes}, {"fields_csv", cfg.export_spec.fields_csv}}},
            {"expect",
             {{"hypersurface_verdict", cfg.expect.hypersurface_verdict},
              {"shared_dimension", cfg.expect.shared_dimension},
              {"angle_preserving_case", cfg.expect.angle_preserving_case}}},
            {"out_dir", cfg.out_dir},
            {"random_seed", cfg.random_seed}};
}

std::string config_hash(const PipelineConfig& cfg) {
    ojson doc = to_json(cfg);
    doc.erase("out_dir");  // where the artifacts go does not change them
    return hex64(fnv1a(doc.dump()));
}

RunReport run(const PipelineConfig& cfg) {
    RunReport rr;
    rr.report["provenance"] = {{"config_hash", config_hash(cfg)},
                               {"seed_family", cfg.seed.family},
                               {"grid", {{"u", {cfg.grid.u0, cfg.grid.u1}}, {"v", {cfg.grid.v0, cfg.grid.v1}},
                                         {"nodes", {cfg.grid.nu, cfg.grid.nv}}}},
                               {"ambient_dim", cfg.ambient_dim},
                               {"tolerances", to_json(cfg)["tolerances"]},
                               {"random_seed", cfg.random_seed}};
    rr.report["stages"] = ojson::object();
    rr.timings = ojson::object();
    Context c{cfg, rr, cfg.grid.grid(), {}, nullptr, nullptr, {}, {}, {}, {}, {}, {}, {}};
    if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);

    using Fn = void (*)(Context&, ojson&);
    const std::vector<std::pair<Stage, Fn>> order = {
        {Stage::polar, stage_polar},
        {Stage::immersion, stage_immersion},
        {Stage::invariants, stage_invariants},
        {Stage::hypersurface, stage_hypersurface},
        {Stage::angle_preserving, stage_angle_preserving},
        {Stage::intersection, stage_intersection},
        {Stage::moduli, stage_moduli},
        {Stage::classify, stage_classify},
        {Stage::reconstruct, stage_reconstruct},
        {Stage::export_mesh, stage_export},
    };
    for (const auto& [stage, fn] : order) {
        if (!cfg.stages.count(stage)) continue;
        ojson out = ojson::object();
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn(c, out);
        } catch (const Error& e) {
            out["error"] = e.what();
            rr.report["stages"][to_string(stage)] = out;
            rr.failure = std::string(to_string(stage)) + ": " + e.what();
            rr.exit_code = is_numerical(e.kind()) ? 3 : 2;
            rr.timings[to_string(stage)] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            break;
        }
        rr.timings[to_string(stage)] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rr.report["stages"][to_string(stage)] = out;
    }
    ojson as = ojson::array();
    for (const Assertion& a : rr.assertions) {
        as.push_back({{"stage", a.stage}, {"name", a.name}, {"value", a.value}, {"tol", a.tol}, {"pass", a.pass}});
        if (!a.pass && rr.exit_code == 0) {
            rr.exit_code = 1;
            char buf[64];
            std::snprintf(buf, sizeof buf, " = %.6g > %.6g", a.value, a.tol);
            rr.failure = a.stage + ": " + a.name + buf;
        }
    }
    rr.report["assertions"] = as;
    rr.report["status"] = {{"exit_code", rr.exit_code}, {"failure", rr.failure}};
    return rr;
}

void write_report(const RunReport& r, const PipelineConfig& cfg) {
    if (cfg.out_dir.empty()) return;
    std::filesystem::create_directories(cfg.out_dir);
    write_text((std::filesystem::path(cfg.out_dir) / "report.json").string(), r.report.dump(2) + "\n");
    write_text((std::filesystem::path(cfg.out_dir) / "timings.json").string(), r.timings.dump(2) + "\n");
}

}  // namespace hypsub
