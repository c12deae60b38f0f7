#pragma once

#include "hypsub/grid.hpp"

#include <json.hpp>

#include <array>
#include <set>
#include <string>
#include <vector>

namespace hypsub {

using ojson = nlohmann::ordered_json;

enum class Stage {
    polar,
    immersion,
    invariants,
    moduli,
    classify,
    hypersurface,
    intersection,
    angle_preserving,
    reconstruct,
    export_mesh,
};
const char* to_string(Stage s);
Stage stage_from_string(const std::string& name);  // throws config
const std::vector<Stage>& all_stages();
// Direct prerequisites of a stage.
std::vector<Stage> stage_dependencies(Stage s);
// The stages together with everything they need.
std::set<Stage> close_dependencies(const std::set<Stage>& stages);

// Seed families: intersection, separable, three_term, wave, curves_csv.
struct SeedSpec {
    std::string family = "intersection";
    ojson params = ojson::object();  // family-specific overrides
    std::string curve1_csv, curve2_csv;  // curves_csv only
};

struct GridSpec {
    double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
    int nu = 65, nv = 65;
    Grid2 grid() const { return Grid2::box(u0, u1, v0, v1, nu, nv); }
};

// Zero selects the module default; every tolerance is multiplied by scale.
struct Tolerances {
    double tol = 0.0;  // conjugacy and wave residuals
    double tol_inv = 0.0;
    double tol_mod = 0.0;
    double tol_compat = 0.0;
    double rank_tol = 1e-7;
    double gauss = 1e-3;  // relative Gauss-identity residual
    double duality = 1e-3;  // normal-space angle defect, radians
    double hyperbolicity = 1e-2;  // rank-one eigenvalue ratio
    double scale = 1.0;
};

// Linear candidates U = a0 + a1 (u - u0), V = b0 + b1 (v - v0).
struct LinearPair {
    double a0 = 0.0, a1 = 0.0, b0 = 0.0, b1 = 0.0;
};

struct ModuliScanSpec {
    std::string mode = "auto";  // auto | t_sweep | lattice | pairs; auto picks t_sweep for the intersection seed
    std::vector<double> t;  // empty: default sweep plus the probes t = 0.5, 5
    std::vector<double> lattice_values{-0.5, 0.0, 0.5, 1.0, 2.0};
    std::vector<double> lattice_slopes{-0.5, 0.0, 0.5};
    std::vector<LinearPair> pairs;
    int random_probes = 0;  // extra log-uniform t in [-10, -0.1] (t_sweep only)
};

struct ExportSpec {
    std::vector<double> t{0.0};  // ruling parameter of each slice (all components equal)
    std::array<int, 3> axes{0, 1, 2};
    bool fields_csv = true;
};

// Verdicts the run must reproduce; empty strings and negative numbers mean unchecked.
struct Expectations {
    std::string hypersurface_verdict;
    int shared_dimension = -1;
    std::string angle_preserving_case;
};

struct PipelineConfig {
    SeedSpec seed;
    GridSpec grid;
    int ambient_dim = 5;
    double t_extent = 0.1;
    Tolerances tol;
    std::set<Stage> stages;
    ModuliScanSpec scan;
    ExportSpec export_spec;
    Expectations expect;
    std::string out_dir;  // empty: no files written
    unsigned long long random_seed = 1;
};

// Throws config on unknown keys, bad values, or stages missing a prerequisite.
PipelineConfig parse_config(const ojson& doc);
ojson to_json(const PipelineConfig& cfg);
void validate(const PipelineConfig& cfg);
// FNV-1a of the canonical config document.
std::string config_hash(const PipelineConfig& cfg);

struct Assertion {
    std::string stage, name;
    double value = 0.0, tol = 0.0;
    bool pass = false;
};

struct RunReport {
    ojson report;   // deterministic for a given config
    ojson timings;  // wall-clock seconds per stage
    std::vector<Assertion> assertions;
    int exit_code = 0;  // 0 pass, 1 assertion failure, 2 bad config or precondition, 3 numerical failure
    std::string failure;  // "<stage>: <message>" for the first failure
};

RunReport run(const PipelineConfig& cfg);

// report.json and timings.json in cfg.out_dir (plus the CSV and OBJ artifacts written by run).
void write_report(const RunReport& r, const PipelineConfig& cfg);

}  // namespace hypsub
