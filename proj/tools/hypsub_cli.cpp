// Command-line driver. Every subcommand runs the pipeline on a closed stage
// set; `run` takes the stages from the config (or --stage) verbatim.
//
// Exit codes: 0 all assertions pass, 1 an assertion failed, 2 config error,
// 3 numerical degeneracy.

#include "hypsub/errors.hpp"
#include "hypsub/io.hpp"
#include "hypsub/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>

using namespace hypsub;

namespace {

const std::map<std::string, Stage> kSubcommands = {
    {"solve-wave", Stage::polar},
    {"build-immersion", Stage::immersion},
    {"invariants", Stage::invariants},
    {"moduli-scan", Stage::moduli},
    {"classify", Stage::classify},
    {"hypersurface", Stage::hypersurface},
    {"intersection-family", Stage::intersection},
    {"angle-preserving", Stage::angle_preserving},
    {"reconstruct", Stage::reconstruct},
    {"export-mesh", Stage::export_mesh},
};

struct Options {
    std::string config, out;
    std::vector<std::string> stages;
    double tol_scale = 0.0;
    long long seed = -1;
    bool quiet = false;
};

PipelineConfig load(const std::string& sub, const Options& o) {
    ojson doc = ojson::object();
    if (!o.config.empty()) {
        try {
            doc = ojson::parse(read_text(o.config));
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorKind::config, o.config + ": " + e.what());
        }
    }
    // The stage list is settled below, after overrides, so that validation sees the final set.
    ojson stages = doc.contains("stages") ? doc["stages"] : ojson("all");
    doc.erase("stages");
    doc["stages"] = ojson::array();
    PipelineConfig cfg = parse_config(doc);
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (o.tol_scale > 0) cfg.tol.scale = o.tol_scale;
    if (o.seed >= 0) cfg.random_seed = static_cast<unsigned long long>(o.seed);

    std::set<Stage> chosen;
    if (sub == "run") {
        if (!o.stages.empty()) {
            for (const std::string& s : o.stages) chosen.insert(stage_from_string(s));
        } else {
            ojson probe = ojson::object();
            probe["stages"] = stages;
            chosen = parse_config(probe).stages;
        }
    } else {
        chosen = close_dependencies({kSubcommands.at(sub)});
        for (const std::string& s : o.stages) chosen.insert(stage_from_string(s));
    }
    cfg.stages = chosen;
    validate(cfg);
    return cfg;
}

void summarize(const RunReport& r) {
    for (const Assertion& a : r.assertions)
        std::printf("%-4s %-16s %-44s %.3e <= %.3e\n", a.pass ? "ok" : "FAIL", a.stage.c_str(), a.name.c_str(),
                    a.value, a.tol);
    const ojson& stages = r.report["stages"];
    for (auto it = stages.begin(); it != stages.end(); ++it)
        if (it.value().contains("verdict"))
            std::printf("%-16s verdict %s\n", it.key().c_str(), it.value()["verdict"].dump().c_str());
}

int execute(const std::string& sub, const Options& o) {
    PipelineConfig cfg;
    try {
        cfg = load(sub, o);
    } catch (const Error& e) {
        std::fprintf(stderr, "hypsub: %s\n", e.what());
        return 2;
    }
    RunReport r = run(cfg);
    try {
        write_report(r, cfg);
    } catch (const Error& e) {
        std::fprintf(stderr, "hypsub: %s\n", e.what());
        return 2;
    }
    if (!o.quiet) {
        summarize(r);
        if (!cfg.out_dir.empty()) std::printf("report: %s/report.json\n", cfg.out_dir.c_str());
    }
    if (r.exit_code != 0) std::fprintf(stderr, "hypsub: %s\n", r.failure.c_str());
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyperbolic codimension-two submanifolds: construction, moduli scans and classification"};
    app.require_subcommand(1);
    Options o;
    const auto add_flags = [&o](CLI::App* c) {
        c->add_option("--config", o.config, "JSON configuration document");
        c->add_option("--out", o.out, "output directory for report, CSV and OBJ files");
        c->add_option("--stage", o.stages, "stage to run (repeatable)");
        c->add_option("--tol-scale", o.tol_scale, "multiplier applied to every tolerance")->check(CLI::PositiveNumber);
        c->add_option("--seed", o.seed, "random seed for randomized probes")->check(CLI::NonNegativeNumber);
        c->add_flag("--quiet", o.quiet, "print nothing on success");
    };
    std::vector<std::pair<std::string, CLI::App*>> subs;
    for (const auto& [name, stage] : kSubcommands)
        subs.emplace_back(name, app.add_subcommand(name, std::string("stages up to ") + to_string(stage)));
    subs.emplace_back("run", app.add_subcommand("run", "full pipeline with the configured stages"));
    for (auto& [name, c] : subs) add_flags(c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    for (auto& [name, c] : subs)
        if (c->parsed()) {
            try {
                return execute(name, o);
            } catch (const Error& e) {
                std::fprintf(stderr, "hypsub: %s\n", e.what());
                return is_numerical(e.kind()) ? 3 : 2;
            } catch (const std::exception& e) {
                std::fprintf(stderr, "hypsub: %s\n", e.what());
                return 3;
            }
        }
    return 2;
}
