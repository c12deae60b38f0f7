#include "support.hpp"

#include <map>
#include <memory>
#include <utility>

namespace hypsub::testing {

SeedFamily named_seed(const std::string& name) {
    if (name == "intersection") return intersection_seed();
    if (name == "separable") return separable_seed();
    if (name == "three_term") return three_term_seed();
    if (name == "wave") return wave_seed();
    if (name == "lambda_zero" || name == "flat") {
        SeparableParams p;
        p.a = {name == "flat" ? 0.0 : 0.6, 0.0};
        p.b = {0.5, 0.0};
        SeedFamily f = separable_seed(p);
        f.label = name;
        return f;
    }
    throw Error(ErrorKind::config, "no test seed named " + name);
}

const Lab& lab(const std::string& name, int nodes) {
    static std::map<std::pair<std::string, int>, std::unique_ptr<Lab>> cache;
    auto& slot = cache[{name, nodes}];
    if (!slot) {
        const Grid2 g = Grid2::box(0, 1, 0, 1, nodes, nodes);
        SeedFamily seed = named_seed(name);
        auto P = std::make_shared<PolarSurface>(build_polar(seed, g, 5));
        ImmersionChart chart = build_chart(P, default_rho(*P));
        ImmersionAnalysis an = analyze(chart, 1e-2);
        SurfaceData S = surface_data(chart, an);
        slot.reset(new Lab{g, std::move(seed), P, std::move(chart), std::move(an), std::move(S)});
    }
    return *slot;
}

}  // namespace hypsub::testing
