#include "sfdlab/expansion.hpp"
#include "sfdlab/grid_ops.hpp"
#include "sfdlab/scheme.hpp"

namespace sfdlab {

OperatorOrderReport operator_consistency_order(
    const StencilSpec& spec, const TargetPDE& pde,
    const std::function<double(std::span<const double>)>& phi,
    std::span<const Lattice> levels) {
    if (levels.size() < 3)
        throw ValidationError("order fitting needs at least 3 lattice levels");
    if (pde.dim() != spec.dim())
        throw ValidationError("scheme and PDE disagree on dimension");
    if (pde.driver_count() != spec.driver_count())
        throw ValidationError("scheme and PDE disagree on driver count");
    OperatorOrderReport rep;
    for (const Lattice& lat : levels) {
        GridFunction f = GridFunction::sample(
            lat, [&phi](std::span<const double> x) { return phi(x); });
        ExpansionOperators ops(spec, 0, lat);
        GridFunction res = apply_L(spec, 0.0, f);
        res -= ops.apply_Ln(0, 0.0, f);
        rep.h.push_back(lat.spacing());
        rep.residual_norm.push_back(l2h_norm(res));
    }
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < rep.h.size(); ++i)
        pairs.emplace_back(rep.h[i], rep.residual_norm[i]);
    rep.fit = fit_order(pairs);
    return rep;
}

} // namespace sfdlab
