#include "mrdc/baselines.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mrdc {

ComplexImage zero_filled(const MultiCoilKSpace& s_0, const SensitivityMaps& maps,
                         const SamplingMask& mask) {
    return adjoint_op(s_0, maps, mask);
}

PocsenseResult pocsense_iterate(const MultiCoilKSpace& s_0, const SensitivityMaps& maps,
                                const SamplingMask& mask, int iters, double step) {
    if (iters < 1) throw std::invalid_argument("pocsense_iterate: iters must be >= 1");
    if (step < 0.0 || step > 1.0)
        throw std::invalid_argument("pocsense_iterate: step must be in [0, 1]");

    PocsenseResult result;
    result.residuals.reserve(iters);
    ComplexImage x = zero_filled(s_0, maps, mask);

    for (int it = 0; it < iters; ++it) {
        // Landweber step on ||E x - s_0||^2
        MultiCoilKSpace residual_ksp = forward_op(x, maps, mask);
        for (std::size_t i = 0; i < residual_ksp.data.size(); ++i)
            residual_ksp.data[i] -= s_0.data[i];
        const ComplexImage gradient = adjoint_op(residual_ksp, maps, mask);
        for (std::size_t i = 0; i < x.data.size(); ++i)
            x.data[i] -= step * gradient.data[i];

        // hard consistency projection
        x = dc_combined(x, s_0, maps, mask, 0.0);

        MultiCoilKSpace post = forward_op(x, maps, mask);
        for (std::size_t i = 0; i < post.data.size(); ++i) post.data[i] -= s_0.data[i];
        const double res = norm2(post);
        if (!std::isfinite(res)) {
            std::ostringstream msg;
            msg << "pocsense_iterate: non-finite residual at iteration " << it + 1;
            throw std::runtime_error(msg.str());
        }
        if (!result.residuals.empty()) {
            const double prev = result.residuals.back();
            const double slack = 1e-9 * result.residuals.front() + 1e-12;
            if (res > prev + slack) {
                std::ostringstream msg;
                msg << "pocsense_iterate: residual increased at iteration " << it + 1
                    << " (" << prev << " -> " << res << ")";
                throw std::runtime_error(msg.str());
            }
        }
        result.residuals.push_back(res);
    }
    result.image = std::move(x);
    return result;
}

}  // namespace mrdc
