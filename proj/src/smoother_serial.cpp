#include <cmath>
#include <stdexcept>

#include "psaws/smoother.hpp"

// Straight transcriptions of the defining formulas, one candidate j at a
// time over the whole design. Slow on purpose; the parallel kernels in
// smoother.cpp must match these bit for bit.

namespace psaws::serial {

SmootherState nonadaptive_estimate(const Design& design, const KernelSpec& kloc,
                                   const std::vector<double>& tvals, double h) {
    if (tvals.size() != design.size())
        throw std::invalid_argument("smoother: data length != design size");
    const std::size_t n = design.size();
    SmootherState s;
    s.k = 0;
    s.theta.resize(n);
    s.n_tilde.resize(n);
    s.n_bar.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d2 = design.distance2(i, j);
            if (d2 > h * h) continue;
            const double w = kloc(std::sqrt(d2) / h);
            num += w * tvals[j];
            den += w;
        }
        s.theta[i] = num / den;
        s.n_tilde[i] = den;
        s.n_bar[i] = den;
    }
    return s;
}

SmootherState adaptive_step(const SmootherState& prev,
                            const SmootherConfig& config, const Design& design,
                            const std::vector<double>& tvals) {
    if (tvals.size() != design.size())
        throw std::invalid_argument("smoother: data length != design size");
    const std::size_t n = design.size();
    const Family& fam = config.family;
    const double h = config.schedule.at(prev.k + 1);

    std::vector<double> theta_cl(n);
    for (std::size_t i = 0; i < n; ++i)
        theta_cl[i] = fam.clamp_interior(prev.theta[i], config.boundary_delta);

    SmootherState next;
    next.k = prev.k + 1;
    next.theta.resize(n);
    next.n_tilde.resize(n);
    next.n_bar.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double num = 0.0, den = 0.0, nbar = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d2 = design.distance2(i, j);
            if (d2 > h * h) continue;
            const double wloc = config.kloc(std::sqrt(d2) / h);
            nbar += wloc;
            const double s = prev.n_tilde[i] * fam.kl(theta_cl[i], theta_cl[j]);
            const double w = wloc * config.kad(s / config.lambda);
            num += w * tvals[j];
            den += w;
        }
        double est = num / den;
        if (config.projection) est = config.projection->clamp(est);
        next.theta[i] = est;
        next.n_tilde[i] = den;
        next.n_bar[i] = nbar;
    }
    return next;
}

SmootherState run(const SmootherConfig& config, const Design& design,
                  const std::vector<double>& tvals,
                  const StepObserver& observer) {
    SmootherState state = serial::nonadaptive_estimate(design, config.kloc,
                                                        tvals,
                                                        config.schedule.at(0));
    if (config.projection)
        for (double& t : state.theta) t = config.projection->clamp(t);
    if (observer) observer(state);
    for (int k = 1; k <= config.schedule.kstar; ++k) {
        state = serial::adaptive_step(state, config, design, tvals);
        if (observer) observer(state);
    }
    return state;
}

}  // namespace psaws::serial
