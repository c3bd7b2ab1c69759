#include "psaws/smoother.hpp"

#include <cmath>
#include <stdexcept>

namespace psaws {

namespace {

void check_shapes(const Design& design, const std::vector<double>& tvals) {
    if (tvals.size() != design.size())
        throw std::invalid_argument("smoother: data length != design size");
}

void require_canonical(const Family& family) {
    if (!family.canonical_mean())
        throw std::domain_error(
            family.name() +
            ": smoothing needs the mean parametrization; call reparametrize()");
}

// Visits the ball around i in ascending index order. Membership is decided
// on squared distances so all implementations agree on the boundary.
template <typename F>
void for_ball(const Design& design, std::size_t i, double h, F&& fn) {
    const long cols = static_cast<long>(design.cols());
    const long rows = static_cast<long>(design.rows());
    const long r = static_cast<long>(i) / cols, c = static_cast<long>(i) % cols;
    const long m = static_cast<long>(std::floor(h));
    const double h2 = h * h;
    const long r0 = std::max<long>(0, r - m), r1 = std::min(rows - 1, r + m);
    const long c0 = std::max<long>(0, c - m), c1 = std::min(cols - 1, c + m);
    for (long rr = r0; rr <= r1; ++rr)
        for (long cc = c0; cc <= c1; ++cc) {
            const double dr = static_cast<double>(rr - r);
            const double dc = static_cast<double>(cc - c);
            const double d2 = dr * dr + dc * dc;
            if (d2 <= h2)
                fn(static_cast<std::size_t>(rr * cols + cc), std::sqrt(d2));
        }
}

}  // namespace

std::vector<double> statistic_field(const Family& family,
                                    const std::vector<double>& data) {
    std::vector<double> t(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) t[i] = family.statistic(data[i]);
    return t;
}

SmootherState nonadaptive_estimate(const Design& design, const KernelSpec& kloc,
                                   const std::vector<double>& tvals, double h) {
    check_shapes(design, tvals);
    const std::size_t n = design.size();
    SmootherState s;
    s.k = 0;
    s.theta.resize(n);
    s.n_tilde.resize(n);
    s.n_bar.resize(n);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        double num = 0.0, den = 0.0;
        for_ball(design, i, h, [&](std::size_t j, double dist) {
            const double w = kloc(dist / h);
            num += w * tvals[j];
            den += w;
        });
        s.theta[i] = num / den;
        s.n_tilde[i] = den;
        s.n_bar[i] = den;
    }
    return s;
}

double penalty(const SmootherState& prev, const Family& family, std::size_t i,
               std::size_t j, double boundary_delta) {
    const double a = family.clamp_interior(prev.theta[i], boundary_delta);
    const double b = family.clamp_interior(prev.theta[j], boundary_delta);
    return prev.n_tilde[i] * family.kl(a, b);
}

SmootherState adaptive_step(const SmootherState& prev,
                            const SmootherConfig& config, const Design& design,
                            const std::vector<double>& tvals) {
    check_shapes(design, tvals);
    require_canonical(config.family);
    if (!(config.lambda > 0))
        throw std::domain_error("smoother: lambda must be > 0");
    const std::size_t n = design.size();
    const Family& fam = config.family;
    const double h = config.schedule.at(prev.k + 1);
    const double lambda = config.lambda;

    std::vector<double> theta_cl(n);
    for (std::size_t i = 0; i < n; ++i)
        theta_cl[i] = fam.clamp_interior(prev.theta[i], config.boundary_delta);

    SmootherState next;
    next.k = prev.k + 1;
    next.theta.resize(n);
    next.n_tilde.resize(n);
    next.n_bar.resize(n);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const double nt_i = prev.n_tilde[i];
        const double th_i = theta_cl[i];
        double num = 0.0, den = 0.0, nbar = 0.0;
        for_ball(design, i, h, [&](std::size_t j, double dist) {
            const double wloc = config.kloc(dist / h);
            nbar += wloc;
            const double s = nt_i * fam.kl(th_i, theta_cl[j]);
            const double w = wloc * config.kad(s / lambda);
            num += w * tvals[j];
            den += w;
        });
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
    require_canonical(config.family);
    SmootherState state = nonadaptive_estimate(design, config.kloc, tvals,
                                               config.schedule.at(0));
    if (config.projection)
        for (double& t : state.theta) t = config.projection->clamp(t);
    if (observer) observer(state);
    for (int k = 1; k <= config.schedule.kstar; ++k) {
        state = adaptive_step(state, config, design, tvals);
        if (observer) observer(state);
    }
    return state;
}

double fitted_loglik_identity_check(const Design& design, const Family& family,
                                    const std::vector<double>& data, double h,
                                    double theta) {
    check_shapes(design, data);
    const std::vector<double> tvals = statistic_field(family, data);
    const KernelSpec kloc = KernelSpec::parabola();
    const SmootherState bar = nonadaptive_estimate(design, kloc, tvals, h);
    double worst = 0.0;
    for (std::size_t i = 0; i < design.size(); ++i) {
        double lhs = 0.0;
        for_ball(design, i, h, [&](std::size_t j, double dist) {
            const double w = kloc(dist / h);
            lhs += w * (family.log_density(data[j], bar.theta[i]) -
                        family.log_density(data[j], theta));
        });
        const double rhs = bar.n_bar[i] * family.kl(bar.theta[i], theta);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

}  // namespace psaws
