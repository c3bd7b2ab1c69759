#pragma once

// Independent numeric references used by the tests: quadrature/summation
// for divergences, chi-square tails, and finite differences. None of this
// is visible to the library under test.

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "psaws/family.hpp"

namespace oracle {

struct GslQuiet {
    gsl_error_handler_t* old;
    GslQuiet() : old(gsl_set_error_handler_off()) {}
    ~GslQuiet() { gsl_set_error_handler(old); }
};

inline double integrate_support(const std::function<double(double)>& f,
                                double lo, double hi) {
    GslQuiet quiet;
    struct Ctx {
        const std::function<double(double)>* f;
    } ctx{&f};
    gsl_function gf;
    gf.function = [](double x, void* p) {
        return (*static_cast<Ctx*>(p)->f)(x);
    };
    gf.params = &ctx;
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(20000);
    double result = 0, err = 0;
    int status;
    if (std::isinf(lo) && std::isinf(hi))
        status = gsl_integration_qagi(&gf, 1e-10, 1e-9, 20000, ws, &result, &err);
    else if (std::isinf(hi))
        status = gsl_integration_qagiu(&gf, lo, 1e-10, 1e-9, 20000, ws, &result,
                                       &err);
    else
        status = gsl_integration_qags(&gf, lo, hi, 1e-10, 1e-9, 20000, ws,
                                      &result, &err);
    gsl_integration_workspace_free(ws);
    if (status != 0 && status != GSL_EROUND)
        throw std::runtime_error("oracle quadrature failed");
    return result;
}

/// Support of the observation density (not the parameter set).
inline void support_bounds(const psaws::Family& f, double* lo, double* hi) {
    using psaws::FamilyKind;
    switch (f.kind()) {
        case FamilyKind::Gaussian:
        case FamilyKind::GaussianVariance:
            *lo = -INFINITY;
            *hi = INFINITY;
            return;
        case FamilyKind::Pareto:
            *lo = f.nuisance("xm");
            *hi = INFINITY;
            return;
        default:
            *lo = 0.0;
            *hi = INFINITY;
            return;
    }
}

/// KL divergence by adaptive quadrature (continuous) or summation to a
/// 1e-12 tail (discrete).
inline double kl_numeric(const psaws::Family& f, double a, double b) {
    if (f.discrete()) {
        double sum = 0.0, mass = 0.0;
        const double mean = f.mean_map(a);
        long kmax = 10000;
        if (f.kind() == psaws::FamilyKind::Bernoulli) kmax = 1;
        if (f.kind() == psaws::FamilyKind::Binomial)
            kmax = static_cast<long>(f.nuisance("n"));
        for (long k = 0; k <= kmax; ++k) {
            const double y = static_cast<double>(k);
            const double l1 = f.log_density(y, a);
            const double p1 = std::exp(l1);
            sum += p1 * (l1 - f.log_density(y, b));
            mass += p1;
            if (1.0 - mass < 1e-12 && y > 4.0 * mean + 10.0) break;
        }
        return sum;
    }
    double lo, hi;
    support_bounds(f, &lo, &hi);
    return integrate_support(
        [&](double y) {
            const double l1 = f.log_density(y, a);
            const double p1 = std::exp(l1);
            if (p1 == 0.0) return 0.0;
            return p1 * (l1 - f.log_density(y, b));
        },
        lo, hi);
}

inline double chisq1_tail(double z) { return gsl_cdf_chisq_Q(z, 1.0); }
inline double chisq1_tail_quantile(double p) { return gsl_cdf_chisq_Qinv(p, 1.0); }

/// Richardson-extrapolated central second difference.
inline double second_diff(const std::function<double(double)>& f, double x,
                          double h) {
    auto d2 = [&](double step) {
        return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
    };
    const double coarse = d2(h), fine = d2(h / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

inline double first_diff(const std::function<double(double)>& f, double x,
                         double h) {
    auto d1 = [&](double step) { return (f(x + step) - f(x - step)) / (2.0 * step); };
    const double coarse = d1(h), fine = d1(h / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

/// Interesting parameter window per family for randomized checks, safely
/// inside the domain and away from divergent boundaries.
inline std::pair<double, double> theta_window(const psaws::Family& f) {
    using psaws::FamilyKind;
    switch (f.kind()) {
        case FamilyKind::Gaussian: return {-3.0, 3.0};
        case FamilyKind::Pareto: return {1.5, 4.0};
        case FamilyKind::Binomial:
        case FamilyKind::NegativeBinomial:
        case FamilyKind::Bernoulli: return {0.15, 0.85};
        default: return {0.5, 3.0};
    }
}

}  // namespace oracle
