#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "psaws/design.hpp"
#include "psaws/family.hpp"

namespace psaws {

/// Per-point estimates and weight sums after iteration k. theta holds the
/// adaptive estimates, n_tilde the adaptive weight sums and n_bar the
/// location-only weight sums at the step's bandwidth.
struct SmootherState {
    int k = 0;
    std::vector<double> theta;
    std::vector<double> n_tilde;
    std::vector<double> n_bar;
};

struct SmootherConfig {
    Family family;
    double lambda;  // infinity disables adaptation
    BandwidthSchedule schedule;
    KernelSpec kloc = KernelSpec::parabola();
    KernelSpec kad = KernelSpec::plateau_triangle();
    std::optional<KappaSet> projection;
    double boundary_delta = 1e-8;
};

using StepObserver = std::function<void(const SmootherState&)>;

/// T(Y_j) for a whole data vector.
std::vector<double> statistic_field(const Family& family,
                                    const std::vector<double>& data);

/// Location-kernel weighted means of a statistic field at bandwidth h.
/// Returns a state with k = 0 and n_tilde = n_bar.
SmootherState nonadaptive_estimate(const Design& design, const KernelSpec& kloc,
                                   const std::vector<double>& tvals, double h);

/// Statistical penalty of the previous state, anchored at i.
double penalty(const SmootherState& prev, const Family& family, std::size_t i,
               std::size_t j, double boundary_delta = 1e-8);

/// One iteration: step-(prev.k + 1) weights from step-prev.k estimates.
SmootherState adaptive_step(const SmootherState& prev,
                            const SmootherConfig& config, const Design& design,
                            const std::vector<double>& tvals);

/// Full run over the bandwidth schedule; the observer (if any) sees every
/// state, including the initialization.
SmootherState run(const SmootherConfig& config, const Design& design,
                  const std::vector<double>& tvals,
                  const StepObserver& observer = {});

/// Largest pointwise residual of the identity between the fitted
/// log-likelihood of the weighted mean and the scaled divergence to a
/// reference parameter. Near zero for canonical-mean families.
double fitted_loglik_identity_check(const Design& design, const Family& family,
                                    const std::vector<double>& data, double h,
                                    double theta);

/// Literal per-definition implementations, kept as the reference the
/// parallel kernels are tested against (bitwise).
namespace serial {
SmootherState nonadaptive_estimate(const Design& design, const KernelSpec& kloc,
                                   const std::vector<double>& tvals, double h);
SmootherState adaptive_step(const SmootherState& prev,
                            const SmootherConfig& config, const Design& design,
                            const std::vector<double>& tvals);
SmootherState run(const SmootherConfig& config, const Design& design,
                  const std::vector<double>& tvals,
                  const StepObserver& observer = {});
}  // namespace serial

}  // namespace psaws
