#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "psaws/design.hpp"
#include "psaws/family.hpp"
#include "psaws/smoother.hpp"

namespace psaws {

/// Monte-Carlo exceedance surface under a homogeneous model: phat[k][zi]
/// is the average fraction of interior design points whose scaled
/// divergence from the truth exceeds z_grid[zi] after iteration k.
struct PropagationCurve {
    std::string family;
    double theta;
    double lambda;
    std::uint64_t seed;
    int reps;
    bool coupled;                 // simulated in standardized space
    std::size_t n0;               // interior point count
    std::size_t design_rows, design_cols;
    std::vector<double> z_grid;   // ascending
    std::vector<double> h_grid;   // bandwidth per iteration
    std::vector<std::vector<double>> phat;        // [k][zi]
    std::vector<std::vector<double>> phat_nonad;  // same with adaptation off
    // Raw per-replication exceedance counts, [k][rep * nz + zi]; kept for
    // bootstrap error bars and replication statistics.
    std::vector<std::vector<std::uint32_t>> counts;
    std::vector<std::vector<std::uint32_t>> counts_nonad;

    int kmax() const { return static_cast<int>(phat.size()) - 1; }
    double resolution() const {
        return 1.0 / (static_cast<double>(reps) * static_cast<double>(n0));
    }
};

struct CurveOptions {
    int reps = 100;
    std::uint64_t seed = 12345;
    /// Simulate shift/scale families at a standardized base parameter (the
    /// surface is then exactly parameter-free). When false, or when the
    /// family has no such structure, simulate at the requested theta.
    bool coupled = true;
    bool with_nonadaptive = false;
    int z_points = 200;
    double z_lo = 1e-3, z_hi = 50.0;
};

PropagationCurve phat_surface(const Family& family, double theta, double lambda,
                              const Design& design,
                              const BandwidthSchedule& schedule,
                              const KernelSpec& kloc, const KernelSpec& kad,
                              const CurveOptions& opt);

struct Quantile {
    double z;
    bool below_resolution;  // p under 1/(reps*n0), value unstable
};

/// Smallest z on the grid with phat(k, z) <= p, log-interpolated in z.
Quantile z_quantile(const PropagationCurve& curve, int k, double p);

struct PropagationCheck {
    struct Violation {
        int k;       // quantile rose from step k to k+1
        double p;
        double dz;   // amount above the allowed slack
    };
    bool holds;
    std::vector<Violation> violations;
    double p_floor;  // smallest probability level examined
};

/// Non-increasing-quantile check over a probability grid in (epsilon, 1),
/// with two bootstrap standard errors of slack per comparison. Quantile
/// growth is measured relative to the non-adaptive surface on the same
/// data, which cancels the discrete-grid fluctuation of the location
/// kernel's effective variance; the curve must be built with
/// with_nonadaptive = true.
PropagationCheck check_propagation(const PropagationCurve& curve,
                                   double epsilon);

struct CalibrationResult {
    double lambda_opt;
    std::vector<std::pair<double, bool>> trials;  // (lambda, check passed)
};

/// Bisection for the smallest lambda passing check_propagation, to 1%
/// relative bracket width. All surfaces reuse the same seed.
CalibrationResult calibrate_lambda(const Family& family, double theta,
                                   double epsilon, const Design& design,
                                   const BandwidthSchedule& schedule,
                                   const KernelSpec& kloc,
                                   const KernelSpec& kad,
                                   const CurveOptions& opt, double lo,
                                   double hi);

struct InvarianceReport {
    std::vector<PropagationCurve> curves;   // one per theta
    double max_discrepancy;                 // over theta pairs, k and z
    std::vector<double> eps_levels;         // epsilon_lambda(theta) per theta
};

InvarianceReport invariance_report(const Family& family,
                                   const std::vector<double>& thetas,
                                   double lambda, const Design& design,
                                   const BandwidthSchedule& schedule,
                                   const KernelSpec& kloc,
                                   const KernelSpec& kad,
                                   const CurveOptions& opt);

struct IsolineRow {
    int k;
    double h;
    double p;
    double z;
    const char* estimator;  // "adaptive" or "nonadaptive"
};

/// Quantile isolines for plotting; needs a curve built with
/// with_nonadaptive = true.
std::vector<IsolineRow> emit_isolines(const PropagationCurve& curve,
                                      const std::vector<double>& p_levels);

}  // namespace psaws
