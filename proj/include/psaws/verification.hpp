#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psaws/calibration.hpp"
#include "psaws/design.hpp"
#include "psaws/family.hpp"
#include "psaws/smoother.hpp"

namespace psaws {

/// Piecewise-constant truth split into maximal homogeneity compartments
/// (equality classes of the parameter value). phi[i] is the square root
/// of the smallest divergence from point i's value to any other
/// compartment, +infinity when there is only one compartment.
struct HomogeneityPartition {
    std::vector<int> segment;
    std::vector<double> theta;
    std::vector<double> phi;

    static HomogeneityPartition from_theta(const Family& family,
                                           const std::vector<double>& theta_field);
};

/// Location-weight mass restricted to the own compartment, and its
/// minimum over the neighborhood.
struct EffectiveSamples {
    std::vector<double> n_bar_eff;
    std::vector<double> n_min;
};

EffectiveSamples effective_samples(const Design& design,
                                   const HomogeneityPartition& partition,
                                   const KernelSpec& kloc, double h);

struct VerificationReport {
    std::string check;
    double empirical;
    double bound;
    int reps;
    bool pass;
    std::uint64_t seed;
    bool vacuous = false;
    bool underpowered = false;
    std::string details;
};

/// Exceedance of the scaled divergence of a fixed-weight mean against the
/// 2*exp(-z) bound, at every z in z_grid (three standard errors of slack).
VerificationReport exp_bound_check(const Family& family, double theta,
                                   const std::vector<double>& weights,
                                   const std::vector<double>& z_grid, int reps,
                                   std::uint64_t seed);

/// Root-divergence triangle inequality along random parameter sequences
/// of length m inside the kappa set; a deterministic inequality, so zero
/// violations are allowed.
VerificationReport triangle_lemma_check(const Family& family,
                                        const KappaSet& kappa_set, int m,
                                        int reps, std::uint64_t seed);

struct SeparationScenario {
    Design design;
    std::vector<double> theta_field;
    BandwidthSchedule schedule;
    KernelSpec kloc = KernelSpec::parabola();
    KernelSpec kad = KernelSpec::plateau_triangle();
    int k;               // accuracy event is checked after this step
    std::size_t i1, i2;  // probe points in different compartments
};

/// Conditional on both probe points meeting the accuracy event at step k,
/// the cross weight at step k+1 must be exactly zero whenever the jump
/// clears the realized separation threshold. The threshold uses
/// lambda * K_ad support end, since the weight vanishes only once the
/// penalty leaves the kernel support.
VerificationReport separation_check(const Family& family,
                                    const KappaSet& kappa_set,
                                    const SeparationScenario& scenario,
                                    double lambda, double z, int reps,
                                    std::uint64_t seed);

struct LocalScenario {
    Design design;
    HomogeneityPartition partition;
    BandwidthSchedule schedule;
    KernelSpec kloc = KernelSpec::parabola();
    KernelSpec kad = KernelSpec::plateau_triangle();
    KappaSet kappa_set;  // also used as the projection interval
    double lambda;
    double epsilon;
};

/// Frequency of the uniform accuracy event after step kprime against its
/// theoretical lower bound; per-replication gap conditions are checked
/// against the realized adaptive weight sums.
VerificationReport local_propagation_experiment(const Family& family,
                                                const LocalScenario& scenario,
                                                double z, int kprime, int reps,
                                                std::uint64_t seed);

/// Conditional accuracy-event frequency between steps k1 < k2 against the
/// ratio bound; conditioning is by rejection, at least 200 accepted
/// replications or the report is marked underpowered.
VerificationReport stability_experiment(const Family& family,
                                        const LocalScenario& scenario, double z,
                                        int k1, int k2, int reps,
                                        std::uint64_t seed);

}  // namespace psaws
