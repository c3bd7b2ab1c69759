#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "psaws/calibration.hpp"
#include "psaws/design.hpp"
#include "psaws/family.hpp"
#include "psaws/io.hpp"
#include "psaws/rng.hpp"
#include "psaws/smoother.hpp"
#include "psaws/verification.hpp"

using nlohmann::json;
using namespace psaws;

namespace {

constexpr int kSchemaVersion = 1;

struct FamilyFlags {
    std::string name = "gaussian";
    double sigma = 1.0, p = 2.0, k = 2.0, r = 2.0, xm = 1.0;
    int n = 10;
    bool mean = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--family", name, "family name (see `psaws families`)")
            ->capture_default_str();
        cmd->add_option("--sigma", sigma, "gaussian/lognormal scale")
            ->capture_default_str();
        cmd->add_option("--p", p, "gamma shape")->capture_default_str();
        cmd->add_option("--k", k, "weibull/chisq shape")->capture_default_str();
        cmd->add_option("--r", r, "negative binomial successes")
            ->capture_default_str();
        cmd->add_option("--xm", xm, "pareto scale")->capture_default_str();
        cmd->add_option("--nshape", n, "erlang/binomial count")
            ->capture_default_str();
        cmd->add_flag("--mean", mean,
                      "use the mean parametrization (families with linear "
                      "mean map)");
    }

    Family build() const {
        std::map<std::string, double> nu{{"sigma", sigma}, {"p", p},
                                         {"k", k},         {"r", r},
                                         {"xm", xm},       {"n", double(n)}};
        Family f = Family::by_name(name, nu);
        if (mean || (!f.canonical_mean() && f.linear_mean()))
            f = f.reparametrize();
        return f;
    }
};

struct DesignFlags {
    std::size_t n = 1000;
    std::size_t rows = 0, cols = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--n", n, "1D design length")->capture_default_str();
        cmd->add_option("--rows", rows, "2D design rows");
        cmd->add_option("--cols", cols, "2D design cols");
    }

    Design build() const {
        if (rows > 0 || cols > 0) {
            if (rows == 0 || cols == 0)
                throw CLI::ValidationError("--rows and --cols go together");
            return Design::grid(rows, cols);
        }
        return Design::line(n);
    }
};

struct ScheduleFlags {
    double h0 = 0.9;
    double a = 0.0;  // 0 = 1.25^(1/dim)
    double hmax = 0.0;
    int kstar = -1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--h0", h0, "initial bandwidth")->capture_default_str();
        cmd->add_option("--a", a, "bandwidth growth factor (default 1.25^(1/d))");
        cmd->add_option("--hmax", hmax, "final bandwidth");
        cmd->add_option("--kstar", kstar, "number of iterations (overrides --hmax)");
    }

    BandwidthSchedule build(const Design& design, double default_hmax) const {
        double factor = a > 0 ? a : std::pow(1.25, 1.0 / design.dim());
        if (kstar >= 0) return {h0, factor, kstar};
        double target = hmax > 0 ? hmax : default_hmax;
        return BandwidthSchedule::to_hmax(h0, target, design.dim(), factor);
    }
};

struct KernelFlags {
    std::string lkern = "parabola";
    std::string akern = "plateau";

    void attach(CLI::App* cmd) {
        cmd->add_option("--lkern", lkern, "location kernel")->capture_default_str();
        cmd->add_option("--akern", akern, "adaptation kernel")
            ->capture_default_str();
    }
    KernelSpec loc() const { return KernelSpec::by_name(lkern); }
    KernelSpec ad() const { return KernelSpec::by_name(akern); }
};

std::uint64_t seed_flag_value = 12345;
void attach_seed(CLI::App* cmd) {
    cmd->add_option("--seed", seed_flag_value, "RNG seed")
        ->envname("PSAWS_SEED")
        ->capture_default_str();
}

void emit_json(const std::string& path, const json& j) {
    std::string text = j.dump(2);
    text.push_back('\n');
    if (path.empty() || path == "-")
        std::cout << text;
    else
        io::atomic_write(path, text);
}

json report_json(const VerificationReport& r) {
    return json{{"schema_version", kSchemaVersion},
                {"check", r.check},
                {"empirical", r.empirical},
                {"bound", r.bound},
                {"reps", r.reps},
                {"pass", r.pass},
                {"seed", r.seed},
                {"vacuous", r.vacuous},
                {"underpowered", r.underpowered},
                {"details", r.details}};
}

std::vector<double> theta1_field() {
    std::vector<double> th(1000);
    for (int x = 1; x <= 1000; ++x) {
        double v;
        if (x <= 200) v = 0.0;
        else if (x <= 400) v = 2.0;
        else if (x <= 550) v = -3.0;
        else if (x <= 700) v = -2.5;
        else if (x <= 850) v = -2.0;
        else v = -2.5;
        th[x - 1] = v;
    }
    return th;
}

std::vector<double> theta2_field() {
    std::vector<double> th(1000);
    for (int x = 1; x <= 1000; ++x) {
        double v;
        if (x <= 300) v = x / 300.0;
        else if (x <= 800) v = 4.0 + (x / 100.0 - 5.0) * (x / 100.0 - 5.0) / 2.0;
        else v = 15.0 - 2.0 * x / 100.0;
        th[x - 1] = v;
    }
    return th;
}

void write_isolines_csv(const std::string& path,
                        const std::vector<IsolineRow>& rows) {
    std::ostringstream os;
    os << "k,h,p,z,estimator\n";
    for (const auto& r : rows)
        os << r.k << "," << io::format_double(r.h) << ","
           << io::format_double(r.p) << "," << io::format_double(r.z) << ","
           << r.estimator << "\n";
    io::atomic_write(path, os.str());
}

// ---------------------------------------------------------------------------

int cmd_families(const std::string& output) {
    std::ostringstream os;
    os << "{\"schema_version\":" << kSchemaVersion << ",\"families\":[";
    bool first = true;
    for (const auto& f : Family::catalog()) {
        if (!first) os << ",";
        os << f.describe_json();
        first = false;
    }
    os << "]}\n";
    if (output.empty() || output == "-")
        std::cout << os.str();
    else
        io::atomic_write(output, os.str());
    return 0;
}

struct SmoothArgs {
    FamilyFlags family;
    ScheduleFlags schedule;
    KernelFlags kernels;
    std::string input, format = "csv", output, trace;
    std::vector<double> range{0.0, 1.0};
    double lambda = std::numeric_limits<double>::infinity();
    std::vector<double> project;  // lo hi
};

int cmd_smooth(const SmoothArgs& a) {
    Design design = Design::line(1);
    std::vector<double> data;
    if (a.format == "csv") {
        auto table = io::read_csv(a.input);
        data = table.column("y");
        design = Design::line(data.size());
    } else if (a.format == "matrix") {
        auto m = io::read_matrix_csv(a.input);
        design = Design::grid(m.rows, m.cols);
        data = std::move(m.values);
    } else if (a.format == "pgm") {
        auto m = io::read_pgm(a.input, a.range[0], a.range[1]);
        design = Design::grid(m.rows, m.cols);
        data = std::move(m.values);
    } else {
        throw CLI::ValidationError("--format must be csv, matrix or pgm");
    }

    Family fam = a.family.build();
    SmootherConfig config{fam,
                          a.lambda,
                          a.schedule.build(design, double(design.size())),
                          a.kernels.loc(),
                          a.kernels.ad(),
                          {},
                          1e-8};
    if (!a.project.empty()) {
        if (a.project.size() != 2)
            throw CLI::ValidationError("--project takes lo hi");
        config.projection =
            Family::build_kappa_set(fam, a.project[0], a.project[1]);
    }

    std::ostringstream trace;
    trace << "k,index,theta,n_tilde,n_bar\n";
    StepObserver obs;
    if (!a.trace.empty())
        obs = [&](const SmootherState& st) {
            for (std::size_t i = 0; i < st.theta.size(); ++i)
                trace << st.k << "," << i << ","
                      << io::format_double(st.theta[i]) << ","
                      << io::format_double(st.n_tilde[i]) << ","
                      << io::format_double(st.n_bar[i]) << "\n";
        };

    const auto tvals = statistic_field(fam, data);
    SmootherState final_state = run(config, design, tvals, obs);

    io::Table out;
    out.columns = {"index", "theta", "n_tilde", "n_bar"};
    for (std::size_t i = 0; i < final_state.theta.size(); ++i)
        out.add_row({double(i), final_state.theta[i], final_state.n_tilde[i],
                     final_state.n_bar[i]});
    io::write_csv(a.output, out);
    if (!a.trace.empty()) io::atomic_write(a.trace, trace.str());
    return 0;
}

struct CalibrateArgs {
    FamilyFlags family;
    DesignFlags design;
    ScheduleFlags schedule;
    KernelFlags kernels;
    double theta = 0.0, epsilon = 1e-3;
    int reps = 100;
    std::vector<double> bracket{1.0, 100.0};
    bool honest = false;
    std::string output;
};

int cmd_calibrate(const CalibrateArgs& a) {
    Family fam = a.family.build();
    Design design = a.design.build();
    auto schedule = a.schedule.build(design, 20.0);
    CurveOptions opt;
    opt.reps = a.reps;
    opt.seed = seed_flag_value;
    opt.coupled = !a.honest;
    auto result =
        calibrate_lambda(fam, a.theta, a.epsilon, design, schedule,
                         a.kernels.loc(), a.kernels.ad(), opt, a.bracket[0],
                         a.bracket[1]);
    json trials = json::array();
    for (auto [lambda, ok] : result.trials)
        trials.push_back({{"lambda", lambda}, {"pass", ok}});
    emit_json(a.output, json{{"schema_version", kSchemaVersion},
                             {"family", fam.name()},
                             {"theta", a.theta},
                             {"epsilon", a.epsilon},
                             {"reps", a.reps},
                             {"seed", opt.seed},
                             {"lambda_opt", result.lambda_opt},
                             {"trials", trials}});
    return 0;
}

struct TestpropArgs {
    FamilyFlags family;
    DesignFlags design;
    ScheduleFlags schedule;
    KernelFlags kernels;
    double theta = 0.0, lambda = 10.0;
    int reps = 50;
    bool honest = false;
    std::vector<double> plevels{0.5, 0.05, 0.01, 1e-3, 1e-4};
    std::string output;
};

int cmd_testprop(const TestpropArgs& a) {
    Family fam = a.family.build();
    Design design = a.design.build();
    auto schedule = a.schedule.build(design, 20.0);
    CurveOptions opt;
    opt.reps = a.reps;
    opt.seed = seed_flag_value;
    opt.coupled = !a.honest;
    opt.with_nonadaptive = true;
    auto curve = phat_surface(fam, a.theta, a.lambda, design, schedule,
                              a.kernels.loc(), a.kernels.ad(), opt);
    write_isolines_csv(a.output, emit_isolines(curve, a.plevels));
    return 0;
}

struct VerifyArgs {
    FamilyFlags family;
    std::string check;
    double theta = 0.0;
    int nobs = 10;
    std::vector<double> zgrid{1.0, 2.0, 5.0, 10.0};
    std::vector<double> kappa_interval{-5.0, 5.0};
    int m = 5;
    int reps = 1000;
    // separation / local scenarios
    std::size_t n = 200;
    double theta_left = 0.0, theta_right = 2.0;
    std::size_t jump_at = 100;
    double lambda = 14.6, z = 0.0, epsilon = 0.0, h0 = 0.9;
    int k = 5, kprime = 8, k1 = 3, k2 = 8;
    std::string output;
};

int cmd_verify(const VerifyArgs& a) {
    Family fam = a.family.build();
    VerificationReport report;
    if (a.check == "expbound") {
        std::vector<double> weights(a.nobs, 1.0);
        report = exp_bound_check(fam, a.theta, weights, a.zgrid, a.reps,
                                 seed_flag_value);
    } else if (a.check == "triangle") {
        auto kappa = Family::build_kappa_set(fam, a.kappa_interval[0],
                                             a.kappa_interval[1]);
        report = triangle_lemma_check(fam, kappa, a.m, a.reps, seed_flag_value);
    } else {
        const double z = a.z > 0 ? a.z : 2.0 * std::log(double(a.n));
        const double epsilon =
            a.epsilon > 0 ? a.epsilon : 1.0 / (double(a.n) * double(a.n));
        std::vector<double> field(a.n, a.theta_left);
        for (std::size_t i = a.jump_at; i < a.n; ++i) field[i] = a.theta_right;
        auto kappa = Family::build_kappa_set(fam, a.kappa_interval[0],
                                             a.kappa_interval[1]);
        Design design = Design::line(a.n);
        auto schedule = BandwidthSchedule::to_hmax(a.h0, double(a.n), 1);
        if (a.check == "separation") {
            SeparationScenario sc{design,
                                  field,
                                  schedule,
                                  KernelSpec::parabola(),
                                  KernelSpec::plateau_triangle(),
                                  a.k,
                                  a.jump_at - 1,
                                  a.jump_at};
            report = separation_check(fam, kappa, sc, a.lambda, z, a.reps,
                                      seed_flag_value);
        } else if (a.check == "localprop" || a.check == "stability") {
            LocalScenario sc{design,
                             HomogeneityPartition::from_theta(fam, field),
                             schedule,
                             KernelSpec::parabola(),
                             KernelSpec::plateau_triangle(),
                             kappa,
                             a.lambda,
                             epsilon};
            if (a.check == "localprop")
                report = local_propagation_experiment(fam, sc, z, a.kprime,
                                                      a.reps, seed_flag_value);
            else
                report = stability_experiment(fam, sc, z, a.k1, a.k2, a.reps,
                                              seed_flag_value);
        } else {
            throw CLI::ValidationError(
                "--check must be expbound, triangle, separation, localprop or "
                "stability");
        }
    }
    emit_json(a.output, report_json(report));
    std::cout << report.check << ": " << (report.pass ? "pass" : "FAIL")
              << " (empirical " << report.empirical << ", bound " << report.bound
              << (report.vacuous ? ", vacuous" : "")
              << (report.underpowered ? ", underpowered" : "") << ")\n";
    return report.pass ? 0 : 3;
}

struct DemoArgs {
    std::string name = "theta1";
    double lambda = 0.0;
    std::string output, mse;
};

int cmd_demo(const DemoArgs& a) {
    std::vector<double> truth;
    double lambda = a.lambda;
    if (a.name == "theta1") {
        truth = theta1_field();
        if (lambda == 0.0) lambda = 14.6;
    } else if (a.name == "theta2") {
        truth = theta2_field();
        if (lambda == 0.0) lambda = 16.0;
    } else {
        throw CLI::ValidationError("--name must be theta1 or theta2");
    }
    const std::size_t n = truth.size();
    Design design = Design::line(n);
    Family fam = Family::gaussian(1.0);
    auto schedule = BandwidthSchedule::to_hmax(0.9, 1000.0, 1);
    SmootherConfig config{fam,
                          lambda,
                          schedule,
                          KernelSpec::parabola(),
                          KernelSpec::plateau_triangle(),
                          {},
                          1e-8};

    auto rng = make_stream(seed_flag_value, "demo-" + a.name);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = fam.sample(truth[i], rng);

    io::Table mse;
    mse.columns = {"k", "h", "mse", "mse_interior"};
    SmootherState final_state = run(
        config, design, y, [&](const SmootherState& st) {
            const double h = schedule.at(st.k);
            const auto interior = design.interior_mask(h);
            double sum = 0.0, sum_in = 0.0;
            std::size_t n_in = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = st.theta[i] - truth[i];
                sum += d * d;
                if (interior[i]) {
                    sum_in += d * d;
                    ++n_in;
                }
            }
            mse.add_row({double(st.k), h, sum / double(n),
                         n_in ? sum_in / double(n_in)
                              : std::numeric_limits<double>::quiet_NaN()});
        });

    io::Table est;
    est.columns = {"index", "x", "truth", "y", "theta"};
    for (std::size_t i = 0; i < n; ++i)
        est.add_row({double(i), double(i + 1), truth[i], y[i],
                     final_state.theta[i]});
    if (!a.output.empty()) io::write_csv(a.output, est);
    if (!a.mse.empty()) io::write_csv(a.mse, mse);
    double best = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (const auto& row : mse.rows)
        if (row[2] < best) {
            best = row[2];
            best_k = int(row[0]);
        }
    std::cout << a.name << ": lambda=" << lambda << " kstar=" << schedule.kstar
              << " mse(k=0)=" << mse.rows.front()[2] << " min mse=" << best
              << " at k=" << best_k << " final mse=" << mse.rows.back()[2]
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pointwise adaptive smoothing with propagation-condition "
                 "calibration"};
    app.require_subcommand(1);

    auto* families_cmd = app.add_subcommand("families", "list the family catalog");
    std::string families_output;
    families_cmd->add_option("--output", families_output, "output path (default stdout)");

    SmoothArgs smooth;
    auto* smooth_cmd = app.add_subcommand("smooth", "run the adaptive smoother");
    smooth.family.attach(smooth_cmd);
    smooth.schedule.attach(smooth_cmd);
    smooth.kernels.attach(smooth_cmd);
    attach_seed(smooth_cmd);
    smooth_cmd->add_option("--input", smooth.input, "input data")->required();
    smooth_cmd->add_option("--format", smooth.format,
                           "input format: csv (column y), matrix, pgm")
        ->capture_default_str();
    smooth_cmd->add_option("--range", smooth.range,
                           "pgm value range lo hi")->expected(2);
    smooth_cmd->add_option("--lambda", smooth.lambda,
                           "adaptation bandwidth (inf = non-adaptive)")
        ->capture_default_str();
    smooth_cmd->add_option("--project", smooth.project,
                           "projection interval lo hi")->expected(2);
    smooth_cmd->add_option("--trace", smooth.trace, "per-step trace CSV");
    smooth_cmd->add_option("--output", smooth.output, "estimate CSV")->required();

    CalibrateArgs calibrate;
    auto* cal_cmd =
        app.add_subcommand("calibrate", "search the smallest passing lambda");
    calibrate.family.attach(cal_cmd);
    calibrate.design.attach(cal_cmd);
    calibrate.schedule.attach(cal_cmd);
    calibrate.kernels.attach(cal_cmd);
    attach_seed(cal_cmd);
    cal_cmd->add_option("--theta", calibrate.theta, "homogeneous parameter")
        ->capture_default_str();
    cal_cmd->add_option("--epsilon", calibrate.epsilon, "propagation level")
        ->capture_default_str();
    cal_cmd->add_option("--reps", calibrate.reps, "Monte-Carlo replications")
        ->capture_default_str();
    cal_cmd->add_option("--bracket", calibrate.bracket,
                        "lambda bracket lo hi")->expected(2);
    cal_cmd->add_flag("--honest", calibrate.honest,
                      "simulate at theta even for shift/scale families");
    cal_cmd->add_option("--output", calibrate.output, "JSON output (default stdout)");

    TestpropArgs testprop;
    auto* tp_cmd = app.add_subcommand("testprop", "emit quantile isolines");
    testprop.family.attach(tp_cmd);
    testprop.design.attach(tp_cmd);
    testprop.schedule.attach(tp_cmd);
    testprop.kernels.attach(tp_cmd);
    attach_seed(tp_cmd);
    tp_cmd->add_option("--theta", testprop.theta, "homogeneous parameter")
        ->capture_default_str();
    tp_cmd->add_option("--lambda", testprop.lambda, "adaptation bandwidth")
        ->capture_default_str();
    tp_cmd->add_option("--reps", testprop.reps, "Monte-Carlo replications")
        ->capture_default_str();
    tp_cmd->add_flag("--honest", testprop.honest,
                     "simulate at theta even for shift/scale families");
    tp_cmd->add_option("--plevels", testprop.plevels, "isoline levels");
    tp_cmd->add_option("--output", testprop.output, "isoline CSV")->required();

    VerifyArgs verify;
    auto* ver_cmd = app.add_subcommand("verify", "empirical theory checks");
    verify.family.attach(ver_cmd);
    attach_seed(ver_cmd);
    ver_cmd->add_option("--check", verify.check,
                        "expbound | triangle | separation | localprop | stability")
        ->required();
    ver_cmd->add_option("--theta", verify.theta, "parameter (expbound)")
        ->capture_default_str();
    ver_cmd->add_option("--nobs", verify.nobs, "observations per mean (expbound)")
        ->capture_default_str();
    ver_cmd->add_option("--zgrid", verify.zgrid, "thresholds (expbound)");
    ver_cmd->add_option("--kappa-interval", verify.kappa_interval,
                        "parameter interval lo hi")->expected(2);
    ver_cmd->add_option("--m", verify.m, "sequence length (triangle)")
        ->capture_default_str();
    ver_cmd->add_option("--reps", verify.reps, "replications")
        ->capture_default_str();
    ver_cmd->add_option("--scenario-n", verify.n, "scenario design length")
        ->capture_default_str();
    ver_cmd->add_option("--theta-left", verify.theta_left, "left compartment value")
        ->capture_default_str();
    ver_cmd->add_option("--theta-right", verify.theta_right,
                        "right compartment value")
        ->capture_default_str();
    ver_cmd->add_option("--jump-at", verify.jump_at, "first index of right compartment")
        ->capture_default_str();
    ver_cmd->add_option("--lambda", verify.lambda, "adaptation bandwidth")
        ->capture_default_str();
    ver_cmd->add_option("--z", verify.z, "accuracy threshold (default 2 ln n)");
    ver_cmd->add_option("--epsilon", verify.epsilon,
                        "propagation level (default n^-2)");
    ver_cmd->add_option("--h0", verify.h0, "initial bandwidth")
        ->capture_default_str();
    ver_cmd->add_option("--kcheck", verify.k, "step for the accuracy event (separation)")
        ->capture_default_str();
    ver_cmd->add_option("--kprime", verify.kprime, "final step (localprop)")
        ->capture_default_str();
    ver_cmd->add_option("--k1", verify.k1, "conditioning step (stability)")
        ->capture_default_str();
    ver_cmd->add_option("--k2", verify.k2, "target step (stability)")
        ->capture_default_str();
    ver_cmd->add_option("--output", verify.output, "JSON output (default stdout)");

    DemoArgs demo;
    auto* demo_cmd = app.add_subcommand("demo", "reference 1D demonstrations");
    attach_seed(demo_cmd);
    demo_cmd->add_option("--name", demo.name, "theta1 | theta2")
        ->capture_default_str();
    demo_cmd->add_option("--lambda", demo.lambda,
                         "adaptation bandwidth (default per demo)");
    demo_cmd->add_option("--output", demo.output, "estimate CSV");
    demo_cmd->add_option("--mse", demo.mse, "per-step MSE CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (families_cmd->parsed()) return cmd_families(families_output);
        if (smooth_cmd->parsed()) return cmd_smooth(smooth);
        if (cal_cmd->parsed()) return cmd_calibrate(calibrate);
        if (tp_cmd->parsed()) return cmd_testprop(testprop);
        if (ver_cmd->parsed()) return cmd_verify(verify);
        if (demo_cmd->parsed()) return cmd_demo(demo);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
