#include "fluxrabi/fitting.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace fluxrabi;

namespace {

FitProblem synthetic(const RabiParams& truth, int levels, double scale = 1.0) {
    FitProblem p;
    p.phix = default_fit_grid();
    p.levels_included = levels;
    p.model_variant = truth.variant;
    p.energies.resize(static_cast<Eigen::Index>(p.phix.size()), levels + 1);
    for (size_t i = 0; i < p.phix.size(); ++i) {
        const RabiSpectrum s =
            diagonalize_rabi(truth, truth.epsilon(p.phix[i]), default_fock_size(truth), levels + 1);
        p.energies.row(static_cast<Eigen::Index>(i)) = scale * s.energies.transpose();
    }
    p.initial_guess = truth;
    p.initial_guess.omega *= 1.01;
    p.initial_guess.Delta_q *= 0.98;
    p.initial_guess.g *= 1.03;
    p.initial_guess.Ip *= 1.005;
    return p;
}

void expect_relative(const RabiParams& a, const RabiParams& b, double tol) {
    EXPECT_NEAR(a.omega / b.omega, 1.0, tol);
    EXPECT_NEAR(a.Delta_q / b.Delta_q, 1.0, tol);
    EXPECT_NEAR(a.g / b.g, 1.0, tol);
    EXPECT_NEAR(a.Ip / b.Ip, 1.0, tol);
}

struct CircuitCase {
    MappedParams mapped;
    Eigen::MatrixXd levels;
};

const CircuitCase& circuit_case(double Lc) {
    static std::map<double, CircuitCase> cache;
    auto it = cache.find(Lc);
    if (it == cache.end()) {
        const RawCircuit raw = reference_circuit(Lc);
        CircuitCase c{mapped_parameters(raw),
                      circuit_levels(raw, default_fit_grid(), default_truncation(Gauge::flux), 4)};
        it = cache.emplace(Lc, std::move(c)).first;
    }
    return it->second;
}

FitProblem circuit_problem(double Lc, Gauge variant) {
    const CircuitCase& c = circuit_case(Lc);
    return circuit_fit_problem(c.mapped, variant, 3, default_fit_grid(), c.levels);
}

}  // namespace

TEST(FitSetup, TransitionSets) {
    const auto three = fit_transitions(3);
    ASSERT_EQ(three.size(), 5u);
    EXPECT_EQ(three[3], std::make_pair(1, 2));
    EXPECT_EQ(three[4], std::make_pair(1, 3));
    EXPECT_EQ(fit_transitions(7).size(), 7u);
    EXPECT_EQ(default_fit_grid().size(), 41u);
    EXPECT_DOUBLE_EQ(default_fit_grid().front(), 0.494);
}

TEST(FitSetup, Validation) {
    const RabiParams truth{Gauge::flux, 6.0, 1.2, 281.0, 0.4};
    FitProblem p = synthetic(truth, 3);
    EXPECT_NO_THROW(p.validate());
    FitProblem few = p;
    few.phix.resize(3);
    few.energies.conservativeResize(3, Eigen::NoChange);
    EXPECT_THROW(few.validate(), std::invalid_argument);
    FitProblem shape = p;
    shape.energies.conservativeResize(Eigen::NoChange, 3);
    EXPECT_THROW(shape.validate(), std::invalid_argument);
    FitProblem neg = p;
    neg.energies(5, 1) = neg.energies(5, 0) - 1.0;
    EXPECT_THROW(neg.validate(), std::invalid_argument);
    FitProblem w = p;
    w.weights = {1.0, 2.0};
    EXPECT_THROW(w.validate(), std::invalid_argument);
    FitProblem v = p;
    v.model_variant = Gauge::charge;
    EXPECT_THROW(fit(v), std::invalid_argument);
}

TEST(SelfFit, FluxVariantRoundTrip) {
    const RabiParams truth{Gauge::flux, 6.03, 1.24, 281.3, 0.424};
    const FitResult r = fit(synthetic(truth, 3));
    expect_relative(r.params, truth, 1e-6);
    EXPECT_LT(r.residual, 1e-12);
    EXPECT_TRUE(r.converged);
    EXPECT_GT(r.iterations, 0);
}

TEST(SelfFit, ChargeVariantRoundTrip) {
    const RabiParams truth{Gauge::charge, 6.085, 1.238, 281.3, 0.09};
    const FitResult r = fit_charge_variant(synthetic(truth, 3));
    EXPECT_EQ(r.params.variant, Gauge::charge);
    expect_relative(r.params, truth, 1e-6);
    EXPECT_LT(r.residual, 1e-12);
}

TEST(SelfFit, DeepStrongRoundTripWithSevenLevels) {
    const RabiParams truth{Gauge::flux, 6.06, 2.13, 282.2, 7.56};
    const FitResult r = fit(synthetic(truth, 7));
    expect_relative(r.params, truth, 1e-6);
    EXPECT_LT(r.residual, 1e-12);
}

TEST(SelfFit, InsensitiveToTinyRescaling) {
    const RabiParams truth{Gauge::flux, 6.03, 1.24, 281.3, 0.424};
    const FitResult lo = fit(synthetic(truth, 3, 1.0 - 1e-9));
    const FitResult hi = fit(synthetic(truth, 3, 1.0 + 1e-9));
    expect_relative(lo.params, hi.params, 1e-6);
}

TEST(SelfFit, Deterministic) {
    const RabiParams truth{Gauge::flux, 6.03, 1.24, 281.3, 0.424};
    const FitProblem p = synthetic(truth, 3);
    const FitResult a = fit(p, {}, ExecPolicy::parallel);
    const FitResult b = fit(p, {}, ExecPolicy::parallel);
    const FitResult c = fit(p, {}, ExecPolicy::serial);
    for (const FitResult* o : {&b, &c}) {
        EXPECT_EQ(a.params.omega, o->params.omega);
        EXPECT_EQ(a.params.Delta_q, o->params.Delta_q);
        EXPECT_EQ(a.params.g, o->params.g);
        EXPECT_EQ(a.params.Ip, o->params.Ip);
        EXPECT_EQ(a.residual, o->residual);
        EXPECT_EQ(a.iterations, o->iterations);
    }
}

TEST(SelfFit, ResidualCountsOnlyGroundTransitions) {
    const RabiParams truth{Gauge::flux, 6.03, 1.24, 281.3, 0.424};
    FitProblem p = synthetic(truth, 3);
    RabiParams off = truth;
    off.omega += 0.001;
    // shifting omega by 1 MHz moves omega_0i by ~i MHz at small coupling
    const double r = residual_mhz2(p, off);
    EXPECT_GT(r, 1.0);
    EXPECT_LT(r, 9.0);
    const Eigen::MatrixXd d = fit_deviations(p, truth);
    EXPECT_EQ(d.cols(), 5);
    EXPECT_LT(d.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CircuitFit, SmallCouplingMatchesMapping) {
    const FitResult r = fit(circuit_problem(20, Gauge::flux));
    const RabiParams& m = circuit_case(20).mapped.flux;
    EXPECT_NEAR(r.params.omega / m.omega, 1.0, 0.015);
    EXPECT_NEAR(r.params.Delta_q / m.Delta_q, 1.0, 0.015);
    EXPECT_NEAR(r.params.g / m.g, 1.0, 0.015);
    EXPECT_NEAR(r.params.Ip / m.Ip, 1.0, 0.015);
    EXPECT_NEAR(r.params.g, 0.430, 0.0043);
    EXPECT_LT(r.residual, 1.0);
}

TEST(CircuitFit, DeepStrongFitAndMappingGap) {
    const FitResult r = fit(circuit_problem(350, Gauge::flux));
    EXPECT_NEAR(r.params.omega, 6.064, 0.02 * 6.064);
    EXPECT_NEAR(r.params.Delta_q, 2.388, 0.02 * 2.388);
    EXPECT_NEAR(r.params.g, 7.822, 0.02 * 7.822);
    EXPECT_NEAR(r.params.Ip, 282.9, 0.02 * 282.9);
    EXPECT_LE(r.residual, 25.0);
    EXPECT_NEAR(r.params.g - circuit_case(350).mapped.flux.g, 0.48, 0.1);
}

TEST(CircuitFit, ChargeVariantFitsWorse) {
    const FitProblem p = circuit_problem(20, Gauge::flux);
    const FitResult f = fit(p);
    const FitResult c = fit_charge_variant(circuit_problem(20, Gauge::charge));
    EXPECT_GT(c.residual, 10.0 * f.residual);
    // the charge variant misses the extremum of omega_02 at the symmetry point
    const Eigen::MatrixXd df = fit_deviations(p, f.params);
    FitProblem pc = p;
    pc.model_variant = Gauge::charge;
    const Eigen::MatrixXd dc = fit_deviations(pc, c.params);
    EXPECT_GT(std::abs(dc(20, 1)), 5.0 * std::abs(df(20, 1)));
}

TEST(CircuitFit, DecoupledCircuit) {
    const RawCircuit raw = reference_circuit(0);
    const MappedParams m = mapped_parameters(raw);
    EXPECT_EQ(m.flux.g, 0.0);
    const Eigen::MatrixXd lv = circuit_levels(raw, default_fit_grid(), {10, 40}, 4);
    const FitProblem p = circuit_fit_problem(m, Gauge::flux, 3, default_fit_grid(), lv);
    EXPECT_LT(residual_mhz2(p, m.flux), 1.0);
    const FitResult r = fit(p);
    EXPECT_LT(r.residual, 1.0);
    EXPECT_LT(r.params.g, 0.01);
}

TEST(CircuitFit, SweepRowsAndFailures) {
    const std::vector<SweepFitRow> rows = sweep_fit({0.0, 20.0, 900.0}, 3);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_FALSE(rows[0].failed);
    EXPECT_FALSE(rows[1].failed);
    EXPECT_NEAR(rows[1].fitted.params.g, 0.430, 0.0043);
    // Lc = 900 pH leaves L1 = -100 pH
    EXPECT_TRUE(rows[2].failed);
}
