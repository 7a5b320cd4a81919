#include "fluxrabi/coupled.hpp"
#include "fluxrabi/fitting.hpp"
#include "fluxrabi/parallel.hpp"

#include <gtest/gtest.h>

#include <stdexcept>

using namespace fluxrabi;

namespace {

class Workers : public ::testing::Test {
protected:
    void SetUp() override {
        saved_ = worker_count();
        set_worker_count(4);
    }
    void TearDown() override { set_worker_count(saved_); }

private:
    int saved_ = 1;
};

}  // namespace

TEST(Linspace, EndpointsAndSpacing) {
    const std::vector<double> g = linspace(0.494, 0.506, 41);
    ASSERT_EQ(g.size(), 41u);
    EXPECT_EQ(g.front(), 0.494);
    EXPECT_EQ(g.back(), 0.506);
    EXPECT_NEAR(g[20], 0.5, 1e-15);
    EXPECT_EQ(linspace(0.3, 0.7, 1), std::vector<double>{0.3});
    EXPECT_TRUE(linspace(0.0, 1.0, 0).empty());
}

TEST_F(Workers, ResultsInGridOrder) {
    const auto out = map_grid(ExecPolicy::parallel, 257, [](std::size_t i) { return 3 * i + 1; });
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], 3 * i + 1);
}

TEST_F(Workers, ExceptionsPropagate) {
    auto fn = [](std::size_t i) -> double {
        if (i == 5) throw std::runtime_error("point 5");
        return double(i);
    };
    for (ExecPolicy p : {ExecPolicy::serial, ExecPolicy::parallel}) {
        try {
            map_grid(p, 16, fn);
            ADD_FAILURE() << "no exception";
        } catch (const std::runtime_error& e) {
            EXPECT_STREQ(e.what(), "point 5");
        }
    }
}

TEST_F(Workers, CircuitLevelsBitIdentical) {
    const std::vector<double> grid = linspace(0.496, 0.504, 9);
    const RawCircuit raw = reference_circuit(350);
    const Eigen::MatrixXd a = circuit_levels(raw, grid, {10, 40}, 8, ExecPolicy::serial);
    const Eigen::MatrixXd b = circuit_levels(raw, grid, {10, 40}, 8, ExecPolicy::parallel);
    EXPECT_EQ(a, b);
}

TEST_F(Workers, QubitSweepAndFitObjectiveBitIdentical) {
    const QubitParams q = qubit_params(derive_circuit(reference_circuit(20)), Gauge::charge);
    const QubitSweep a = sweep_qubit(q, default_qubit_grid(), PlaneWaveBasis::qubit_default(), 6,
                                     ExecPolicy::serial);
    const QubitSweep b = sweep_qubit(q, default_qubit_grid(), PlaneWaveBasis::qubit_default(), 6,
                                     ExecPolicy::parallel);
    EXPECT_EQ(a.energies, b.energies);
    EXPECT_EQ(a.q_ge, b.q_ge);

    FitProblem p;
    p.phix = default_fit_grid();
    p.initial_guess = RabiParams{Gauge::flux, 6.27, 2.14, 282.5, 7.34};
    p.energies = circuit_levels(reference_circuit(350), p.phix, {10, 40}, 4, ExecPolicy::parallel);
    EXPECT_EQ(fit_deviations(p, p.initial_guess, ExecPolicy::serial),
              fit_deviations(p, p.initial_guess, ExecPolicy::parallel));
}
