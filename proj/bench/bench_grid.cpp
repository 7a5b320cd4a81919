#include "fluxrabi/coupled.hpp"
#include "fluxrabi/fitting.hpp"
#include "fluxrabi/linalg.hpp"
#include "fluxrabi/parallel.hpp"
#include "fluxrabi/perturbation.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

using namespace fluxrabi;

namespace {

template <class Fn>
double seconds(int repeats, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / repeats;
}

template <class Kernel>
void compare(const char* name, int repeats, Kernel&& kernel) {
    decltype(kernel(ExecPolicy::serial)) a, b;
    const double ts = seconds(repeats, [&] { a = kernel(ExecPolicy::serial); });
    const double tp = seconds(repeats, [&] { b = kernel(ExecPolicy::parallel); });
    std::printf("%-28s serial %9.4f s  parallel %9.4f s  speedup %5.2f  identical %s\n", name, ts, tp, ts / tp,
                a == b ? "yes" : "NO");
}

}  // namespace

// Usage: fluxrabi_bench [workers]
int main(int argc, char** argv) {
    set_blas_threads(1);
    if (argc > 1) set_worker_count(std::atoi(argv[1]));
    std::printf("workers: %d\n", worker_count());

    const std::vector<double> grid = default_fit_grid();
    const RawCircuit raw = reference_circuit(350);
    const QubitParams q = qubit_params(derive_circuit(raw), Gauge::flux);

    compare("qubit sweep (41 x 12 lv)", 20, [&](ExecPolicy p) {
        return sweep_qubit(q, grid, PlaneWaveBasis::qubit_default(), 12, p).energies;
    });
    compare("circuit levels (41, 10x40)", 2, [&](ExecPolicy p) {
        return circuit_levels(raw, grid, default_truncation(Gauge::flux), 8, p);
    });

    FitProblem problem;
    problem.phix = grid;
    problem.initial_guess = mapped_parameters(raw).flux;
    problem.energies = circuit_levels(raw, grid, default_truncation(Gauge::flux), 4);
    compare("fit deviations (41 pts)", 50, [&](ExecPolicy p) {
        return fit_deviations(problem, problem.initial_guess, p);
    });
    compare("dispersive shifts (41 pts)", 5, [&](ExecPolicy p) {
        std::vector<double> out;
        for (const DispersiveRow& r : net_dispersive_shift(reference_circuit(20), Gauge::charge, grid, 5, 6, p)) {
            out.push_back(r.delta_g);
            out.push_back(r.delta_e);
        }
        return out;
    });
    return 0;
}
