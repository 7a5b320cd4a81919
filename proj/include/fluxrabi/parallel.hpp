#pragma once

// Grid-parallel map used by every sweep in the library. Each grid point is an
// independent pure computation; results land in grid order so the parallel
// and serial paths produce identical output.

#include <cstddef>
#include <exception>
#include <type_traits>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fluxrabi {

enum class ExecPolicy { serial, parallel };

/// Sets the OpenMP worker count used by ExecPolicy::parallel (n <= 0 keeps the default).
inline void set_worker_count(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

inline int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Serial reference: evaluates fn(i) for i in [0, n) in order.
template <class Fn>
auto map_grid_serial(std::size_t n, Fn&& fn) {
    using R = std::decay_t<std::invoke_result_t<Fn&, std::size_t>>;
    std::vector<R> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
    return out;
}

/// OpenMP kernel: evaluates fn(i) concurrently, storing results by index.
/// The first exception thrown by any point is rethrown after the loop.
template <class Fn>
auto map_grid_parallel(std::size_t n, Fn&& fn) {
    using R = std::decay_t<std::invoke_result_t<Fn&, std::size_t>>;
    std::vector<R> out(n);
    std::exception_ptr error;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(fluxrabi_map_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

template <class Fn>
auto map_grid(ExecPolicy policy, std::size_t n, Fn&& fn) {
    if (policy == ExecPolicy::serial) return map_grid_serial(n, std::forward<Fn>(fn));
    return map_grid_parallel(n, std::forward<Fn>(fn));
}

/// Uniform grid of `points` values from start to stop inclusive.
inline std::vector<double> linspace(double start, double stop, std::size_t points) {
    std::vector<double> out(points);
    if (points == 0) return out;
    if (points == 1) {
        out[0] = start;
        return out;
    }
    const double step = (stop - start) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) out[i] = start + step * static_cast<double>(i);
    out.back() = stop;
    return out;
}

}  // namespace fluxrabi
