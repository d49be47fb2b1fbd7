#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include "sobtrace/config.hpp"

namespace sobtrace {

/// Evaluate fn(i) for i in [0, n) into a vector. Results are stored by index
/// and any reduction is done sequentially by the caller, so the output is
/// identical for every policy and thread count. Exceptions thrown by fn are
/// captured and rethrown on the calling thread.
template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn, ExecPolicy exec)
    -> std::vector<decltype(fn(std::size_t(0)))> {
    using R = decltype(fn(std::size_t(0)));
    std::vector<R> out(n);
    if (exec == ExecPolicy::OpenMP) {
        std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                out[std::size_t(i)] = fn(std::size_t(i));
            } catch (...) {
#pragma omp critical(sobtrace_parallel_map_err)
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    } else {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    }
    return out;
}

} // namespace sobtrace
