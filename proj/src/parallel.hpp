#pragma once

#include <cstddef>
#include <exception>
#include <limits>

namespace tlsph::detail {

/// Runs body(i) for i in [0, n) across OpenMP threads. If any iteration throws,
/// the exception from the lowest failing index is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    std::exception_ptr error;
    std::size_t error_index = std::numeric_limits<std::size_t>::max();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical(tlsph_parallel_error)
            {
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace tlsph::detail
