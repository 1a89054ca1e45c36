#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

#include "antigone/types.hpp"

namespace antigone::detail {

/// Runs body(i) for i in [0, n). With Execution::parallel the iterations are
/// spread over OpenMP threads (dynamic schedule, since iterations such as
/// training runs have uneven cost); each iteration must write only its own
/// output slot. The exception of the lowest failing index is rethrown, so
/// the reported error does not depend on thread timing.
template <class Body>
void parallel_for(std::size_t n, Execution execution, Body&& body) {
    if (execution == Execution::serial) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    long long error_index = -1;
    std::mutex error_mutex;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (error_index < 0 || i < error_index) {
                error = std::current_exception();
                error_index = i;
            }
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace antigone::detail
