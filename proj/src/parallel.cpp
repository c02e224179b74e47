#include "premia/parallel.hpp"

#include "premia/errors.hpp"

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

#include <omp.h>

namespace premia {

int worker_count() {
    const char* env = std::getenv("AFFINE_PREMIA_THREADS");
    if (env == nullptr || *env == '\0') return omp_get_max_threads();
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) {
        throw ValidationError(std::string("AFFINE_PREMIA_THREADS must be a positive integer, got '") + env + "'");
    }
    return static_cast<int>(n);
}

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body, Execution exec) {
    if (exec == Execution::serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr first;
    std::mutex mu;
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
}

double pairwise_sum(const double* first, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += first[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(first, half) + pairwise_sum(first + half, n - half);
}

}  // namespace premia
