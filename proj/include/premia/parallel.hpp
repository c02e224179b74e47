#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace premia {

enum class Execution { serial, parallel };

/// Worker cap: AFFINE_PREMIA_THREADS when set to a positive integer, else the
/// OpenMP default. ValidationError for a malformed value.
int worker_count();

/// Runs body(i) for i in [0, n). The parallel variant uses OpenMP with
/// worker_count() threads; the first exception thrown by any body is
/// rethrown on the calling thread after the loop.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body,
                    Execution exec = Execution::parallel);

/// Pairwise (cascade) sum. The result depends only on the order of the
/// input, never on how it was produced.
double pairwise_sum(const double* first, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace premia
