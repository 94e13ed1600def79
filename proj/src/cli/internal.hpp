#pragma once

#include "qplab/cli.hpp"
#include "qplab/cocycle.hpp"

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

namespace qplab::cli::detail {

/// fn(i) for i in [0, n); results must be written into slot i. Runs
/// sequentially unless MPFR keeps its caches thread-local.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = std::min<std::size_t>(n, hw ? hw : 1);
    if (workers <= 1 || !mpfr_buildopt_tls_p()) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::mutex m;
    std::size_t next = 0;
    std::exception_ptr first_error;
    std::size_t first_error_index = n;
    auto work = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(m);
                if (next >= n) return;
                i = next++;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(m);
                // report the lowest failing index so errors do not depend on scheduling
                if (i < first_error_index) {
                    first_error_index = i;
                    first_error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline cocycle::CocycleKind cocycle_kind(const RunConfig& c, const Real& omega) {
    Bits bits = c.precision_bits;
    Real lambda = lambda_value(c, bits);
    if (c.kind == "amo") return cocycle::CocycleKind::amo(lambda, omega, Real(cf::parse_decimal(c.energy), bits));
    return cocycle::CocycleKind::model(lambda, omega);
}

/// Exact dyadic in [0, 1) from 53 random bits.
inline Real unit_dyadic(std::uint64_t word, Bits bits) {
    return Real(static_cast<long>(word >> 11), bits) * pow2(-53, bits);
}

}  // namespace qplab::cli::detail
