#pragma once

#include <lapacke.h>

#include <cstddef>
#include <vector>

#include "logtrap/errors.hpp"

namespace logtrap::detail {

struct TridiagEigen {
    std::vector<double> values;            // m lowest eigenvalues, ascending
    std::vector<std::vector<double>> vectors; // vectors[k][i], unit 2-norm
};

// Lowest m eigenpairs of the symmetric tridiagonal matrix with the given
// diagonal and off-diagonal (LAPACK dstevr, MRRR).
inline TridiagEigen lowest_eigenpairs(std::vector<double> diag, std::vector<double> off, int m) {
    const int n = static_cast<int>(diag.size());
    if (m < 1 || m > n) throw parameter_error("lowest_eigenpairs: bad m");
    if (static_cast<int>(off.size()) != n - 1)
        throw parameter_error("lowest_eigenpairs: off-diagonal size mismatch");
    std::vector<double> w(n), z(static_cast<std::size_t>(n) * m);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(m));
    lapack_int found = 0;
    const lapack_int info =
        LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(),
                       0.0, 0.0, 1, m, 0.0, &found, w.data(), z.data(), n, isuppz.data());
    if (info != 0 || found != m)
        throw std::runtime_error("lowest_eigenpairs: dstevr failed");
    TridiagEigen out;
    out.values.assign(w.begin(), w.begin() + m);
    out.vectors.resize(m);
    for (int k = 0; k < m; ++k)
        out.vectors[k].assign(z.begin() + static_cast<std::size_t>(k) * n,
                              z.begin() + static_cast<std::size_t>(k + 1) * n);
    return out;
}

} // namespace logtrap::detail
