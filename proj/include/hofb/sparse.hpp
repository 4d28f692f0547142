#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "hofb/errors.hpp"

namespace hb {

using Complex = std::complex<double>;

/// CSR index structure, shared between Hamiltonians that differ only in values
/// (one sweep re-assembles H(B) hundreds of times on the same pattern).
struct SparsePattern {
    std::size_t dim = 0;
    std::vector<std::int64_t> row_offsets; // size dim+1
    std::vector<std::int32_t> col_indices; // per-row strictly increasing
};

/// Compressed sparse Hermitian matrix in eV.
struct SparseHermitian {
    std::shared_ptr<const SparsePattern> pattern;
    std::vector<Complex> values;

    std::size_t dim() const { return pattern ? pattern->dim : 0; }
    std::size_t nnz() const { return values.size(); }

    /// y = H x
    void matvec(const Complex* x, Complex* y) const {
        const auto& p = *pattern;
        for (std::size_t r = 0; r < p.dim; ++r) {
            Complex acc{0.0, 0.0};
            const auto end = p.row_offsets[r + 1];
            for (auto k = p.row_offsets[r]; k < end; ++k)
                acc += values[k] * x[p.col_indices[k]];
            y[r] = acc;
        }
    }

    void matvec(const std::vector<Complex>& x, std::vector<Complex>& y) const {
        y.resize(dim());
        matvec(x.data(), y.data());
    }

    /// Structural Hermiticity check: every (n,m) entry equals conj((m,n)) and
    /// diagonal entries are real.
    bool is_hermitian(double tol = 0.0) const {
        const auto& p = *pattern;
        for (std::size_t r = 0; r < p.dim; ++r) {
            for (auto k = p.row_offsets[r]; k < p.row_offsets[r + 1]; ++k) {
                const auto c = static_cast<std::size_t>(p.col_indices[k]);
                if (c == r) {
                    if (std::abs(values[k].imag()) > tol) return false;
                    continue;
                }
                bool found = false;
                for (auto j = p.row_offsets[c]; j < p.row_offsets[c + 1]; ++j) {
                    if (static_cast<std::size_t>(p.col_indices[j]) == r) {
                        if (std::abs(values[j] - std::conj(values[k])) > tol)
                            return false;
                        found = true;
                        break;
                    }
                }
                if (!found) return false;
            }
        }
        return true;
    }
};

} // namespace hb
