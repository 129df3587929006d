#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace epinet::nn {

namespace detail {

inline constexpr int kColBlock = 32;
inline constexpr int kRowBlock = 8;

template <int Rows, typename T>
inline void gemm_block(int k_dim, const T* a, int lda, const T* b, int ldb, T* c, int ldc, const T* bias,
                       int width) {
    T acc[Rows][kColBlock];
    for (int r = 0; r < Rows; ++r) {
        const T init = bias ? bias[r] : T{};
        for (int j = 0; j < kColBlock; ++j) acc[r][j] = init;
    }
    for (int k = 0; k < k_dim; ++k) {
        const T* brow = b + static_cast<std::size_t>(k) * ldb;
        for (int r = 0; r < Rows; ++r) {
            const T av = a[static_cast<std::size_t>(r) * lda + k];
            for (int j = 0; j < kColBlock; ++j) acc[r][j] = std::fma(av, brow[j], acc[r][j]);
        }
    }
    for (int r = 0; r < Rows; ++r)
        for (int j = 0; j < width; ++j) c[static_cast<std::size_t>(r) * ldc + j] = acc[r][j];
}

template <typename T>
inline void gemm_columns(int m, int k_dim, const T* a, int lda, const T* b, int ldb, T* c, int ldc, const T* bias,
                         int width) {
    int row = 0;
    for (; row + kRowBlock <= m; row += kRowBlock) {
        gemm_block<kRowBlock>(k_dim, a + static_cast<std::size_t>(row) * lda, lda, b, ldb,
                              c + static_cast<std::size_t>(row) * ldc, ldc, bias ? bias + row : nullptr, width);
    }
    for (; row + 4 <= m; row += 4) {
        gemm_block<4>(k_dim, a + static_cast<std::size_t>(row) * lda, lda, b, ldb,
                      c + static_cast<std::size_t>(row) * ldc, ldc, bias ? bias + row : nullptr, width);
    }
    for (; row < m; ++row) {
        gemm_block<1>(k_dim, a + static_cast<std::size_t>(row) * lda, lda, b, ldb,
                      c + static_cast<std::size_t>(row) * ldc, ldc, bias ? bias + row : nullptr, width);
    }
}

}  // namespace detail

/// C = A * B (+ bias per row). A is m x k (row stride lda), B is k x n (ldb),
/// C is m x n (ldc), all row-major.
///
/// Every output element is a single fused multiply-add chain over k in
/// ascending order, seeded with its bias. The result for a given element is
/// therefore bitwise independent of m, n and of its position in the matrix,
/// which is what makes tiled and whole-image inference agree exactly.
template <typename T>
void gemm(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc, const T* bias = nullptr) {
    using detail::kColBlock;
    int col = 0;
    for (; col + kColBlock <= n; col += kColBlock) {
        detail::gemm_columns(m, k, a, lda, b + col, ldb, c + col, ldc, bias, kColBlock);
    }
    if (col < n) {
        const int rest = n - col;
        std::vector<T> panel(static_cast<std::size_t>(k) * kColBlock, T{});
        for (int kk = 0; kk < k; ++kk)
            std::copy_n(b + static_cast<std::size_t>(kk) * ldb + col, rest,
                        panel.data() + static_cast<std::size_t>(kk) * kColBlock);
        detail::gemm_columns(m, k, a, lda, panel.data(), kColBlock, c + col, ldc, bias, rest);
    }
}

/// out (cols x rows) = transpose of in (rows x cols), both dense row-major.
template <typename T>
void transpose_into(int rows, int cols, const T* in, T* out) {
    constexpr int kTile = 32;
    for (int r0 = 0; r0 < rows; r0 += kTile)
        for (int c0 = 0; c0 < cols; c0 += kTile)
            for (int r = r0; r < std::min(rows, r0 + kTile); ++r)
                for (int c = c0; c < std::min(cols, c0 + kTile); ++c)
                    out[static_cast<std::size_t>(c) * rows + r] = in[static_cast<std::size_t>(r) * cols + c];
}

}  // namespace epinet::nn
