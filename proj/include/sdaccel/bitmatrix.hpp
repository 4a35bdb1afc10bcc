#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace sdaccel {

// Dense 2-D bit matrix, row-major, 64-bit word packed per row.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(uint32_t rows, uint32_t cols)
        : rows_(rows), cols_(cols), wpr_((cols + 63) / 64),
          words_(size_t(rows) * wpr_, 0) {}

    uint32_t rows() const { return rows_; }
    uint32_t cols() const { return cols_; }

    bool get(uint32_t r, uint32_t c) const {
        return (words_[word_index(r, c)] >> (c & 63)) & 1u;
    }
    void set(uint32_t r, uint32_t c, bool v) {
        uint64_t mask = uint64_t(1) << (c & 63);
        if (v)
            words_[word_index(r, c)] |= mask;
        else
            words_[word_index(r, c)] &= ~mask;
    }

    uint64_t popcount() const {
        uint64_t n = 0;
        for (uint64_t w : words_) n += std::popcount(w);
        return n;
    }

    uint64_t row_popcount(uint32_t r) const {
        uint64_t n = 0;
        for (uint32_t w = 0; w < wpr_; ++w) n += std::popcount(words_[size_t(r) * wpr_ + w]);
        return n;
    }

    bool operator==(const BitMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && words_ == o.words_;
    }

    // Copy of the h x w block anchored at (r0, c0).
    BitMatrix sub(uint32_t r0, uint32_t c0, uint32_t h, uint32_t w) const {
        BitMatrix out(h, w);
        for (uint32_t r = 0; r < h; ++r)
            for (uint32_t c = 0; c < w; ++c)
                if (get(r0 + r, c0 + c)) out.set(r, c, true);
        return out;
    }

    // Zero-padded copy with enlarged dimensions.
    BitMatrix padded(uint32_t new_rows, uint32_t new_cols) const {
        BitMatrix out(new_rows, new_cols);
        for (uint32_t r = 0; r < rows_; ++r)
            for (uint32_t c = 0; c < cols_; ++c)
                if (get(r, c)) out.set(r, c, true);
        return out;
    }

private:
    size_t word_index(uint32_t r, uint32_t c) const {
        return size_t(r) * wpr_ + (c >> 6);
    }

    uint32_t rows_ = 0;
    uint32_t cols_ = 0;
    uint32_t wpr_ = 0;
    std::vector<uint64_t> words_;
};

} // namespace sdaccel
