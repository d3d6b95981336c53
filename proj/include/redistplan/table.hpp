#pragma once

#include <cassert>
#include <span>
#include <vector>

namespace redistplan {

/// Dense row-major 2-D table.
template <class T>
class Table {
public:
    Table() = default;
    Table(int rows, int cols, const T& init = T{})
        : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows) * cols, init) {}

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    T& operator()(int i, int j) noexcept {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return cells_[static_cast<std::size_t>(i) * cols_ + j];
    }
    const T& operator()(int i, int j) const noexcept {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return cells_[static_cast<std::size_t>(i) * cols_ + j];
    }

    std::span<T> row(int i) noexcept { return {cells_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)}; }
    std::span<const T> row(int i) const noexcept {
        return {cells_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
    }

    const std::vector<T>& cells() const noexcept { return cells_; }

    friend bool operator==(const Table&, const Table&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> cells_;
};

}  // namespace redistplan
