#pragma once

// Processor grids, block-matrix descriptors and block-cyclic ownership.

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace redistplan {

using Pid = int;

/// Base class for every domain error raised by the library.
class RedistError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ZeroGridError : public RedistError {
public:
    using RedistError::RedistError;
};

/// Raised when the block grid cannot be tiled evenly. `dimension` names the
/// failing axis ("rows", "cols" or "elements"), `divisor` the required factor.
class DivisibilityError : public RedistError {
public:
    DivisibilityError(std::string dimension, int divisor, const std::string& what)
        : RedistError(what), dimension_(std::move(dimension)), divisor_(divisor) {}

    const std::string& dimension() const noexcept { return dimension_; }
    int divisor() const noexcept { return divisor_; }

private:
    std::string dimension_;
    int divisor_;
};

struct BlockCoord {
    int x = 0;
    int y = 0;
    friend bool operator==(const BlockCoord&, const BlockCoord&) = default;
};

/// A rows x cols processor grid with row-major pid numbering.
struct GridShape {
    int rows = 1;
    int cols = 1;

    int size() const noexcept { return rows * cols; }
    Pid pid(int i, int j) const noexcept { return cols * i + j; }
    int row_of(Pid p) const noexcept { return p / cols; }
    int col_of(Pid p) const noexcept { return p % cols; }

    friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// Parses "RxC" (separator case-insensitive). Throws std::invalid_argument.
GridShape parse_grid(std::string_view text);
/// Canonical lowercase "RxC".
std::string to_string(const GridShape& g);

/// Square matrix of n x n elements cut into NB x NB blocks.
struct BlockDesc {
    int n = 1;
    int nb = 1;

    int nblocks() const noexcept { return nb > 0 ? n / nb : 0; }
    long long block_id(BlockCoord c) const noexcept {
        return static_cast<long long>(c.x) * nblocks() + c.y;
    }

    static BlockDesc from_blocks(int nblocks, int nb = 1) { return {nblocks * nb, nb}; }

    friend bool operator==(const BlockDesc&, const BlockDesc&) = default;
};

struct RedistProblem {
    GridShape src;
    GridShape dst;
    BlockDesc blocks;

    friend bool operator==(const RedistProblem&, const RedistProblem&) = default;
};

int lcm(int a, int b);

/// Owner of block (x, y) under a block-cyclic layout on `g`.
/// Throws std::out_of_range when the coordinate is negative.
Pid block_owner(int x, int y, const GridShape& g);
inline Pid source_owner(int x, int y, const GridShape& p) { return block_owner(x, y, p); }
inline Pid dest_owner(int x, int y, const GridShape& q) { return block_owner(x, y, q); }

/// Bounds-checked variant used where N is known.
Pid block_owner(BlockCoord c, const GridShape& g, int nblocks);

/// Returns the problem unchanged when it is well formed, throws otherwise.
const RedistProblem& validate(const RedistProblem& problem);

}  // namespace redistplan
