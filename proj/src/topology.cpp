#include "redistplan/topology.hpp"

#include <cctype>
#include <charconv>
#include <numeric>

namespace redistplan {

namespace {

int parse_positive(std::string_view s, std::string_view whole) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || v < 1)
        throw std::invalid_argument("invalid grid '" + std::string(whole) + "', expected RxC");
    return v;
}

void require_divisible(int nblocks, int divisor, const char* dimension, const char* what) {
    if (nblocks % divisor != 0) {
        throw DivisibilityError(dimension, divisor,
                                "N=" + std::to_string(nblocks) + " is not divisible by " + what +
                                    "=" + std::to_string(divisor));
    }
}

}  // namespace

GridShape parse_grid(std::string_view text) {
    auto sep = text.find_first_of("xX");
    if (sep == std::string_view::npos)
        throw std::invalid_argument("invalid grid '" + std::string(text) + "', expected RxC");
    return {parse_positive(text.substr(0, sep), text), parse_positive(text.substr(sep + 1), text)};
}

std::string to_string(const GridShape& g) {
    return std::to_string(g.rows) + "x" + std::to_string(g.cols);
}

int lcm(int a, int b) { return std::lcm(a, b); }

Pid block_owner(int x, int y, const GridShape& g) {
    if (x < 0 || y < 0) throw std::out_of_range("negative block coordinate");
    return g.cols * (x % g.rows) + (y % g.cols);
}

Pid block_owner(BlockCoord c, const GridShape& g, int nblocks) {
    if (c.x >= nblocks || c.y >= nblocks) throw std::out_of_range("block coordinate beyond N");
    return block_owner(c.x, c.y, g);
}

const RedistProblem& validate(const RedistProblem& problem) {
    const auto& [src, dst, blocks] = problem;
    if (src.rows < 1 || src.cols < 1 || dst.rows < 1 || dst.cols < 1)
        throw ZeroGridError("processor grids need at least one row and one column");
    if (blocks.n < 1 || blocks.nb < 1) throw ZeroGridError("matrix and block sizes must be positive");
    if (blocks.n % blocks.nb != 0)
        throw DivisibilityError("elements", blocks.nb,
                                "n=" + std::to_string(blocks.n) + " is not divisible by NB=" +
                                    std::to_string(blocks.nb));
    const int nblocks = blocks.nblocks();
    require_divisible(nblocks, lcm(src.rows, dst.rows), "rows", "lcm(src.rows, dst.rows)");
    require_divisible(nblocks, lcm(src.cols, dst.cols), "cols", "lcm(src.cols, dst.cols)");
    return problem;
}

}  // namespace redistplan
