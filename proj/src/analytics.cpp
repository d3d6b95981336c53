#include "redistplan/analytics.hpp"

#include <algorithm>
#include <set>

namespace redistplan {

ScheduleStats stats(const RedistributionPlan& plan) {
    const auto& t = plan.transfer;
    ScheduleStats s;
    s.steps = t.steps();
    std::vector<int> hits(static_cast<std::size_t>(plan.problem.dst.size()));
    for (int i = 0; i < t.steps(); ++i) {
        std::fill(hits.begin(), hits.end(), 0);
        for (Pid k = 0; k < t.sources(); ++k) {
            const Pid d = t.dest(i, k);
            if (d == k) ++s.copies;
            s.max_fan_in = std::max(s.max_fan_in, ++hits[static_cast<std::size_t>(d)]);
        }
    }
    s.sendrecvs = s.steps * t.sources() - s.copies;
    s.contentions = count_contentions(t);
    const long long n = plan.problem.blocks.nblocks();
    s.message_blocks = n * n / (static_cast<long long>(plan.dims.R) * plan.dims.C);
    return s;
}

double estimate_cost(const RedistributionPlan& plan, const CostParams& params) noexcept {
    const long long n = plan.problem.blocks.nblocks();
    const long long message_blocks = n * n / (static_cast<long long>(plan.dims.R) * plan.dims.C);
    return static_cast<double>(plan.transfer.steps()) *
           (params.lambda + static_cast<double>(message_blocks) * params.tau);
}

long long communication_calls(const RedistributionPlan& plan) noexcept {
    return static_cast<long long>(plan.transfer.steps()) * plan.transfer.sources();
}

long long caterpillar_call_count(const GridShape& p, const GridShape& q) {
    const int R = lcm(p.rows, q.rows), C = lcm(p.cols, q.cols);
    std::set<std::pair<Pid, Pid>> pairs;
    for (int x = 0; x < R; ++x)
        for (int y = 0; y < C; ++y) pairs.emplace(source_owner(x, y, p), dest_owner(x, y, q));
    return 2 * static_cast<long long>(pairs.size());
}

long long caterpillar_call_count(int p, int q) {
    return caterpillar_call_count(nearly_square(p), nearly_square(q));
}

GridShape nearly_square(int n) {
    if (n < 1) throw ZeroGridError("processor count must be positive");
    int rows = 1;
    for (int d = 1; d * d <= n; ++d)
        if (n % d == 0) rows = d;
    return {rows, n / rows};
}

std::string classify_grid(const GridShape& g) {
    const GridShape sq = nearly_square(g.size());
    if (g == sq || g == GridShape{sq.cols, sq.rows}) return "nearly-square";
    if (g.rows == 1 || g.cols == 1) return "1-D";
    return "skewed";
}

std::string classify_pair(const GridShape& p, const GridShape& q) {
    auto a = classify_grid(p), b = classify_grid(q);
    if (a == b) return a;
    // 1x2 and 2x1 are both nearly-square and 1-D; defer to the other side.
    if (p.size() <= 2) return b;
    if (q.size() <= 2) return a;
    return "mixed";
}

int min_compatible_nblocks(const GridShape& p, const GridShape& q) noexcept {
    return lcm(lcm(p.rows, q.rows), lcm(p.cols, q.cols));
}

std::vector<SweepRow> sweep(const std::vector<SweepConfig>& configs, int nblocks, const CostParams& params) {
    std::vector<SweepRow> rows(configs.size());
    const auto count = static_cast<long long>(configs.size());
#pragma omp parallel for schedule(dynamic)
    for (long long r = 0; r < count; ++r) {
        auto& row = rows[static_cast<std::size_t>(r)];
        row.config = configs[static_cast<std::size_t>(r)];
        const auto& [src, dst] = row.config;
        try {
            row.topology = classify_pair(src, dst);
            row.nblocks = nblocks > 0 ? nblocks : min_compatible_nblocks(src, dst);
            const auto pl = plan({src, dst, BlockDesc::from_blocks(row.nblocks)});
            row.stats = stats(pl);
            row.modeled_cost = estimate_cost(pl, params);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    }
    return rows;
}

namespace presets {

const std::vector<GridShape>& nearly_square_grids() {
    static const std::vector<GridShape> grids{{1, 2}, {2, 2}, {2, 3}, {2, 4}, {3, 3}, {3, 4}, {4, 4},
                                              {4, 5}, {5, 5}, {5, 6}, {6, 6}, {5, 8}, {6, 8}};
    return grids;
}

const std::vector<GridShape>& skewed_grids() {
    static const std::vector<GridShape> grids{
        {1, 2},  {2, 2},  {2, 3},  {2, 4}, {3, 3}, {2, 6}, {2, 8},  {2, 10},  {5, 5},  {3, 10}, {2, 18}, {2, 20},
        {2, 24}, {2, 1},  {3, 2},  {4, 2}, {6, 2}, {8, 2}, {10, 2}, {10, 3}, {18, 2}, {20, 2}, {24, 2}};
    return grids;
}

const std::vector<Table2Row>& table2() {
    static const std::vector<Table2Row> rows{
        {2, 4, "2", {2, 2}, {2, 2}, {2, 2}},
        {4, 6, "3", {3, 9}, {4, 8}, {3, 9}},
        {4, 8, "2", {2, 6}, {4, 4}, {2, 6}},
        {6, 9, "3", {6, 12}, {6, 12}, {3, 15}},
        {8, 16, "2", {8, 8}, {8, 8}, {4, 12}},
        {9, 12, "4", {6, 30}, {9, 27}, {3, 33}},
        {12, 16, "4", {12, 36}, {12, 36}, {12, 36}},
        {16, 20, "5", {10, 70}, {16, 64}, {16, 64}},
        {20, 25, "5", {20, 80}, {20, 80}, {5, 95}},
        {25, 30, "6", {15, 135}, {25, 125}, {4, 146}},
        {25, 40, "8", {7, 193}, {20, 180}, {25, 175}},
        {30, 36, "6", {30, 150}, {30, 150}, {15, 525}},
        {36, 48, "4", {12, 132}, {36, 108}, {36, 108}},
        {4, 20, "10, 5 (skewed)", {2, 38}, {4, 36}, {2, 18}},
        {8, 40, "10, 5 (skewed)", {8, 72}, {8, 72}, {4, 36}},
        {8, 50, "25", {8, 192}, {8, 192}, {8, 192}},
    };
    return rows;
}

}  // namespace presets

namespace {

std::optional<GridShape> first_skewed(int n) {
    for (const auto& g : presets::skewed_grids())
        if (g.size() == n) return g;
    return std::nullopt;
}

}  // namespace

std::vector<Table2Comparison> compare_table2() {
    std::vector<Table2Comparison> out;
    for (const auto& row : presets::table2()) {
        struct Column {
            const char* name;
            std::optional<GridShape> src, dst;
            presets::CountPair reference;
        };
        const Column columns[] = {
            {"nearly-square", nearly_square(row.p), nearly_square(row.q), row.nearly_square},
            {"1-D", GridShape{1, row.p}, GridShape{1, row.q}, row.one_dimensional},
            {"skewed", first_skewed(row.p), first_skewed(row.q), row.skewed},
        };
        for (const auto& col : columns) {
            Table2Comparison c;
            c.p = row.p;
            c.q = row.q;
            c.topology = col.name;
            c.reference_steps = row.steps;
            c.reference = col.reference;
            if (col.src && col.dst) {
                c.config = SweepConfig{*col.src, *col.dst};
                const int n = min_compatible_nblocks(*col.src, *col.dst);
                c.computed = stats(plan({*col.src, *col.dst, BlockDesc::from_blocks(n)}));
                c.match = c.computed->copies == col.reference.copies && c.computed->sendrecvs == col.reference.sendrecvs;
            }
            out.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace redistplan
