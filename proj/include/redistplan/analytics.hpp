#pragma once

// Schedule statistics, the step cost model and configuration sweeps.

#include <optional>
#include <string>
#include <vector>

#include "redistplan/schedule.hpp"

namespace redistplan {

/// lambda: seconds to initiate one message; tau: seconds per block sent.
struct CostParams {
    double lambda = 0.0;
    double tau = 0.0;
};

struct ScheduleStats {
    int steps = 0;
    int copies = 0;
    int sendrecvs = 0;
    long long contentions = 0;
    int max_fan_in = 0;
    long long message_blocks = 0;

    friend bool operator==(const ScheduleStats&, const ScheduleStats&) = default;
};

ScheduleStats stats(const RedistributionPlan& plan);

/// steps * (lambda + N^2/(R*C) * tau)
double estimate_cost(const RedistributionPlan& plan, const CostParams& params) noexcept;

/// Communication calls issued by the schedule: one per transfer-table entry
/// (send/recv pairs plus local copies), i.e. steps * P.
long long communication_calls(const RedistributionPlan& plan) noexcept;

/// Calls a Caterpillar-style exchange issues: a send and a matching receive
/// for every (source, destination) processor pair that shares at least one
/// block, found by enumerating ownership over one superblock.
long long caterpillar_call_count(const GridShape& p, const GridShape& q);
/// Count overload; sizes are mapped to nearly-square grids.
long long caterpillar_call_count(int p, int q);

/// rows = largest divisor of n not exceeding sqrt(n).
GridShape nearly_square(int n);

/// "nearly-square", "1-D", "skewed" for one grid.
std::string classify_grid(const GridShape& g);
/// Topology label for a source/destination pair ("mixed" when they differ).
std::string classify_pair(const GridShape& p, const GridShape& q);

/// Smallest N valid for both grids.
int min_compatible_nblocks(const GridShape& p, const GridShape& q) noexcept;

struct SweepConfig {
    GridShape src;
    GridShape dst;
};

struct SweepRow {
    SweepConfig config;
    std::string topology;
    int nblocks = 0;
    std::optional<ScheduleStats> stats;
    double modeled_cost = 0.0;
    std::string error;  // set when the row failed validation
};

/// One row per config, in input order. nblocks == 0 picks the smallest
/// compatible N per row. Rows are planned concurrently.
std::vector<SweepRow> sweep(const std::vector<SweepConfig>& configs, int nblocks, const CostParams& params);

namespace presets {

/// Reference processor grids per topology.
const std::vector<GridShape>& nearly_square_grids();
const std::vector<GridShape>& skewed_grids();

/// Reference copy / send-recv counts for one topology column.
struct CountPair {
    int copies;
    int sendrecvs;
};

struct Table2Row {
    int p;
    int q;
    std::string steps;  // reference step column, e.g. "10, 5 (skewed)"
    CountPair nearly_square;
    CountPair one_dimensional;
    CountPair skewed;
};

const std::vector<Table2Row>& table2();

}  // namespace presets

struct Table2Comparison {
    int p = 0;
    int q = 0;
    std::string topology;
    std::optional<SweepConfig> config;  // empty when no grid of that topology exists
    std::optional<ScheduleStats> computed;
    std::string reference_steps;
    presets::CountPair reference{};
    bool match = false;
};

/// Replays every reference row on nearly-square, 1-D and skewed grids.
std::vector<Table2Comparison> compare_table2();

}  // namespace redistplan
