#pragma once

// Communication schedule construction for P -> Q block-cyclic redistribution.
//
// The N x N block grid is tiled by R x C superblocks, R = lcm(P_r, Q_r) and
// C = lcm(P_c, Q_c). Every superblock shares the same source -> destination
// pattern, so the schedule is derived from a single R x C pair of owner tables
// (IDPC for the source grid, FDPC for the destination grid). Walking those
// tables row-major and appending each destination to its source's column
// yields the send table: row t is communication step t, column k is what
// source pid k sends in that step.
//
// When sources collide on a destination in one step the destination table is
// copied into a working table (PM) and rotated row- or column-wise in groups;
// the same permutation is applied to IDPC and to every Layout table, so the
// block -> destination mapping is untouched and only the step arrangement
// changes.

#include <cstdint>
#include <optional>
#include <vector>

#include "redistplan/table.hpp"
#include "redistplan/topology.hpp"

namespace redistplan {

class ColumnOverflow : public RedistError {
public:
    using RedistError::RedistError;
};

class ContentionPresent : public RedistError {
public:
    using RedistError::RedistError;
};

struct SuperblockDims {
    int R = 1;     // rows per superblock
    int C = 1;     // cols per superblock
    int supR = 1;  // superblock-grid rows
    int supC = 1;  // superblock-grid cols
    int sup = 1;

    friend bool operator==(const SuperblockDims&, const SuperblockDims&) = default;
};

/// Coordinate of a block inside its superblock.
struct RelCoord {
    int i = 0;
    int j = 0;
    friend bool operator==(const RelCoord&, const RelCoord&) = default;
};

/// One R x C table of global block coordinates per superblock, superblocks
/// in row-major order.
struct LayoutArray {
    std::vector<Table<BlockCoord>> tables;
};

enum class OwnerRole { Initial, Final, Mapping };

struct OwnerTable {
    Table<Pid> cells;
    OwnerRole role = OwnerRole::Initial;
};

struct TransferTable {
    Table<Pid> dest;        // steps x P
    Table<RelCoord> coords; // relative block carried by each entry

    int steps() const noexcept { return dest.rows(); }
    int sources() const noexcept { return dest.cols(); }

    friend bool operator==(const TransferTable&, const TransferTable&) = default;
};

/// Per-step inverse of the transfer table: steps x Q, -1 where idle.
struct RecvTable {
    Table<Pid> cells;
    friend bool operator==(const RecvTable&, const RecvTable&) = default;
};

enum class ShiftCase : std::uint8_t {
    None,           // schedule already contention-free
    RowShift,       // P_r > Q_r, P_c <= Q_c
    ColumnShift,    // P_r <= Q_r, P_c > Q_c
    ColumnRowShift  // P_r > Q_r, P_c > Q_c
};

const char* to_string(ShiftCase c) noexcept;
/// Inverse of to_string; throws std::invalid_argument.
ShiftCase parse_shift_case(std::string_view text);

struct RedistributionPlan {
    RedistProblem problem;
    SuperblockDims dims;
    TransferTable transfer;
    std::optional<RecvTable> recv;
    ShiftCase shift_case = ShiftCase::None;
    // False when the selected shifts were evaluated but would have increased
    // contention, in which case the unshifted arrangement is kept.
    bool shifts_applied = false;
    long long contentions_before = 0;
    long long contentions_after = 0;

    friend bool operator==(const RedistributionPlan&, const RedistributionPlan&) = default;
};

struct PlanOptions {
    bool enable_shifts = true;
};

SuperblockDims compute_superblock(const RedistProblem& problem);

LayoutArray build_layout(const RedistProblem& problem, const SuperblockDims& dims);

OwnerTable build_idpc(const SuperblockDims& dims, const GridShape& p);
OwnerTable build_fdpc(const SuperblockDims& dims, const GridShape& q);

/// Walks the tables row-major, appending pm(i,j) to column idpc(i,j).
/// `carried`, when given, supplies the relative block held at each cell
/// (a shifted Layout); otherwise the cell position itself is recorded.
TransferTable build_transfer(const OwnerTable& idpc, const OwnerTable& pm, const GridShape& p,
                             const Table<RelCoord>* carried = nullptr);

RecvTable build_recv(const TransferTable& transfer, const GridShape& q);

/// Sum over steps of sum over destinations of max(multiplicity - 1, 0).
long long count_contentions(const TransferTable& transfer);

ShiftCase select_shift_case(const GridShape& p, const GridShape& q) noexcept;

/// Tables that must move together when the schedule is rotated.
struct ShiftableTables {
    OwnerTable pm;
    OwnerTable idpc;
    LayoutArray layout;
};

/// Row rotation: within each group of P_r rows, row g is rotated right by
/// (P_c * g) mod C. Column rotation: within each group of P_c columns,
/// column g is rotated down by (P_r * g) mod R. ColumnRowShift applies the
/// column rotation first.
void apply_shifts(ShiftCase shift_case, const GridShape& p, ShiftableTables& tables);

/// Relative coordinate of each cell of the first Layout table.
Table<RelCoord> relative_coords(const LayoutArray& layout, const SuperblockDims& dims);

RedistributionPlan plan(const RedistProblem& problem, const PlanOptions& options = {});

}  // namespace redistplan
