#pragma once

// In-memory execution of a redistribution plan.
//
// Each processor owns a LocalStore indexed by local block coordinates
// (x div rows, y div cols). A step packs one message per source, delivers it
// (or copies it locally when the destination pid equals the source pid) and
// unpacks it on the destination before the next step begins.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "redistplan/schedule.hpp"
#include "redistplan/topology.hpp"

namespace redistplan {

class MissingBlock : public RedistError {
public:
    using RedistError::RedistError;
};

class WrongDestination : public RedistError {
public:
    using RedistError::RedistError;
};

class DuplicateDelivery : public RedistError {
public:
    using RedistError::RedistError;
};

/// Hop-annotated failure from resize_session.
class SessionError : public RedistError {
public:
    SessionError(int hop, const std::string& what) : RedistError(what), hop_(hop) {}
    int hop() const noexcept { return hop_; }

private:
    int hop_;
};

/// Deterministic payload: value of element `elem` of block `c`.
using FillFn = std::function<double(BlockCoord c, int elem)>;

/// x * 1e6 + y * 1e3 + elem.
double default_fill(BlockCoord c, int elem) noexcept;

struct Block {
    BlockCoord coord;
    std::vector<double> payload;  // NB * NB elements, row-major

    friend bool operator==(const Block&, const Block&) = default;
};

Block make_block(BlockCoord c, int nb, const FillFn& fill);

class LocalStore {
public:
    LocalStore() = default;
    LocalStore(Pid pid, GridShape grid, int nblocks);

    Pid pid() const noexcept { return pid_; }
    const GridShape& grid() const noexcept { return grid_; }
    int local_rows() const noexcept { return local_rows_; }
    int local_cols() const noexcept { return local_cols_; }

    const std::optional<Block>& slot(int lx, int ly) const;
    std::optional<Block>& slot(int lx, int ly);

    /// Local slot holding global block `c` on this store's grid.
    std::optional<Block>& slot_for(BlockCoord c) { return slot(c.x / grid_.rows, c.y / grid_.cols); }
    const std::optional<Block>& slot_for(BlockCoord c) const {
        return slot(c.x / grid_.rows, c.y / grid_.cols);
    }

    /// Places a block at its local slot; throws DuplicateDelivery if occupied.
    void put(Block b);

    int count() const noexcept;

    friend bool operator==(const LocalStore&, const LocalStore&) = default;

private:
    Pid pid_ = 0;
    GridShape grid_;
    int local_rows_ = 0;
    int local_cols_ = 0;
    std::vector<std::optional<Block>> slots_;
};

struct Message {
    int step = 0;
    Pid src = 0;
    Pid dst = 0;
    std::vector<Block> blocks;  // one per superblock, superblock row-major
};

std::vector<LocalStore> distribute_initial(const BlockDesc& desc, const GridShape& p,
                                           const FillFn& fill = default_fill);

/// Collects, from every superblock, the block at the relative coordinate the
/// plan assigns to (step, pid).
Message pack(const RedistributionPlan& plan, Pid pid, int step, const LocalStore& store);

/// Places every block of `msg` into `store` by its carried coordinate.
void unpack(const Message& msg, LocalStore& store, const GridShape& q);

struct StepTrace {
    int step = 0;
    int copies = 0;      // self-deliveries, no transport
    int transfers = 0;   // messages that crossed the transport
    int max_fan_in = 0;  // largest number of messages received by one pid
};

struct ExecutionResult {
    std::vector<LocalStore> stores;
    std::vector<StepTrace> steps;
};

/// Reference implementation: sources and destinations processed in pid order.
ExecutionResult execute_serial(const RedistributionPlan& plan, const std::vector<LocalStore>& sources);

/// Parallel engine. Packs all sources of a step concurrently, then unpacks
/// concurrently per destination (each destination consumes its inbox in
/// source-pid order). Results are identical to execute_serial.
ExecutionResult execute(const RedistributionPlan& plan, const std::vector<LocalStore>& sources);

struct VerifyReport {
    bool passed = true;
    long long checked = 0;
    long long mismatches = 0;
    std::vector<std::string> first_mismatches;  // at most 10
};

/// Brute-force ownership oracle, independent of the schedule machinery.
VerifyReport verify(const std::vector<LocalStore>& dests, const RedistProblem& problem,
                    const FillFn& fill = default_fill);

struct HopReport {
    RedistributionPlan plan;
    std::vector<StepTrace> steps;
    VerifyReport verification;
};

struct SessionReport {
    std::vector<HopReport> hops;
    std::vector<LocalStore> final_stores;
    bool all_verified = true;
};

/// Chains plan + execute + verify across consecutive grids.
SessionReport resize_session(const std::vector<GridShape>& grids, const BlockDesc& desc,
                             const FillFn& fill = default_fill);

/// FNV-1a over the payload bytes; used for block dumps.
std::uint64_t payload_checksum(const Block& b) noexcept;

}  // namespace redistplan
