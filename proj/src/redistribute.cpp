#include "redistplan/redistribute.hpp"

#include <cstring>
#include <exception>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace redistplan {

namespace {

void check_sources(const RedistributionPlan& plan, const std::vector<LocalStore>& sources) {
    const auto& p = plan.problem.src;
    if (static_cast<int>(sources.size()) != p.size())
        throw MissingBlock("expected " + std::to_string(p.size()) + " source stores, got " +
                           std::to_string(sources.size()));
    for (int k = 0; k < p.size(); ++k)
        if (sources[static_cast<std::size_t>(k)].pid() != k || !(sources[static_cast<std::size_t>(k)].grid() == p))
            throw MissingBlock("source store " + std::to_string(k) + " does not belong to grid " +
                               to_string(p));
}

std::vector<LocalStore> empty_destinations(const RedistProblem& problem) {
    std::vector<LocalStore> out;
    out.reserve(static_cast<std::size_t>(problem.dst.size()));
    for (Pid k = 0; k < problem.dst.size(); ++k)
        out.emplace_back(k, problem.dst, problem.blocks.nblocks());
    return out;
}

StepTrace trace_step(const RedistributionPlan& plan, int step) {
    StepTrace t;
    t.step = step;
    std::vector<int> inbox(static_cast<std::size_t>(plan.problem.dst.size()), 0);
    for (Pid k = 0; k < plan.transfer.sources(); ++k) {
        const Pid d = plan.transfer.dest(step, k);
        (d == k ? t.copies : t.transfers) += 1;
        t.max_fan_in = std::max(t.max_fan_in, ++inbox[static_cast<std::size_t>(d)]);
    }
    return t;
}

// Rethrows the first captured exception in index order.
void rethrow_first(const std::vector<std::exception_ptr>& errors) {
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string describe(BlockCoord c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

}  // namespace

double default_fill(BlockCoord c, int elem) noexcept {
    return c.x * 1e6 + c.y * 1e3 + elem;
}

Block make_block(BlockCoord c, int nb, const FillFn& fill) {
    Block b{c, std::vector<double>(static_cast<std::size_t>(nb) * nb)};
    for (int e = 0; e < nb * nb; ++e) b.payload[static_cast<std::size_t>(e)] = fill(c, e);
    return b;
}

LocalStore::LocalStore(Pid pid, GridShape grid, int nblocks)
    : pid_(pid),
      grid_(grid),
      local_rows_(nblocks / grid.rows),
      local_cols_(nblocks / grid.cols),
      slots_(static_cast<std::size_t>(local_rows_) * local_cols_) {}

const std::optional<Block>& LocalStore::slot(int lx, int ly) const {
    if (lx < 0 || ly < 0 || lx >= local_rows_ || ly >= local_cols_)
        throw std::out_of_range("local slot out of range");
    return slots_[static_cast<std::size_t>(lx) * local_cols_ + ly];
}

std::optional<Block>& LocalStore::slot(int lx, int ly) {
    return const_cast<std::optional<Block>&>(std::as_const(*this).slot(lx, ly));
}

void LocalStore::put(Block b) {
    auto& s = slot_for(b.coord);
    if (s) throw DuplicateDelivery("pid " + std::to_string(pid_) + ": slot for block " +
                                   describe(b.coord) + " already written");
    s = std::move(b);
}

int LocalStore::count() const noexcept {
    int n = 0;
    for (const auto& s : slots_) n += s.has_value();
    return n;
}

std::vector<LocalStore> distribute_initial(const BlockDesc& desc, const GridShape& p, const FillFn& fill) {
    const int n = desc.nblocks();
    if (p.rows < 1 || p.cols < 1) throw ZeroGridError("empty processor grid");
    if (n % p.rows != 0 || n % p.cols != 0)
        throw DivisibilityError(n % p.rows ? "rows" : "cols", n % p.rows ? p.rows : p.cols,
                                "N=" + std::to_string(n) + " does not divide evenly over " + to_string(p));
    std::vector<LocalStore> stores;
    stores.reserve(static_cast<std::size_t>(p.size()));
    for (Pid k = 0; k < p.size(); ++k) stores.emplace_back(k, p, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            stores[static_cast<std::size_t>(source_owner(x, y, p))].put(make_block({x, y}, desc.nb, fill));
    return stores;
}

Message pack(const RedistributionPlan& plan, Pid pid, int step, const LocalStore& store) {
    const auto& t = plan.transfer;
    if (step < 0 || step >= t.steps() || pid < 0 || pid >= t.sources())
        throw std::out_of_range("schedule entry out of range");
    const auto& d = plan.dims;
    const RelCoord rel = t.coords(step, pid);

    Message msg{step, pid, t.dest(step, pid), {}};
    msg.blocks.reserve(static_cast<std::size_t>(d.sup));
    for (int sr = 0; sr < d.supR; ++sr) {
        for (int sc = 0; sc < d.supC; ++sc) {
            const BlockCoord c{sr * d.R + rel.i, sc * d.C + rel.j};
            if (store.pid() != pid || source_owner(c.x, c.y, store.grid()) != pid)
                throw MissingBlock("pid " + std::to_string(pid) + " does not own block " + describe(c));
            const auto& s = store.slot_for(c);
            if (!s || !(s->coord == c))
                throw MissingBlock("pid " + std::to_string(pid) + " is missing block " + describe(c));
            msg.blocks.push_back(*s);
        }
    }
    return msg;
}

void unpack(const Message& msg, LocalStore& store, const GridShape& q) {
    for (const auto& b : msg.blocks) {
        const Pid owner = dest_owner(b.coord.x, b.coord.y, q);
        if (owner != store.pid())
            throw WrongDestination("block " + describe(b.coord) + " belongs to pid " + std::to_string(owner) +
                                   ", delivered to " + std::to_string(store.pid()));
        store.put(b);
    }
}

ExecutionResult execute_serial(const RedistributionPlan& plan, const std::vector<LocalStore>& sources) {
    check_sources(plan, sources);
    ExecutionResult r{empty_destinations(plan.problem), {}};
    for (int step = 0; step < plan.transfer.steps(); ++step) {
        for (Pid k = 0; k < plan.transfer.sources(); ++k) {
            Message msg = pack(plan, k, step, sources[static_cast<std::size_t>(k)]);
            unpack(msg, r.stores[static_cast<std::size_t>(msg.dst)], plan.problem.dst);
        }
        r.steps.push_back(trace_step(plan, step));
    }
    return r;
}

ExecutionResult execute(const RedistributionPlan& plan, const std::vector<LocalStore>& sources) {
    check_sources(plan, sources);
    const int nsrc = plan.transfer.sources();
    const int ndst = plan.problem.dst.size();
    ExecutionResult r{empty_destinations(plan.problem), {}};

    std::vector<Message> outbox(static_cast<std::size_t>(nsrc));
    std::vector<std::vector<Pid>> inbox(static_cast<std::size_t>(ndst));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(nsrc, ndst)));

    for (int step = 0; step < plan.transfer.steps(); ++step) {
#pragma omp parallel for schedule(static)
        for (int k = 0; k < nsrc; ++k) {
            try {
                outbox[static_cast<std::size_t>(k)] = pack(plan, k, step, sources[static_cast<std::size_t>(k)]);
            } catch (...) {
                errors[static_cast<std::size_t>(k)] = std::current_exception();
            }
        }
        rethrow_first(errors);

        for (auto& in : inbox) in.clear();
        for (Pid k = 0; k < nsrc; ++k)
            inbox[static_cast<std::size_t>(outbox[static_cast<std::size_t>(k)].dst)].push_back(k);

#pragma omp parallel for schedule(dynamic)
        for (int d = 0; d < ndst; ++d) {
            try {
                for (Pid k : inbox[static_cast<std::size_t>(d)])
                    unpack(outbox[static_cast<std::size_t>(k)], r.stores[static_cast<std::size_t>(d)],
                           plan.problem.dst);
            } catch (...) {
                errors[static_cast<std::size_t>(d)] = std::current_exception();
            }
        }
        rethrow_first(errors);
        r.steps.push_back(trace_step(plan, step));
    }
    return r;
}

VerifyReport verify(const std::vector<LocalStore>& dests, const RedistProblem& problem, const FillFn& fill) {
    VerifyReport rep;
    const auto& q = problem.dst;
    const int n = problem.blocks.nblocks();
    const int nb = problem.blocks.nb;
    auto fail = [&](const std::string& why) {
        rep.passed = false;
        ++rep.mismatches;
        if (rep.first_mismatches.size() < 10) rep.first_mismatches.push_back(why);
    };

    if (static_cast<int>(dests.size()) != q.size()) {
        fail("expected " + std::to_string(q.size()) + " stores, found " + std::to_string(dests.size()));
        return rep;
    }
    const int per_store = n / q.rows * (n / q.cols);
    for (const auto& s : dests)
        if (s.count() != per_store)
            fail("store " + std::to_string(s.pid()) + " holds " + std::to_string(s.count()) + " blocks, expected " +
                 std::to_string(per_store));

    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            ++rep.checked;
            const int owner = q.cols * (x % q.rows) + (y % q.cols);
            const auto& store = dests[static_cast<std::size_t>(owner)];
            const auto& s = store.slot(x / q.rows, y / q.cols);
            const std::string where = "block (" + std::to_string(x) + "," + std::to_string(y) + ") at pid " +
                                      std::to_string(owner);
            if (!s) {
                fail(where + ": slot empty");
                continue;
            }
            if (s->coord.x != x || s->coord.y != y) {
                fail(where + ": slot holds (" + std::to_string(s->coord.x) + "," + std::to_string(s->coord.y) + ")");
                continue;
            }
            bool payload_ok = static_cast<int>(s->payload.size()) == nb * nb;
            for (int e = 0; payload_ok && e < nb * nb; ++e)
                payload_ok = s->payload[static_cast<std::size_t>(e)] == fill({x, y}, e);
            if (!payload_ok) fail(where + ": payload differs");
        }
    }
    return rep;
}

SessionReport resize_session(const std::vector<GridShape>& grids, const BlockDesc& desc, const FillFn& fill) {
    SessionReport rep;
    if (grids.empty()) return rep;
    for (std::size_t h = 0; h + 1 < grids.size(); ++h) {
        const RedistProblem problem{grids[h], grids[h + 1], desc};
        try {
            validate(problem);
        } catch (const RedistError& e) {
            throw SessionError(static_cast<int>(h), "hop " + std::to_string(h) + " (" + to_string(grids[h]) +
                                                        " -> " + to_string(grids[h + 1]) + "): " + e.what());
        }
    }
    auto stores = distribute_initial(desc, grids.front(), fill);
    for (std::size_t h = 0; h + 1 < grids.size(); ++h) {
        HopReport hop;
        hop.plan = plan({grids[h], grids[h + 1], desc});
        auto result = execute(hop.plan, stores);
        hop.steps = std::move(result.steps);
        hop.verification = verify(result.stores, hop.plan.problem, fill);
        rep.all_verified = rep.all_verified && hop.verification.passed;
        stores = std::move(result.stores);
        rep.hops.push_back(std::move(hop));
    }
    rep.final_stores = std::move(stores);
    return rep;
}

std::uint64_t payload_checksum(const Block& b) noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (double v : b.payload) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof v);
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 1099511628211ull;
        }
    }
    return h;
}

}  // namespace redistplan
