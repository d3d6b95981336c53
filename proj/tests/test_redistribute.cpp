#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracle.hpp"
#include "redistplan/redistribute.hpp"

using namespace redistplan;

namespace {

RedistProblem problem(GridShape p, GridShape q, int n, int nb = 1) { return {p, q, BlockDesc::from_blocks(n, nb)}; }

long long total_blocks(const std::vector<LocalStore>& stores) {
    long long t = 0;
    for (const auto& s : stores) t += s.count();
    return t;
}

}  // namespace

TEST_CASE("payload fill") {
    CHECK(default_fill({0, 0}, 0) == 0.0);
    CHECK(default_fill({2, 3}, 5) == 2003005.0);
    const auto b = make_block({1, 2}, 2, default_fill);
    CHECK(b.payload == std::vector<double>{1002000.0, 1002001.0, 1002002.0, 1002003.0});
}

TEST_CASE("initial distribution") {
    const auto stores = distribute_initial(BlockDesc::from_blocks(4, 2), {2, 2});
    REQUIRE(stores.size() == 4);
    for (const auto& s : stores) {
        CHECK(s.count() == 4);
        CHECK(s.local_rows() == 2);
        CHECK(s.local_cols() == 2);
    }
    CHECK(stores[0].slot(1, 1)->coord == BlockCoord{2, 2});
    CHECK(stores[3].slot(0, 1)->coord == BlockCoord{1, 3});
    CHECK(stores[2].slot(1, 0)->payload.size() == 4);

    CHECK_THROWS_AS(distribute_initial(BlockDesc::from_blocks(5), {2, 1}), DivisibilityError);
    CHECK_THROWS_AS(distribute_initial(BlockDesc::from_blocks(4), {0, 1}), ZeroGridError);
}

TEST_CASE("local store slots") {
    LocalStore s(0, {2, 2}, 4);
    CHECK(s.count() == 0);
    s.put(make_block({2, 2}, 1, default_fill));
    CHECK(s.count() == 1);
    CHECK(s.slot(1, 1).has_value());
    CHECK_THROWS_AS(s.put(make_block({2, 2}, 1, default_fill)), DuplicateDelivery);
    CHECK_THROWS_AS(s.slot(2, 0), std::out_of_range);
    CHECK_THROWS_AS(s.slot(0, -1), std::out_of_range);
}

TEST_CASE("pack and unpack 2x2 -> 3x4") {
    const auto pl = plan(problem({2, 2}, {3, 4}, 12));
    auto sources = distribute_initial(pl.problem.blocks, pl.problem.src);

    // Find the step where pid 0 carries relative block (4, 0); it belongs to pid 4.
    int step = -1;
    for (int i = 0; i < pl.transfer.steps(); ++i)
        if (pl.transfer.coords(i, 0) == RelCoord{4, 0}) step = i;
    REQUIRE(step >= 0);
    CHECK(pl.transfer.dest(step, 0) == 4);

    const auto msg = pack(pl, 0, step, sources[0]);
    CHECK(msg.src == 0);
    CHECK(msg.dst == 4);
    REQUIRE(msg.blocks.size() == 6);
    CHECK(msg.blocks[0].coord == BlockCoord{4, 0});
    CHECK(msg.blocks[1].coord == BlockCoord{4, 4});
    CHECK(msg.blocks[3].coord == BlockCoord{10, 0});

    LocalStore dest(4, pl.problem.dst, 12);
    unpack(msg, dest, pl.problem.dst);
    CHECK(dest.count() == 6);
    CHECK(dest.slot(1, 0)->coord == BlockCoord{4, 0});
    CHECK(dest.slot(3, 1)->coord == BlockCoord{10, 4});

    for (int i = 0; i < pl.transfer.steps(); ++i)
        if (pl.transfer.coords(i, 0) == RelCoord{2, 2}) {
            CHECK(pl.transfer.dest(i, 0) == 10);
            LocalStore d10(10, pl.problem.dst, 12);
            unpack(pack(pl, 0, i, sources[0]), d10, pl.problem.dst);
            CHECK(d10.slot(0, 0)->coord == BlockCoord{2, 2});
        }

    SUBCASE("error paths") {
        CHECK_THROWS_AS(unpack(msg, dest, pl.problem.dst), DuplicateDelivery);
        LocalStore wrong(5, pl.problem.dst, 12);
        CHECK_THROWS_AS(unpack(msg, wrong, pl.problem.dst), WrongDestination);
        CHECK_THROWS_AS(pack(pl, 1, step, sources[0]), MissingBlock);
        sources[0].slot(2, 0).reset();
        CHECK_THROWS_AS(pack(pl, 0, step, sources[0]), MissingBlock);
        CHECK_THROWS_AS(pack(pl, 0, pl.transfer.steps(), sources[0]), std::out_of_range);
    }
}

TEST_CASE("consecutive message blocks land a fixed local offset apart") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const auto pr = oracle::random_problem(rng, 5, 40);
        const auto pl = plan(pr);
        const auto sources = distribute_initial(pr.blocks, pr.src);
        const auto& d = pl.dims;
        const auto& q = pr.dst;
        for (int i = 0; i < pl.transfer.steps(); ++i)
            for (Pid k = 0; k < pr.src.size(); ++k) {
                const auto msg = pack(pl, k, i, sources[static_cast<std::size_t>(k)]);
                for (int s = 0; s + 1 < d.sup; ++s) {
                    const auto a = msg.blocks[static_cast<std::size_t>(s)].coord;
                    const auto b = msg.blocks[static_cast<std::size_t>(s + 1)].coord;
                    if ((s + 1) % d.supC != 0) {
                        CHECK(b.x / q.rows == a.x / q.rows);
                        CHECK(b.y / q.cols - a.y / q.cols == d.C / q.cols);
                    } else {
                        CHECK(b.x / q.rows - a.x / q.rows == d.R / q.rows);
                    }
                }
            }
    }
}

TEST_CASE("execute and verify") {
    SUBCASE("expanding 2x2 -> 3x4") {
        const auto pl = plan(problem({2, 2}, {3, 4}, 12, 2));
        const auto r = execute(pl, distribute_initial(pl.problem.blocks, pl.problem.src));
        CHECK(r.steps.size() == 6);
        const auto rep = verify(r.stores, pl.problem);
        CHECK(rep.passed);
        CHECK(rep.checked == 144);
        CHECK(rep.mismatches == 0);
    }
    SUBCASE("identity is all copies") {
        const auto pl = plan(problem({2, 3}, {2, 3}, 6));
        const auto r = execute(pl, distribute_initial(pl.problem.blocks, pl.problem.src));
        REQUIRE(r.steps.size() == 1);
        CHECK(r.steps[0].copies == 6);
        CHECK(r.steps[0].transfers == 0);
        CHECK(r.steps[0].max_fan_in == 1);
        CHECK(verify(r.stores, pl.problem).passed);
    }
    SUBCASE("contended schedules still deliver") {
        const auto pl = plan(problem({4, 4}, {2, 2}, 8));
        CHECK(pl.contentions_after > 0);
        const auto r = execute(pl, distribute_initial(pl.problem.blocks, pl.problem.src));
        CHECK(verify(r.stores, pl.problem).passed);
        CHECK(std::any_of(r.steps.begin(), r.steps.end(), [](const StepTrace& t) { return t.max_fan_in > 1; }));
    }
    SUBCASE("fault injection") {
        const auto pl = plan(problem({2, 2}, {1, 2}, 4));
        auto r = execute(pl, distribute_initial(pl.problem.blocks, pl.problem.src));
        std::swap(r.stores[0].slot(0, 0), r.stores[0].slot(1, 1));
        auto rep = verify(r.stores, pl.problem);
        CHECK_FALSE(rep.passed);
        CHECK(rep.mismatches == 2);
        CHECK(rep.first_mismatches.size() == 2);

        std::swap(r.stores[0].slot(0, 0), r.stores[0].slot(1, 1));
        r.stores[1].slot(0, 0)->payload[0] += 1.0;
        rep = verify(r.stores, pl.problem);
        CHECK(rep.mismatches == 1);

        r.stores[1].slot(0, 0).reset();
        rep = verify(r.stores, pl.problem);
        CHECK(rep.mismatches == 2);  // short store plus empty slot
    }
    SUBCASE("wrong source stores") {
        const auto pl = plan(problem({2, 2}, {1, 2}, 4));
        auto src = distribute_initial(pl.problem.blocks, pl.problem.src);
        src.pop_back();
        CHECK_THROWS_AS(execute(pl, src), MissingBlock);
        CHECK_THROWS_AS(execute_serial(pl, src), MissingBlock);
    }
}

TEST_CASE("parallel execution matches the serial reference") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const auto pr = oracle::random_problem(rng, 6, 36, 1 + trial % 3);
        const auto pl = plan(pr);
        const auto src = distribute_initial(pr.blocks, pr.src);
        const auto a = execute_serial(pl, src);
        const auto b = execute(pl, src);
        CHECK(a.stores == b.stores);
        REQUIRE(a.steps.size() == b.steps.size());
        for (std::size_t i = 0; i < a.steps.size(); ++i) {
            CHECK(a.steps[i].copies == b.steps[i].copies);
            CHECK(a.steps[i].transfers == b.steps[i].transfers);
            CHECK(a.steps[i].max_fan_in == b.steps[i].max_fan_in);
        }
    }
}

TEST_CASE("execution properties over random problems") {
    std::mt19937 rng(314);
    for (int trial = 0; trial < 120; ++trial) {
        const auto pr = oracle::random_problem(rng, 6, 48, 1 + trial % 2);
        CAPTURE(to_string(pr.src));
        CAPTURE(to_string(pr.dst));
        const auto pl = plan(pr);
        const auto src = distribute_initial(pr.blocks, pr.src);
        const auto r = execute(pl, src);

        CHECK(verify(r.stores, pr).passed);
        const long long n = pr.blocks.nblocks();
        CHECK(total_blocks(src) == n * n);
        CHECK(total_blocks(r.stores) == n * n);

        long long msgs = 0;
        for (const auto& t : r.steps) {
            CHECK(t.copies + t.transfers == pr.src.size());
            msgs += t.copies + t.transfers;
            if (pl.contentions_after == 0) CHECK(t.max_fan_in == 1);
        }
        CHECK(msgs * pl.dims.sup == n * n);

        // Replaying messages in reverse order gives the same stores.
        std::vector<LocalStore> rev;
        for (Pid k = 0; k < pr.dst.size(); ++k) rev.emplace_back(k, pr.dst, static_cast<int>(n));
        for (int i = pl.transfer.steps() - 1; i >= 0; --i)
            for (Pid k = pr.src.size() - 1; k >= 0; --k) {
                const auto msg = pack(pl, k, i, src[static_cast<std::size_t>(k)]);
                unpack(msg, rev[static_cast<std::size_t>(msg.dst)], pr.dst);
            }
        CHECK(rev == r.stores);

        // And back again.
        const auto back_plan = plan({pr.dst, pr.src, pr.blocks});
        const auto back = execute(back_plan, r.stores);
        CHECK(back.stores == src);
    }
}

TEST_CASE("resize sessions") {
    const auto desc = BlockDesc::from_blocks(12, 2);
    SUBCASE("chain") {
        const auto rep = resize_session({{2, 2}, {3, 4}, {2, 2}}, desc);
        REQUIRE(rep.hops.size() == 2);
        CHECK(rep.all_verified);
        CHECK(rep.hops[0].plan.transfer.steps() == 6);
        CHECK(rep.final_stores == distribute_initial(desc, {2, 2}));
    }
    SUBCASE("single grid") {
        const auto rep = resize_session({{2, 2}}, desc);
        CHECK(rep.hops.empty());
        CHECK(rep.all_verified);
        CHECK(resize_session({}, desc).hops.empty());
    }
    SUBCASE("invalid hop is reported before any execution") {
        try {
            resize_session({{2, 2}, {3, 4}, {5, 1}}, desc);
            FAIL("expected SessionError");
        } catch (const SessionError& e) {
            CHECK(e.hop() == 1);
            CHECK(std::string(e.what()).find("hop 1 (3x4 -> 5x1)") != std::string::npos);
        }
    }
}

TEST_CASE("payload checksum") {
    const auto a = make_block({1, 1}, 2, default_fill);
    auto b = a;
    CHECK(payload_checksum(a) == payload_checksum(b));
    b.payload[3] = -1.0;
    CHECK(payload_checksum(a) != payload_checksum(b));
    CHECK(payload_checksum(make_block({0, 1}, 1, default_fill)) != payload_checksum(make_block({1, 0}, 1, default_fill)));
}
