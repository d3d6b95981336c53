// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "redistplan/analytics.hpp"
#include "redistplan/redistribute.hpp"

using namespace redistplan;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int steps_formula(GridShape p, GridShape q) {
    return std::lcm(p.rows, q.rows) * std::lcm(p.cols, q.cols) / (p.rows * p.cols);
}

RedistributionPlan plan_min(GridShape p, GridShape q) {
    const int n = std::lcm(std::lcm(p.rows, q.rows), std::lcm(p.cols, q.cols));
    return plan({p, q, BlockDesc::from_blocks(n)});
}

Outcome ac1_reference_rows() {
    struct Row {
        GridShape p, q;
        int steps, copies, sendrecvs;
    };
    const Row rows[] = {{{1, 2}, {2, 2}, 2, 2, 2},
                        {{2, 2}, {2, 3}, 3, 3, 9},
                        {{2, 2}, {2, 4}, 2, 2, 6},
                        {{2, 3}, {3, 3}, 3, 6, 12},
                        {{2, 4}, {4, 4}, 2, 8, 8}};
    Outcome o;
    int ok = 0;
    for (const auto& r : rows) {
        for (int mult : {1, 3}) {
            const auto pl = plan_min(r.p, r.q);
            const auto s = stats(plan({r.p, r.q, BlockDesc::from_blocks(pl.problem.blocks.nblocks() * mult)}));
            if (s.steps == r.steps && s.copies == r.copies && s.sendrecvs == r.sendrecvs) {
                ++ok;
            } else {
                o.pass = false;
                o.detail += " " + to_string(r.p) + "->" + to_string(r.q) + " got (" + std::to_string(s.steps) + "," +
                            std::to_string(s.copies) + "," + std::to_string(s.sendrecvs) + ")";
            }
        }
    }
    o.detail = std::to_string(ok) + "/10 rows match" + o.detail;
    return o;
}

Outcome ac2_step_formula() {
    std::vector<GridShape> grids = presets::nearly_square_grids();
    grids.insert(grids.end(), presets::skewed_grids().begin(), presets::skewed_grids().end());
    Outcome o;
    int checked = 0;
    for (const auto& p : grids)
        for (const auto& q : grids) {
            ++checked;
            const int got = stats(plan_min(p, q)).steps;
            if (got != steps_formula(p, q)) {
                o.pass = false;
                o.detail += " " + to_string(p) + "->" + to_string(q);
            }
        }
    const int a = stats(plan_min({2, 2}, {4, 5})).steps, b = stats(plan_min({2, 2}, {2, 10})).steps;
    const int c = stats(plan_min({2, 4}, {5, 8})).steps, d = stats(plan_min({2, 4}, {2, 20})).steps;
    if (a != 10 || b != 5 || c != 10 || d != 5) o.pass = false;
    o.detail = std::to_string(checked) + " pairs; 4->20: " + std::to_string(a) + " vs " + std::to_string(b) +
               " skewed; 8->40: " + std::to_string(c) + " vs " + std::to_string(d) + " skewed" + o.detail;
    return o;
}

Outcome ac3_contention_free() {
    Outcome o;
    int grids = 0;
    for (int pr = 1; pr <= 6; ++pr)
        for (int pc = 1; pc <= 6; ++pc)
            for (int qr = pr; qr <= 6; ++qr)
                for (int qc = pc; qc <= 6; ++qc) {
                    ++grids;
                    const auto pl = plan_min({pr, pc}, {qr, qc});
                    bool distinct = true;
                    for (int i = 0; i < pl.transfer.steps(); ++i) {
                        std::vector<int> seen(static_cast<std::size_t>(qr * qc), 0);
                        for (Pid d : pl.transfer.dest.row(i))
                            if (seen[static_cast<std::size_t>(d)]++) distinct = false;
                    }
                    if (pl.contentions_before != 0 || !distinct) {
                        o.pass = false;
                        o.detail += " " + std::to_string(pr) + "x" + std::to_string(pc) + "->" + std::to_string(qr) +
                                    "x" + std::to_string(qc);
                    }
                }
    o.detail = std::to_string(grids) + " growing grid pairs" + o.detail;
    return o;
}

Outcome ac4_oracle_equivalence() {
    std::mt19937 rng(4);
    Outcome o;
    int runs = 0, shrinks = 0, skews = 0, one_d = 0, contended = 0;
    while (runs < 240) {
        const auto pr = oracle::random_problem(rng, 8, 48, 1 + runs % 3);
        ++runs;
        shrinks += pr.dst.size() < pr.src.size();
        skews += classify_grid(pr.src) == "skewed" || classify_grid(pr.dst) == "skewed";
        one_d += pr.src.rows == 1 || pr.src.cols == 1 || pr.dst.rows == 1 || pr.dst.cols == 1;

        const auto pl = plan(pr);
        contended += pl.contentions_after > 0;
        const auto result = execute(pl, distribute_initial(pr.blocks, pr.src));
        const auto rep = verify(result.stores, pr);

        // Independent placement check against the ownership formula.
        bool placed = true;
        const int n = pr.blocks.nblocks(), nb = pr.blocks.nb;
        for (int x = 0; x < n && placed; ++x)
            for (int y = 0; y < n && placed; ++y) {
                const auto& s = result.stores[static_cast<std::size_t>(oracle::owner(x, y, pr.dst))]
                                    .slot(x / pr.dst.rows, y / pr.dst.cols);
                placed = s && s->coord == BlockCoord{x, y} && static_cast<int>(s->payload.size()) == nb * nb &&
                         s->payload.back() == x * 1e6 + y * 1e3 + (nb * nb - 1);
            }
        if (!rep.passed || !placed) {
            o.pass = false;
            o.detail += " " + to_string(pr.src) + "->" + to_string(pr.dst) + "/N=" + std::to_string(n);
        }
    }
    if (shrinks == 0 || skews == 0 || one_d == 0) o.pass = false;
    o.detail = std::to_string(runs) + " runs (" + std::to_string(shrinks) + " shrinks, " + std::to_string(skews) +
               " skewed, " + std::to_string(one_d) + " 1-D, " + std::to_string(contended) + " contended)" + o.detail;
    return o;
}

Outcome ac5_shift_soundness() {
    std::mt19937 rng(5);
    Outcome o;
    int sampled = 0, reduced = 0, attempts = 0;
    while (sampled < 300 && attempts < 100000) {
        ++attempts;
        const auto pr = oracle::random_problem(rng, 8, 60);
        const auto raw = plan(pr, {.enable_shifts = false});
        if (raw.contentions_before == 0) continue;
        ++sampled;
        const auto shifted = plan(pr);
        const bool same_map = oracle::expand(raw).moves == oracle::expand(shifted).moves &&
                              oracle::moves_match_ownership(shifted);
        reduced += shifted.contentions_after < shifted.contentions_before;
        if (!same_map || shifted.contentions_after > shifted.contentions_before) {
            o.pass = false;
            o.detail += " " + to_string(pr.src) + "->" + to_string(pr.dst);
        }
    }
    if (sampled < 300) o.pass = false;
    o.detail = std::to_string(sampled) + " contended configurations, " + std::to_string(reduced) + " reduced" + o.detail;
    return o;
}

Outcome ac6_cost_model() {
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> u(1e-9, 1e-2);
    Outcome o;
    int exact = 0;
    for (int i = 0; i < 50; ++i) {
        const auto pr = oracle::random_problem(rng, 6, 48);
        const auto pl = plan(pr);
        const double lambda = i % 10 == 0 ? 0.0 : u(rng);
        const double tau = i % 10 == 1 ? 0.0 : u(rng);
        const long long n = pr.blocks.nblocks();
        const long long R = std::lcm(pr.src.rows, pr.dst.rows), C = std::lcm(pr.src.cols, pr.dst.cols);
        const double expected =
            static_cast<double>(steps_formula(pr.src, pr.dst)) * (lambda + static_cast<double>(n * n / (R * C)) * tau);
        if (estimate_cost(pl, {lambda, tau}) == expected)
            ++exact;
        else
            o.pass = false;
    }
    o.detail = std::to_string(exact) + "/50 bit-exact (lambda=0 and tau=0 included)";
    return o;
}

Outcome ac7_call_counts() {
    const long long a = communication_calls(plan_min(nearly_square(8), nearly_square(40)));
    const long long b = communication_calls(plan_min(nearly_square(8), nearly_square(50)));
    const long long c = caterpillar_call_count(8, 40), d = caterpillar_call_count(8, 50);
    Outcome o;
    o.pass = a == 80 && b == 196 && c == 160 && d == 392;
    o.detail = "8->40: " + std::to_string(a) + " (want 80), 8->50: " + std::to_string(b) +
               " (want 196), caterpillar 8->40: " + std::to_string(c) + " (want 160), 8->50: " + std::to_string(d) +
               " (want 392)";
    return o;
}

Outcome ac8_round_trip() {
    std::mt19937 rng(8);
    Outcome o;
    int ok = 0;
    for (int i = 0; i < 20; ++i) {
        const auto pr = oracle::random_problem(rng, 6, 36, 1 + i % 3);
        const auto rep = resize_session({pr.src, pr.dst, pr.src}, pr.blocks);
        if (rep.all_verified && rep.final_stores == distribute_initial(pr.blocks, pr.src))
            ++ok;
        else {
            o.pass = false;
            o.detail += " " + to_string(pr.src) + "->" + to_string(pr.dst);
        }
    }
    o.detail = std::to_string(ok) + "/20 sessions restored" + o.detail;
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* name;
        double time_limit_s;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"AC1", "reference schedule counts", 1.0, ac1_reference_rows},
        {"AC2", "step-count formula", 0.0, ac2_step_formula},
        {"AC3", "contention-free growth", 30.0, ac3_contention_free},
        {"AC4", "oracle equivalence", 120.0, ac4_oracle_equivalence},
        {"AC5", "shift soundness", 0.0, ac5_shift_soundness},
        {"AC6", "cost model exactness", 0.0, ac6_cost_model},
        {"AC7", "communication call counts", 0.0, ac7_call_counts},
        {"AC8", "round trip", 0.0, ac8_round_trip},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.time_limit_s > 0 && secs > c.time_limit_s) {
            o.pass = false;
            o.detail += " (over the " + std::to_string(static_cast<int>(c.time_limit_s)) + " s budget)";
        }
        failures += !o.pass;
        std::printf("%s %s  %s: %s [%.2f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}
