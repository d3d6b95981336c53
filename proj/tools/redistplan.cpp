// redistplan command-line front end for planning and simulating 2-D block-cyclic redistribution.
//
// Exit codes: 0 success, 1 domain failure (validation, verification),
// 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "redistplan/analytics.hpp"
#include "redistplan/io.hpp"

namespace rp = redistplan;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProblemArgs {
    std::string src, dst;
    int nblocks = 0;
    int block_size = 1;
};

void add_problem_flags(CLI::App* cmd, ProblemArgs& a, bool required = true) {
    auto* s = cmd->add_option("--src", a.src, "source grid RxC");
    auto* d = cmd->add_option("--dst", a.dst, "destination grid RxC");
    auto* n = cmd->add_option("--nblocks", a.nblocks, "blocks per matrix side (N)");
    if (required) {
        s->required();
        d->required();
        n->required();
    }
    cmd->add_option("--block-size", a.block_size, "block side in elements (NB)")->check(CLI::PositiveNumber);
}

rp::GridShape grid_arg(const std::string& text) {
    try {
        return rp::parse_grid(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

rp::RedistProblem problem_of(const ProblemArgs& a) {
    return rp::validate({grid_arg(a.src), grid_arg(a.dst), rp::BlockDesc::from_blocks(a.nblocks, a.block_size)});
}

std::string resolve_format(const std::string& flag, const std::string& fallback) {
    std::string f = flag;
    if (f.empty())
        if (const char* env = std::getenv("REDISTPLAN_FORMAT"); env && *env) f = env;
    if (f.empty()) f = fallback;
    if (f != "json" && f != "csv" && f != "text") throw UsageError("unknown format '" + f + "'");
    return f;
}

void emit(const std::string& out_path, const std::string& body) {
    if (out_path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + out_path);
    os << body;
}

std::vector<rp::GridShape> parse_chain(const std::string& text) {
    std::vector<rp::GridShape> grids;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) grids.push_back(grid_arg(item));
    if (grids.size() < 2) throw UsageError("--chain needs at least two grids");
    return grids;
}

std::vector<rp::SweepConfig> parse_configs(const std::string& text) {
    std::vector<rp::SweepConfig> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw UsageError("config '" + item + "' must be SRC:DST");
        out.push_back({grid_arg(item.substr(0, colon)), grid_arg(item.substr(colon + 1))});
    }
    return out;
}

std::vector<rp::SweepConfig> preset_configs(const std::string& name) {
    const std::vector<rp::GridShape>* grids = nullptr;
    if (name == "nearly-square")
        grids = &rp::presets::nearly_square_grids();
    else if (name == "skewed")
        grids = &rp::presets::skewed_grids();
    else
        throw UsageError("unknown preset '" + name + "'");
    std::vector<rp::SweepConfig> out;
    for (const auto& a : *grids)
        for (const auto& b : *grids)
            if (!(a == b)) out.push_back({a, b});
    return out;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Plan and simulate 2-D block-cyclic data redistribution"};
    app.require_subcommand(1);
    app.set_version_flag("--version", rp::io::kToolVersion);

    ProblemArgs pa;
    std::string format, out_path;
    bool no_shifts = false;

    auto* plan_cmd = app.add_subcommand("plan", "compute a communication schedule");
    add_problem_flags(plan_cmd, pa);
    plan_cmd->add_option("--out", out_path, "write to file instead of stdout");
    plan_cmd->add_option("--format", format, "json | csv");
    plan_cmd->add_flag("--no-shifts", no_shifts, "skip contention-reducing rotations");

    auto* stats_cmd = app.add_subcommand("stats", "schedule statistics");
    add_problem_flags(stats_cmd, pa);
    stats_cmd->add_option("--format", format, "json | csv");
    stats_cmd->add_option("--out", out_path, "write to file instead of stdout");

    rp::CostParams cost;
    double tau_byte = -1.0;
    auto* cost_cmd = app.add_subcommand("cost", "modeled transfer cost");
    add_problem_flags(cost_cmd, pa);
    cost_cmd->add_option("--lambda", cost.lambda, "seconds per message")->check(CLI::NonNegativeNumber);
    auto* tau_opt = cost_cmd->add_option("--tau", cost.tau, "seconds per block")->check(CLI::NonNegativeNumber);
    cost_cmd->add_option("--tau-byte", tau_byte, "seconds per byte (8-byte elements)")
        ->check(CLI::NonNegativeNumber)
        ->excludes(tau_opt);
    cost_cmd->add_option("--format", format, "json | csv");

    std::string chain, dump_path;
    auto* sim_cmd = app.add_subcommand("simulate", "execute a plan in memory and verify it");
    add_problem_flags(sim_cmd, pa, false);
    sim_cmd->add_option("--chain", chain, "comma-separated grid sequence, e.g. 2x2,3x4,2x2");
    sim_cmd->add_option("--dump", dump_path, "write final block placement CSV");
    sim_cmd->add_option("--format", format, "text | json");

    bool table2 = false;
    std::string configs, preset;
    int sweep_n = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "statistics over many configurations");
    sweep_cmd->add_flag("--table2", table2, "replay the reference send/recv count table");
    sweep_cmd->add_option("--configs", configs, "SRC:DST[,SRC:DST...]");
    sweep_cmd->add_option("--preset", preset, "nearly-square | skewed (all ordered pairs)");
    sweep_cmd->add_option("--nblocks", sweep_n, "N for every row; 0 = smallest compatible")->check(CLI::NonNegativeNumber);
    sweep_cmd->add_option("--lambda", cost.lambda, "seconds per message")->check(CLI::NonNegativeNumber);
    sweep_cmd->add_option("--tau", cost.tau, "seconds per block")->check(CLI::NonNegativeNumber);
    sweep_cmd->add_option("--format", format, "csv | json");
    sweep_cmd->add_option("--out", out_path, "write to file instead of stdout");

    int calls_p = 0, calls_q = 0;
    auto* calls_cmd = app.add_subcommand("calls", "communication call counts vs a Caterpillar exchange");
    calls_cmd->add_option("--p", calls_p, "source processor count")->required()->check(CLI::PositiveNumber);
    calls_cmd->add_option("--q", calls_q, "destination processor count")->required()->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*plan_cmd) {
            const auto fmt = resolve_format(format, "json");
            const auto pl = rp::plan(problem_of(pa), {.enable_shifts = !no_shifts});
            if (fmt == "csv") {
                std::ostringstream os;
                rp::io::write_transfer_csv(os, pl.transfer);
                emit(out_path, os.str());
            } else {
                emit(out_path, dump(rp::io::plan_to_json(pl)));
            }
        } else if (*stats_cmd) {
            const auto fmt = resolve_format(format, "json");
            const auto s = rp::stats(rp::plan(problem_of(pa)));
            std::ostringstream os;
            if (fmt == "csv")
                rp::io::write_stats_csv(os, s);
            else
                os << dump(rp::io::stats_to_json(s));
            emit(out_path, os.str());
        } else if (*cost_cmd) {
            const auto fmt = resolve_format(format, "json");
            const auto problem = problem_of(pa);
            if (tau_byte >= 0.0) cost.tau = tau_byte * problem.blocks.nb * problem.blocks.nb * 8.0;
            const auto pl = rp::plan(problem);
            const auto s = rp::stats(pl);
            const double seconds = rp::estimate_cost(pl, cost);
            if (fmt == "csv") {
                std::cout << "steps,message_blocks,lambda,tau,modeled_cost_s\n"
                          << s.steps << ',' << s.message_blocks << ',' << rp::io::format_double(cost.lambda) << ','
                          << rp::io::format_double(cost.tau) << ',' << rp::io::format_double(seconds) << '\n';
            } else {
                nlohmann::ordered_json j{{"steps", s.steps},        {"message_blocks", s.message_blocks},
                                         {"lambda", cost.lambda},   {"tau", cost.tau},
                                         {"modeled_cost_s", seconds}};
                std::cout << dump(j);
            }
        } else if (*sim_cmd) {
            const auto fmt = resolve_format(format, "text");
            std::vector<rp::GridShape> grids;
            if (!chain.empty()) {
                grids = parse_chain(chain);
            } else {
                if (pa.src.empty() || pa.dst.empty()) throw UsageError("simulate needs --src/--dst or --chain");
                grids = {grid_arg(pa.src), grid_arg(pa.dst)};
            }
            if (pa.nblocks < 1) throw UsageError("--nblocks is required");
            const auto desc = rp::BlockDesc::from_blocks(pa.nblocks, pa.block_size);
            const auto rep = rp::resize_session(grids, desc);
            if (fmt == "json") {
                std::cout << dump(rp::io::session_to_json(rep));
            } else {
                for (std::size_t h = 0; h < rep.hops.size(); ++h) {
                    const auto& hop = rep.hops[h];
                    const auto s = rp::stats(hop.plan);
                    std::cout << "hop " << h << ": " << rp::to_string(hop.plan.problem.src) << " -> "
                              << rp::to_string(hop.plan.problem.dst) << " N=" << desc.nblocks()
                              << " steps=" << s.steps << " copies=" << s.copies << " sendrecvs=" << s.sendrecvs
                              << " shift_case=" << rp::to_string(hop.plan.shift_case)
                              << " contentions_before=" << hop.plan.contentions_before
                              << " contentions_after=" << hop.plan.contentions_after
                              << " max_fan_in=" << s.max_fan_in << " "
                              << (hop.verification.passed ? "VERIFIED" : "FAILED") << " ("
                              << hop.verification.checked << " blocks)\n";
                    for (const auto& m : hop.verification.first_mismatches) std::cout << "  mismatch: " << m << '\n';
                }
                std::cout << (rep.all_verified ? "VERIFIED" : "FAILED") << '\n';
            }
            if (!dump_path.empty()) {
                std::ostringstream os;
                rp::io::write_block_dump(os, rep.final_stores);
                emit(dump_path, os.str());
            }
            return rep.all_verified ? 0 : 1;
        } else if (*sweep_cmd) {
            const auto fmt = resolve_format(format, "csv");
            std::ostringstream os;
            if (table2) {
                const auto rows = rp::compare_table2();
                if (fmt == "json") throw UsageError("--table2 supports csv only");
                rp::io::write_table2_csv(os, rows);
            } else {
                std::vector<rp::SweepConfig> cfgs;
                if (!configs.empty()) cfgs = parse_configs(configs);
                if (!preset.empty()) {
                    auto more = preset_configs(preset);
                    cfgs.insert(cfgs.end(), more.begin(), more.end());
                }
                if (cfgs.empty()) throw UsageError("sweep needs --table2, --configs or --preset");
                const auto rows = rp::sweep(cfgs, sweep_n, cost);
                if (fmt == "json")
                    os << dump(rp::io::sweep_to_json(rows));
                else
                    rp::io::write_sweep_csv(os, rows);
                for (std::size_t i = 0; i < rows.size(); ++i)
                    if (!rows[i].error.empty()) std::cerr << "row " << i << ": " << rows[i].error << '\n';
            }
            emit(out_path, os.str());
        } else if (*calls_cmd) {
            const auto p = rp::nearly_square(calls_p), q = rp::nearly_square(calls_q);
            const auto pl = rp::plan({p, q, rp::BlockDesc::from_blocks(rp::min_compatible_nblocks(p, q))});
            const auto s = rp::stats(pl);
            nlohmann::ordered_json j{{"src", rp::to_string(p)},
                                     {"dst", rp::to_string(q)},
                                     {"communication_calls", rp::communication_calls(pl)},
                                     {"sendrecvs", s.sendrecvs},
                                     {"copies", s.copies},
                                     {"caterpillar_calls", rp::caterpillar_call_count(p, q)}};
            std::cout << dump(j);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
