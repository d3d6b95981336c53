#include "redistplan/io.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

namespace redistplan::io {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json meta() { return {{"tool", kToolVersion}}; }

template <class T>
T field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

ordered_json table_to_json(const Table<Pid>& t) {
    auto out = ordered_json::array();
    for (int i = 0; i < t.rows(); ++i) out.push_back(std::vector<Pid>(t.row(i).begin(), t.row(i).end()));
    return out;
}

Table<Pid> table_from_json(const json& j, int rows, int cols, const char* what) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw FormatError(std::string(what) + ": expected " + std::to_string(rows) + " rows");
    Table<Pid> t(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const auto& r = j[static_cast<std::size_t>(i)];
        if (!r.is_array() || static_cast<int>(r.size()) != cols)
            throw FormatError(std::string(what) + ": row " + std::to_string(i) + " needs " + std::to_string(cols) +
                              " entries");
        for (int k = 0; k < cols; ++k) {
            if (!r[static_cast<std::size_t>(k)].is_number_integer())
                throw FormatError(std::string(what) + ": non-integer entry");
            t(i, k) = r[static_cast<std::size_t>(k)].get<Pid>();
        }
    }
    return t;
}

ordered_json problem_to_json(const RedistProblem& p) {
    return {{"src", to_string(p.src)}, {"dst", to_string(p.dst)}, {"n", p.blocks.n}, {"nb", p.blocks.nb}};
}

const char* csv_header_sweep = "src,dst,topology,steps,copies,sendrecvs,contentions,message_blocks,modeled_cost_s";

}  // namespace

std::string format_double(double v) { return json(v).dump(); }

ordered_json plan_to_json(const RedistributionPlan& plan) {
    const auto& t = plan.transfer;
    auto coords = ordered_json::array();
    for (int i = 0; i < t.steps(); ++i) {
        auto row = ordered_json::array();
        for (int k = 0; k < t.sources(); ++k) row.push_back({t.coords(i, k).i, t.coords(i, k).j});
        coords.push_back(std::move(row));
    }
    ordered_json doc;
    doc["meta"] = meta();
    doc["version"] = kPlanVersion;
    doc["problem"] = problem_to_json(plan.problem);
    doc["dims"] = {{"R", plan.dims.R}, {"C", plan.dims.C}, {"sup", plan.dims.sup}};
    doc["shift_case"] = to_string(plan.shift_case);
    doc["shifts_applied"] = plan.shifts_applied;
    doc["contentions"] = {{"before", plan.contentions_before}, {"after", plan.contentions_after}};
    doc["transfer"] = table_to_json(t.dest);
    doc["coords"] = std::move(coords);
    doc["recv"] = plan.recv ? table_to_json(plan.recv->cells) : ordered_json(nullptr);
    return doc;
}

namespace {

RedistributionPlan parse_plan(const json& doc) {
    if (field<int>(doc, "version") != kPlanVersion) throw FormatError("unsupported plan version");
    RedistributionPlan plan;
    const auto& pj = doc.at("problem");
    try {
        plan.problem = {parse_grid(field<std::string>(pj, "src")), parse_grid(field<std::string>(pj, "dst")),
                        {field<int>(pj, "n"), field<int>(pj, "nb")}};
        validate(plan.problem);
        plan.shift_case = parse_shift_case(field<std::string>(doc, "shift_case"));
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
    plan.dims = compute_superblock(plan.problem);
    const auto& dj = doc.at("dims");
    if (field<int>(dj, "R") != plan.dims.R || field<int>(dj, "C") != plan.dims.C ||
        field<int>(dj, "sup") != plan.dims.sup)
        throw FormatError("dims do not match the problem");
    plan.shifts_applied = field<bool>(doc, "shifts_applied");
    const auto& cj = doc.at("contentions");
    plan.contentions_before = field<long long>(cj, "before");
    plan.contentions_after = field<long long>(cj, "after");

    const int nsrc = plan.problem.src.size();
    const int steps = plan.dims.R * plan.dims.C / nsrc;
    plan.transfer.dest = table_from_json(doc.at("transfer"), steps, nsrc, "transfer");
    for (Pid d : plan.transfer.dest.cells())
        if (d < 0 || d >= plan.problem.dst.size()) throw FormatError("transfer: destination pid out of range");
    plan.transfer.coords = Table<RelCoord>(steps, nsrc);
    const auto& co = doc.at("coords");
    if (!co.is_array() || static_cast<int>(co.size()) != steps) throw FormatError("coords: wrong row count");
    for (int i = 0; i < steps; ++i) {
        const auto& r = co[static_cast<std::size_t>(i)];
        if (!r.is_array() || static_cast<int>(r.size()) != nsrc) throw FormatError("coords: wrong column count");
        for (int k = 0; k < nsrc; ++k) {
            const auto& c = r[static_cast<std::size_t>(k)];
            if (!c.is_array() || c.size() != 2) throw FormatError("coords: entries are [row, col] pairs");
            RelCoord rc{c[0].get<int>(), c[1].get<int>()};
            if (rc.i < 0 || rc.i >= plan.dims.R || rc.j < 0 || rc.j >= plan.dims.C)
                throw FormatError("coords: entry outside the superblock");
            plan.transfer.coords(i, k) = rc;
        }
    }
    if (count_contentions(plan.transfer) != plan.contentions_after)
        throw FormatError("contention count does not match the transfer table");

    const auto& rj = doc.at("recv");
    if (rj.is_null()) {
        if (plan.contentions_after == 0) throw FormatError("recv table required for contention-free plans");
    } else {
        if (plan.contentions_after != 0) throw FormatError("recv table present on a contended plan");
        plan.recv = RecvTable{table_from_json(rj, steps, plan.problem.dst.size(), "recv")};
        if (!(*plan.recv == build_recv(plan.transfer, plan.problem.dst)))
            throw FormatError("recv table is not the inverse of the transfer table");
    }
    return plan;
}

}  // namespace

RedistributionPlan plan_from_json(const json& doc) {
    try {
        return parse_plan(doc);
    } catch (const json::exception& e) {
        throw FormatError(e.what());
    }
}

void write_transfer_csv(std::ostream& os, const TransferTable& t) {
    os << "step,src,dst,rel_row,rel_col\n";
    for (int i = 0; i < t.steps(); ++i)
        for (int k = 0; k < t.sources(); ++k)
            os << i << ',' << k << ',' << t.dest(i, k) << ',' << t.coords(i, k).i << ',' << t.coords(i, k).j << '\n';
}

TransferTable read_transfer_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "step,src,dst,rel_row,rel_col") throw FormatError("bad transfer CSV header");
    struct Entry {
        int step, src, dst, i, j;
    };
    std::vector<Entry> entries;
    int steps = 0, nsrc = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Entry e{};
        char c1, c2, c3, c4;
        if (!(ls >> e.step >> c1 >> e.src >> c2 >> e.dst >> c3 >> e.i >> c4 >> e.j) || c1 != ',' || c2 != ',' ||
            c3 != ',' || c4 != ',' || e.step < 0 || e.src < 0)
            throw FormatError("bad transfer CSV line: " + line);
        steps = std::max(steps, e.step + 1);
        nsrc = std::max(nsrc, e.src + 1);
        entries.push_back(e);
    }
    if (static_cast<long long>(entries.size()) != static_cast<long long>(steps) * nsrc)
        throw FormatError("transfer CSV is not a full table");
    TransferTable t{Table<Pid>(steps, nsrc, -1), Table<RelCoord>(steps, nsrc)};
    for (const auto& e : entries) {
        if (t.dest(e.step, e.src) != -1) throw FormatError("duplicate transfer CSV entry");
        t.dest(e.step, e.src) = e.dst;
        t.coords(e.step, e.src) = {e.i, e.j};
    }
    return t;
}

ordered_json stats_to_json(const ScheduleStats& s) {
    return {{"steps", s.steps},           {"copies", s.copies},         {"sendrecvs", s.sendrecvs},
            {"contentions", s.contentions}, {"max_fan_in", s.max_fan_in}, {"message_blocks", s.message_blocks}};
}

void write_stats_csv(std::ostream& os, const ScheduleStats& s) {
    os << "steps,copies,sendrecvs,contentions,max_fan_in,message_blocks\n"
       << s.steps << ',' << s.copies << ',' << s.sendrecvs << ',' << s.contentions << ',' << s.max_fan_in << ','
       << s.message_blocks << '\n';
}

ordered_json session_to_json(const SessionReport& rep) {
    ordered_json doc;
    doc["meta"] = meta();
    doc["version"] = kPlanVersion;
    auto hops = ordered_json::array();
    for (const auto& h : rep.hops) {
        ordered_json hj;
        hj["problem"] = problem_to_json(h.plan.problem);
        hj["shift_case"] = to_string(h.plan.shift_case);
        hj["shifts_applied"] = h.plan.shifts_applied;
        hj["contentions_before"] = h.plan.contentions_before;
        hj["contentions_after"] = h.plan.contentions_after;
        hj["stats"] = stats_to_json(stats(h.plan));
        auto steps = ordered_json::array();
        for (const auto& s : h.steps)
            steps.push_back({{"step", s.step}, {"copies", s.copies}, {"transfers", s.transfers},
                             {"max_fan_in", s.max_fan_in}});
        hj["steps"] = std::move(steps);
        hj["verified"] = h.verification.passed;
        hj["checked_blocks"] = h.verification.checked;
        hj["mismatches"] = h.verification.mismatches;
        hj["first_mismatches"] = h.verification.first_mismatches;
        hops.push_back(std::move(hj));
    }
    doc["hops"] = std::move(hops);
    doc["verified"] = rep.all_verified;
    return doc;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << csv_header_sweep << '\n';
    for (const auto& r : rows) {
        os << to_string(r.config.src) << ',' << to_string(r.config.dst) << ',' << r.topology;
        if (r.stats) {
            const auto& s = *r.stats;
            os << ',' << s.steps << ',' << s.copies << ',' << s.sendrecvs << ',' << s.contentions << ','
               << s.message_blocks << ',' << format_double(r.modeled_cost);
        } else {
            os << ",,,,,,";
        }
        os << '\n';
    }
}

ordered_json sweep_to_json(const std::vector<SweepRow>& rows) {
    ordered_json doc;
    doc["meta"] = meta();
    auto arr = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json rj{{"src", to_string(r.config.src)}, {"dst", to_string(r.config.dst)}, {"topology", r.topology}};
        rj["nblocks"] = r.nblocks;
        if (r.stats) {
            rj["stats"] = stats_to_json(*r.stats);
            rj["modeled_cost_s"] = r.modeled_cost;
        } else {
            rj["error"] = r.error;
        }
        arr.push_back(std::move(rj));
    }
    doc["rows"] = std::move(arr);
    return doc;
}

void write_table2_csv(std::ostream& os, const std::vector<Table2Comparison>& rows) {
    os << "p,q,topology,src,dst,steps,copies,sendrecvs,ref_steps,ref_copies,ref_sendrecvs,flag\n";
    for (const auto& r : rows) {
        os << r.p << ',' << r.q << ',' << r.topology << ',';
        if (r.config && r.computed)
            os << to_string(r.config->src) << ',' << to_string(r.config->dst) << ',' << r.computed->steps << ','
               << r.computed->copies << ',' << r.computed->sendrecvs;
        else
            os << ",,,,";
        os << ",\"" << r.reference_steps << "\"," << r.reference.copies << ',' << r.reference.sendrecvs << ','
           << (!r.config ? "N/A" : r.match ? "MATCH" : "DIVERGE") << '\n';
    }
}

void write_block_dump(std::ostream& os, const std::vector<LocalStore>& stores) {
    os << "x,y,owner,checksum\n";
    std::vector<std::tuple<int, int, Pid, std::uint64_t>> rows;
    for (const auto& s : stores)
        for (int lx = 0; lx < s.local_rows(); ++lx)
            for (int ly = 0; ly < s.local_cols(); ++ly)
                if (const auto& b = s.slot(lx, ly)) rows.emplace_back(b->coord.x, b->coord.y, s.pid(), payload_checksum(*b));
    std::sort(rows.begin(), rows.end());
    for (const auto& [x, y, owner, sum] : rows) {
        std::ostringstream hex;
        hex << std::hex << std::setw(16) << std::setfill('0') << sum;
        os << x << ',' << y << ',' << owner << ',' << hex.str() << '\n';
    }
}

}  // namespace redistplan::io
