#pragma once

// Machine-readable formats: plan documents (JSON, transfer-table CSV), run
// reports, sweep CSV and block dumps.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "redistplan/analytics.hpp"
#include "redistplan/redistribute.hpp"

namespace redistplan::io {

inline constexpr int kPlanVersion = 1;
inline constexpr const char* kToolVersion = "redistplan 1.0.0";

class FormatError : public RedistError {
public:
    using RedistError::RedistError;
};

nlohmann::ordered_json plan_to_json(const RedistributionPlan& plan);
/// Rebuilds a plan; throws FormatError on schema or consistency violations.
RedistributionPlan plan_from_json(const nlohmann::json& doc);

/// Header `step,src,dst,rel_row,rel_col`, one line per transfer entry.
void write_transfer_csv(std::ostream& os, const TransferTable& t);
TransferTable read_transfer_csv(std::istream& is);

nlohmann::ordered_json stats_to_json(const ScheduleStats& s);
void write_stats_csv(std::ostream& os, const ScheduleStats& s);

nlohmann::ordered_json session_to_json(const SessionReport& rep);

/// Header `src,dst,topology,steps,copies,sendrecvs,contentions,message_blocks,modeled_cost_s`.
/// Failed rows keep src/dst/topology and leave the numeric fields empty.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
nlohmann::ordered_json sweep_to_json(const std::vector<SweepRow>& rows);

void write_table2_csv(std::ostream& os, const std::vector<Table2Comparison>& rows);

/// Header `x,y,owner,checksum` with the checksum in hex.
void write_block_dump(std::ostream& os, const std::vector<LocalStore>& stores);

/// Shortest round-trip text for a double ("42.0", "0.1").
std::string format_double(double v);

}  // namespace redistplan::io
