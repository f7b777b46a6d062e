#include "seqscale/harness/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

namespace seqscale::harness {

std::vector<ReportRow> aggregate_report(std::span<const TrajectoryRecord> records) {
    std::map<std::tuple<std::string, double, double>, ReportRow> groups;
    for (const TrajectoryRecord& record : records) {
        const auto key = std::make_tuple(record.variant, record.tau, record.sigma);
        ReportRow& row = groups[key];
        row.variant = record.variant;
        row.tau = record.tau;
        row.sigma = record.sigma;
        ++row.questions;
        row.mean_iterations += static_cast<double>(record.iterations.size());
        row.total_token_proxy += record.token_proxy;
        if (record.final_correct.has_value()) {
            ++row.labeled;
            if (*record.final_correct) ++row.correct;
        }
        if (record.stop_reason == "gated") ++row.gated;
        else if (record.stop_reason == "stopping_rule_met") ++row.stopped;
        else if (record.stop_reason == "budget_exhausted") ++row.budget;
        else if (record.stop_reason == "error") ++row.errors;
    }
    std::vector<ReportRow> rows;
    rows.reserve(groups.size());
    for (auto& [key, row] : groups) {
        (void)key;
        if (row.questions > 0) {
            row.mean_iterations /= static_cast<double>(row.questions);
            row.mean_token_proxy = static_cast<double>(row.total_token_proxy) /
                                   static_cast<double>(row.questions);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string report_csv(std::span<const ReportRow> rows) {
    std::ostringstream out;
    out << "variant,tau,sigma,questions,labeled,accuracy,mean_iterations,"
           "total_token_proxy,mean_token_proxy,gated,stopped,budget,errors\n";
    for (const ReportRow& row : rows) {
        out << row.variant << ',' << row.tau << ',' << row.sigma << ',' << row.questions << ','
            << row.labeled << ',';
        if (row.labeled > 0) out << row.accuracy();
        out << ',' << row.mean_iterations << ',' << row.total_token_proxy << ','
            << row.mean_token_proxy << ',' << row.gated << ',' << row.stopped << ',' << row.budget
            << ',' << row.errors << '\n';
    }
    return out.str();
}

} // namespace seqscale::harness
