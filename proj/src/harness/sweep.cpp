#include "seqscale/harness/sweep.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "seqscale/harness/runner.hpp"

namespace seqscale::harness {

std::vector<double> parse_grid(const std::string& text) {
    if (text.empty()) return {};
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        std::istringstream in(text);
        std::string part;
        double fields[3];
        int n = 0;
        while (std::getline(in, part, ':') && n < 3) fields[n++] = std::stod(part);
        if (n != 3) throw std::invalid_argument("range grid must be start:end:step");
        const double start = fields[0], end = fields[1], step = fields[2];
        if (step <= 0.0 || end < start) {
            throw std::invalid_argument("range grid must have step > 0 and end >= start");
        }
        const auto count = static_cast<std::int64_t>(std::llround((end - start) / step));
        for (std::int64_t k = 0; k <= count; ++k) {
            const double value = start + static_cast<double>(k) * step;
            if (value <= end + step * 1e-9) values.push_back(value);
        }
        return values;
    }
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        if (!part.empty()) values.push_back(std::stod(part));
    }
    if (values.empty()) throw std::invalid_argument("empty grid specification");
    return values;
}

std::vector<SweepRow> run_sweep(const RunConfig& base, const SweepGrid& grid) {
    const std::vector<double> taus = grid.taus.empty()
                                         ? std::vector<double>{base.controller.tau}
                                         : grid.taus;
    const std::vector<double> gammas = grid.gammas.empty()
                                           ? std::vector<double>{base.controller.gamma}
                                           : grid.gammas;
    const std::vector<double> sigmas = grid.sigmas.empty()
                                           ? std::vector<double>{base.controller.sigma}
                                           : grid.sigmas;

    std::vector<SweepRow> rows;
    for (const double sigma : sigmas) {
        for (const double gamma : gammas) {
            for (const double tau : taus) {
                RunConfig config = base;
                config.controller.tau = tau;
                config.controller.gamma = gamma;
                config.controller.sigma = sigma;
                config.controller.validate();
                const RunOutcome outcome = execute_run(config);

                SweepRow row;
                row.tau = tau;
                row.gamma = gamma;
                row.sigma = sigma;
                for (const TrajectoryRecord& record : outcome.records) {
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
                if (row.questions > 0) {
                    row.mean_iterations /= static_cast<double>(row.questions);
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
    std::ostringstream out;
    out << "tau,gamma,sigma,questions,labeled,accuracy,mean_iterations,total_token_proxy,"
           "gated,stopped,budget,errors\n";
    for (const SweepRow& row : rows) {
        out << row.tau << ',' << row.gamma << ',' << row.sigma << ',' << row.questions << ','
            << row.labeled << ',';
        if (row.labeled > 0) out << row.accuracy();
        out << ',' << row.mean_iterations << ',' << row.total_token_proxy << ',' << row.gated
            << ',' << row.stopped << ',' << row.budget << ',' << row.errors << '\n';
    }
    return out.str();
}

} // namespace seqscale::harness
