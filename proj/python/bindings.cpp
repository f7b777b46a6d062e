#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "seqscale/estimator.hpp"
#include "seqscale/harness/config.hpp"
#include "seqscale/harness/runner.hpp"
#include "seqscale/harness/trajectory_io.hpp"
#include "seqscale/markov.hpp"
#include "seqscale/simulation.hpp"
#include "seqscale/stopping.hpp"

namespace py = pybind11;

using namespace seqscale;

namespace {

py::dict decision_to_dict(const stopping::StoppingDecision& decision) {
    py::dict out;
    out["case"] = stopping::to_string(decision.case_tag);
    out["iterations"] = decision.iterations.has_value() ? py::cast(*decision.iterations)
                                                        : py::none();
    out["reachable"] = decision.reachable();
    out["unresolved"] = decision.unresolved;
    return out;
}

py::dict record_to_dict(const harness::TrajectoryRecord& record) {
    py::dict out;
    out["question_id"] = record.question_id;
    out["variant"] = record.variant;
    out["prior_p0"] = record.prior_p0;
    out["a"] = record.a.has_value() ? py::cast(*record.a) : py::none();
    out["b"] = record.b.has_value() ? py::cast(*record.b) : py::none();
    out["sigma"] = record.sigma;
    out["tau"] = record.tau;
    out["regime"] = record.regime;
    py::list iterations;
    for (const auto& entry : record.iterations) {
        py::dict item;
        item["i"] = entry.i;
        item["score"] = entry.score;
        item["map_estimate"] = entry.map_estimate;
        item["stopped"] = entry.stopped;
        item["truth"] = entry.truth.has_value() ? py::cast(*entry.truth) : py::none();
        iterations.append(item);
    }
    out["iterations"] = iterations;
    out["stop_reason"] = record.stop_reason;
    out["token_proxy"] = record.token_proxy;
    out["final_correct"] =
        record.final_correct.has_value() ? py::cast(*record.final_correct) : py::none();
    out["error"] = record.error.has_value() ? py::cast(*record.error) : py::none();
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-state correctness-chain control engine";

    py::class_<markov::TransitionModel>(m, "TransitionModel")
        .def(py::init<double, double>(), py::arg("a"), py::arg("b"))
        .def_property_readonly("a", &markov::TransitionModel::a)
        .def_property_readonly("b", &markov::TransitionModel::b)
        .def_property_readonly("lambda_", &markov::TransitionModel::lambda)
        .def_property_readonly("fixed_point", &markov::TransitionModel::fixed_point)
        .def("__repr__", [](const markov::TransitionModel& model) {
            return "TransitionModel(a=" + std::to_string(model.a()) +
                   ", b=" + std::to_string(model.b()) + ")";
        });

    m.def("transition_matrix_power",
          [](const markov::TransitionModel& model, std::int64_t i) {
              const auto power = markov::transition_matrix_power(model, i);
              return std::vector<std::vector<double>>{
                  {power[0][0], power[0][1]}, {power[1][0], power[1][1]}};
          },
          py::arg("model"), py::arg("i"));
    m.def("correct_probability_at", &markov::correct_probability_at, py::arg("model"),
          py::arg("p0"), py::arg("i"));
    m.def("benefit_at", &markov::benefit_at, py::arg("model"), py::arg("p0"), py::arg("sigma"),
          py::arg("i"));
    m.def("asymptotic_benefit", &markov::asymptotic_benefit, py::arg("model"), py::arg("p0"),
          py::arg("sigma"));
    m.def("classify_regime",
          [](const markov::TransitionModel& model, double p0, double sigma) {
              return std::string(markov::to_string(markov::classify_regime(model, p0, sigma)));
          },
          py::arg("model"), py::arg("p0"), py::arg("sigma"));
    m.def("convergence_limit", &markov::convergence_limit, py::arg("model"));

    m.def("optimal_iterations",
          [](const markov::TransitionModel& model, double p0, double tau) {
              return decision_to_dict(stopping::optimal_iterations(model, p0, tau));
          },
          py::arg("model"), py::arg("p0"), py::arg("tau"));
    m.def("stopping_satisfied", &stopping::stopping_satisfied, py::arg("model"),
          py::arg("p_estimate"), py::arg("tau"), py::arg("i"));
    m.def("brute_force_optimal_iterations",
          [](const markov::TransitionModel& model, double p0, double tau, std::int64_t horizon) {
              const auto result =
                  stopping::brute_force_optimal_iterations(model, p0, tau, horizon);
              py::dict out;
              out["outcome"] = result.outcome == stopping::ScanOutcome::Found
                                   ? "found"
                                   : (result.outcome == stopping::ScanOutcome::None
                                          ? "none"
                                          : "unresolved");
              out["iterations"] = result.iterations.has_value() ? py::cast(*result.iterations)
                                                                : py::none();
              return out;
          },
          py::arg("model"), py::arg("p0"), py::arg("tau"),
          py::arg("horizon") = stopping::kDefaultHorizon);

    py::class_<estimate::BetaPosterior>(m, "BetaPosterior")
        .def(py::init([](double alpha, double beta) {
                 return estimate::BetaPosterior{alpha, beta};
             }),
             py::arg("alpha"), py::arg("beta"))
        .def_readonly("alpha", &estimate::BetaPosterior::alpha)
        .def_readonly("beta", &estimate::BetaPosterior::beta);
    m.def("init_prior", &estimate::init_prior, py::arg("p_hat_0"), py::arg("gamma"));
    m.def("update_posterior", &estimate::update_posterior, py::arg("posterior"),
          py::arg("score"));
    m.def("map_estimate", &estimate::map_estimate, py::arg("posterior"));

    m.def("count_transitions",
          [](const std::vector<bool>& states) {
              std::vector<estimate::AnswerState> converted;
              converted.reserve(states.size());
              for (const bool s : states) {
                  converted.push_back(s ? estimate::AnswerState::Correct
                                        : estimate::AnswerState::Wrong);
              }
              const auto counts = estimate::count_transitions(converted);
              py::dict out;
              out["from_correct"] = counts.from_correct;
              out["correct_to_wrong"] = counts.correct_to_wrong;
              out["from_wrong"] = counts.from_wrong;
              out["wrong_to_correct"] = counts.wrong_to_correct;
              return out;
          },
          py::arg("states"));
    m.def("estimate_transition_model",
          [](std::uint64_t from_correct, std::uint64_t correct_to_wrong, std::uint64_t from_wrong,
             std::uint64_t wrong_to_correct) {
              return estimate::estimate_transition_model(
                  {from_correct, correct_to_wrong, from_wrong, wrong_to_correct});
          },
          py::arg("from_correct"), py::arg("correct_to_wrong"), py::arg("from_wrong"),
          py::arg("wrong_to_correct"));

    m.def("simulate_chain",
          [](const std::string& question_id, double p0, double a, double b, std::int64_t steps,
             std::uint64_t seed) {
              sim::SyntheticQuestionSpec spec;
              spec.question_id = question_id;
              spec.true_p0 = p0;
              spec.a = a;
              spec.b = b;
              const auto states = sim::simulate_chain(spec, steps, seed);
              std::vector<bool> out;
              out.reserve(states.size());
              for (const auto s : states) out.push_back(s == estimate::AnswerState::Correct);
              return out;
          },
          py::arg("question_id"), py::arg("p0"), py::arg("a"), py::arg("b"), py::arg("steps"),
          py::arg("seed"));
    m.def("monte_carlo_correct_probability",
          [](double p0, double a, double b, std::int64_t i, std::int64_t trials,
             std::uint64_t seed) {
              sim::SyntheticQuestionSpec spec;
              spec.question_id = "mc";
              spec.true_p0 = p0;
              spec.a = a;
              spec.b = b;
              const auto result = sim::monte_carlo_correct_probability(spec, i, trials, seed);
              return py::make_tuple(result.estimate, result.standard_error);
          },
          py::arg("p0"), py::arg("a"), py::arg("b"), py::arg("i"), py::arg("trials"),
          py::arg("seed"));

    m.def("run_config",
          [](const std::string& config_json) {
              const harness::RunConfig config = harness::parse_run_config(config_json);
              const harness::RunOutcome outcome = harness::execute_run(config);
              py::list records;
              for (const auto& record : outcome.records) records.append(record_to_dict(record));
              py::dict out;
              out["records"] = records;
              out["bounds"] = harness::bounds_to_json(outcome.dataset.bounds);
              return out;
          },
          py::arg("config_json"),
          "Run a full configured dataset (synthetic or remote) and return the records");
}
