#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <unordered_map>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "crowdboost/combiners.hpp"
#include "crowdboost/evaluation.hpp"
#include "crowdboost/io.hpp"
#include "crowdboost/scoring.hpp"

namespace crowdboost::cli {

namespace {

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err)
{
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
    auto logger = std::make_shared<spdlog::logger>("crowdboost", sink);
    logger->set_pattern("[%l] %v");
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("LOG_LEVEL")) {
        const std::string text(env);
        if (text == "error") level = spdlog::level::err;
        else if (text == "warn") level = spdlog::level::warn;
        else if (text == "info") level = spdlog::level::info;
        else if (text == "debug") level = spdlog::level::debug;
    }
    logger->set_level(level);
    return logger;
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path + " for writing");
    return out;
}

void finish_output(std::ofstream& out, const std::string& path)
{
    out.close();
    if (!out) throw DataError("failed writing " + path);
}

struct CombineArgs {
    std::string method;
    std::string forecasts;
    std::string outcomes;
    std::optional<std::size_t> iterations;
    std::uint64_t seed = 0;
    std::string model_out;
};

struct PredictArgs {
    std::string model;
    std::string forecasts;
    std::string outcomes;
    std::string report_out;
    std::size_t bins = kDefaultBins;
};

struct LooArgs {
    std::string method;
    std::string forecasts;
    std::string outcomes;
    std::optional<std::size_t> iterations;
    std::uint64_t seed = 0;
    std::string report_out;
    unsigned threads = 0;
};

struct ScoreArgs {
    std::string forecasts;
    std::string outcomes;
    std::size_t bins = kDefaultBins;
    std::string loss = "exponential";
};

struct SynthArgs {
    std::size_t forecasters = 0;
    std::size_t questions = 0;
    std::string mode;
    double noise = 1.0;
    double coverage = 0.8;
    std::uint64_t seed = 0;
    std::string out_prefix;
};

const std::vector<std::string> kMethods{"bagging", "adaboost", "realboost"};

int do_combine(const CombineArgs& a, std::ostream& out, spdlog::logger& log)
{
    const Method method = parse_method(a.method);
    const std::size_t iterations = a.iterations.value_or(default_iterations(method));
    const ForecastTable table = load_table(a.forecasts, a.outcomes);
    log.info("loaded {} forecasters x {} questions", table.num_forecasters(), table.num_questions());

    TrainingTrace trace;
    const EnsembleModel model = train(method, table, iterations, a.seed, &trace);
    if (!trace.constant_beaten_every_round)
        log.warn("some round had no forecaster better than the constant predictor");
    if (trace.stopped_early)
        log.info("adaboost stopped after {} rounds", model.rounds.size());

    auto file = open_output(a.model_out);
    write_model(model, file);
    finish_output(file, a.model_out);
    out << "trained " << to_string(method) << ": " << model.rounds.size() << " rounds, "
        << model.unique_forecasters() << " unique forecasters\n";
    return kExitOk;
}

int do_predict(const PredictArgs& a, std::ostream& out, spdlog::logger& log)
{
    std::ifstream model_file(a.model);
    if (!model_file) throw DataError("cannot open model file " + a.model);
    const EnsembleModel model = read_model(model_file);

    std::unordered_map<std::string, std::size_t> model_index;
    for (std::size_t i = 0; i < model.forecaster_ids.size(); ++i)
        model_index.emplace(model.forecaster_ids[i], i);

    std::vector<std::string> question_ids;
    std::vector<std::string> forecaster_ids;
    std::vector<std::optional<Probability>> cells;
    std::vector<Outcome> truths;
    if (!a.outcomes.empty()) {
        ForecastTable table = load_table(a.forecasts, a.outcomes);
        question_ids = table.question_ids();
        forecaster_ids = table.forecaster_ids();
        truths = table.outcomes();
        for (std::size_t f = 0; f < table.num_forecasters(); ++f)
            for (std::size_t q = 0; q < table.num_questions(); ++q) cells.push_back(table.at(f, q));
    } else {
        std::ifstream forecasts(a.forecasts);
        if (!forecasts) throw DataError("cannot open forecasts file " + a.forecasts);
        ForecastSheet sheet = parse_forecasts(forecasts);
        question_ids = std::move(sheet.question_ids);
        forecaster_ids = std::move(sheet.forecaster_ids);
        cells = std::move(sheet.forecasts);
    }

    std::size_t unknown = 0;
    for (const auto& id : forecaster_ids)
        if (!model_index.contains(id)) ++unknown;
    if (unknown > 0) log.info("{} forecasters are not part of the model and are ignored", unknown);

    PredictionReport report;
    report.method = model.method;
    std::vector<double> probabilities;
    const std::size_t q_count = question_ids.size();
    for (std::size_t q = 0; q < q_count; ++q) {
        std::vector<std::optional<Probability>> column(model.num_forecasters());
        for (std::size_t f = 0; f < forecaster_ids.size(); ++f) {
            auto it = model_index.find(forecaster_ids[f]);
            if (it != model_index.end()) column[it->second] = cells[f * q_count + q];
        }
        const EnsemblePrediction pred = ensemble_predict(model, column);
        PredictedQuestion row{question_ids[q], pred.margin.value(), pred.probability.value(),
                              classify(pred.margin.value()), std::nullopt};
        if (!truths.empty()) row.truth = truths[q];
        probabilities.push_back(row.probability);
        report.questions.push_back(std::move(row));
    }

    if (!truths.empty()) {
        std::size_t errors = 0;
        for (const auto& q : report.questions)
            if (q.predicted != *q.truth) ++errors;
        report.prediction_errors = errors;
        if (q_count > 0)
            report.score = decompose(probabilities, truths,
                                     scoring_rule_for(make_link(LinkName::Exponential)), a.bins);
    }

    auto file = open_output(a.report_out);
    write_prediction_report(report, file);
    finish_output(file, a.report_out);
    out << "predicted " << q_count << " questions with " << to_string(model.method) << " model";
    if (report.prediction_errors) out << ", " << *report.prediction_errors << " errors";
    out << '\n';
    return kExitOk;
}

int do_loo(const LooArgs& a, std::ostream& out, spdlog::logger& log)
{
    const Method method = parse_method(a.method);
    const std::size_t iterations = a.iterations.value_or(default_iterations(method));
    const ForecastTable table = load_table(a.forecasts, a.outcomes);
    if (method != Method::Bagging && table.num_questions() < 2)
        throw DataError("leave-one-out boosting needs at least 2 questions");
    log.info("leave-one-out {} over {} questions", to_string(method), table.num_questions());

    const EvalReport report = loo_evaluate(table, method, iterations, a.seed, a.threads);
    auto file = open_output(a.report_out);
    write_eval_report(report, file);
    finish_output(file, a.report_out);
    print_eval_summary(report, out);
    return kExitOk;
}

int do_score(const ScoreArgs& a, std::ostream& out, spdlog::logger&)
{
    const ForecastTable table = load_table(a.forecasts, a.outcomes);
    const ScoringRule rule = scoring_rule_for(make_link(a.loss));
    char header[200];
    std::snprintf(header, sizeof header, "%-24s %14s %14s %14s\n", "forecaster", "total",
                  "calibration", "refinement");
    out << header;
    for (std::size_t f = 0; f < table.num_forecasters(); ++f) {
        std::vector<double> forecasts;
        std::vector<Outcome> outcomes;
        for (std::size_t q = 0; q < table.num_questions(); ++q) {
            if (auto cell = table.at(f, q)) {
                forecasts.push_back(cell->value());
                outcomes.push_back(table.outcome(q));
            }
        }
        if (forecasts.empty()) {
            out << table.forecaster_ids()[f] << " (no forecasts)\n";
            continue;
        }
        print_score_report(table.forecaster_ids()[f], decompose(forecasts, outcomes, rule, a.bins),
                           out);
    }
    return kExitOk;
}

int do_synth(const SynthArgs& a, std::ostream& out, spdlog::logger& log)
{
    SyntheticSpec spec;
    spec.forecasters = a.forecasters;
    spec.questions = a.questions;
    spec.mode = parse_synthetic_mode(a.mode);
    spec.noise = a.noise;
    spec.coverage = a.coverage;
    spec.seed = a.seed;
    const ForecastTable table = generate_synthetic(spec);

    const std::string forecasts_path = a.out_prefix + "_forecasts.csv";
    const std::string outcomes_path = a.out_prefix + "_outcomes.csv";
    auto forecasts = open_output(forecasts_path);
    auto outcomes = open_output(outcomes_path);
    write_table(table, forecasts, outcomes);
    finish_output(forecasts, forecasts_path);
    finish_output(outcomes, outcomes_path);
    log.info("wrote {} and {}", forecasts_path, outcomes_path);
    out << "wrote " << forecasts_path << " and " << outcomes_path << '\n';
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Combine probability forecasters with bagging and boosting", "crowdboost"};
    app.require_subcommand(1);

    CombineArgs combine;
    auto* c = app.add_subcommand("combine", "Train an ensemble on a full table and save it");
    c->add_option("--method", combine.method)->required()->check(CLI::IsMember(kMethods));
    c->add_option("--forecasts", combine.forecasts)->required();
    c->add_option("--outcomes", combine.outcomes)->required();
    c->add_option("--iterations", combine.iterations, "Rounds (default 800 adaboost, 70 realboost)")
        ->check(CLI::PositiveNumber);
    c->add_option("--seed", combine.seed);
    c->add_option("--model-out", combine.model_out)->required();

    PredictArgs predict;
    auto* p = app.add_subcommand("predict", "Apply a saved model, optionally scoring it");
    p->add_option("--model", predict.model)->required();
    p->add_option("--forecasts", predict.forecasts)->required();
    p->add_option("--outcomes", predict.outcomes);
    p->add_option("--report-out", predict.report_out)->required();
    p->add_option("--bins", predict.bins)->check(CLI::PositiveNumber);

    LooArgs loo;
    auto* l = app.add_subcommand("loo", "Leave-one-out evaluation of a combiner");
    l->add_option("--method", loo.method)->required()->check(CLI::IsMember(kMethods));
    l->add_option("--forecasts", loo.forecasts)->required();
    l->add_option("--outcomes", loo.outcomes)->required();
    l->add_option("--iterations", loo.iterations)->check(CLI::PositiveNumber);
    l->add_option("--seed", loo.seed);
    l->add_option("--report-out", loo.report_out)->required();
    l->add_option("--threads", loo.threads, "Worker threads (0 = all cores)");

    ScoreArgs score;
    auto* s = app.add_subcommand("score", "Per-forecaster calibration and refinement");
    s->add_option("--forecasts", score.forecasts)->required();
    s->add_option("--outcomes", score.outcomes)->required();
    s->add_option("--bins", score.bins)->check(CLI::PositiveNumber);
    s->add_option("--loss", score.loss, "Loss family generating the score")
        ->check(CLI::IsMember({"exponential", "linear"}));

    SynthArgs synth;
    auto* y = app.add_subcommand("synth", "Write a synthetic forecaster population");
    y->add_option("--forecasters", synth.forecasters)->required()->check(CLI::PositiveNumber);
    y->add_option("--questions", synth.questions)->required()->check(CLI::PositiveNumber);
    y->add_option("--mode", synth.mode)->required()->check(CLI::IsMember({"type1", "type2"}));
    y->add_option("--noise", synth.noise)->check(CLI::NonNegativeNumber);
    y->add_option("--coverage", synth.coverage)->check(CLI::Range(0.0, 1.0));
    y->add_option("--seed", synth.seed);
    y->add_option("--out-prefix", synth.out_prefix)->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    auto log = make_logger(err);
    try {
        if (*c) return do_combine(combine, out, *log);
        if (*p) return do_predict(predict, out, *log);
        if (*l) return do_loo(loo, out, *log);
        if (*s) return do_score(score, out, *log);
        if (*y) return do_synth(synth, out, *log);
    } catch (const DataError& e) {
        log->error("{}", e.what());
        return kExitData;
    } catch (const std::invalid_argument& e) {
        log->error("{}", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        log->error("{}", e.what());
        return kExitData;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace crowdboost::cli
