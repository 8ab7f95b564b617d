#include "crowdboost/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace crowdboost {

namespace {

constexpr std::string_view kForecastHeader = "question_id,forecaster_id,probability";
constexpr std::string_view kOutcomeHeader = "question_id,outcome";
constexpr std::string_view kModelMagic = "crowdboost-model 1";
constexpr std::string_view kReportMagic = "crowdboost-eval-report 1";

struct Line {
    std::size_t number = 0;
    std::string text;
};

// Reads the next non-blank line; strips a trailing CR.
bool next_line(std::istream& in, Line& line)
{
    std::string text;
    while (std::getline(in, text)) {
        ++line.number;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.empty()) continue;
        line.text = std::move(text);
        return true;
    }
    return false;
}

[[noreturn]] void fail(std::string_view file, std::size_t line, const std::string& what)
{
    throw DataError(std::string(file) + " line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_csv(const std::string& text)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        fields.push_back(text.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::optional<double> parse_double(std::string_view text)
{
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view text)
{
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

struct ForecastRow {
    std::size_t line = 0;
    std::string question_id;
    std::string forecaster_id;
    std::optional<Probability> probability;
};

std::vector<ForecastRow> read_forecast_rows(std::istream& in)
{
    constexpr std::string_view file = "forecasts";
    Line line;
    if (!next_line(in, line)) throw DataError("forecasts: file is empty");
    if (line.text != kForecastHeader)
        fail(file, line.number, "expected header '" + std::string(kForecastHeader) + "'");

    std::vector<ForecastRow> rows;
    std::unordered_set<std::string> pairs;
    while (next_line(in, line)) {
        auto fields = split_csv(line.text);
        if (fields.size() != 3) fail(file, line.number, "expected 3 fields");
        if (fields[0].empty() || fields[1].empty()) fail(file, line.number, "empty identifier");
        ForecastRow row{line.number, fields[0], fields[1], std::nullopt};
        if (!fields[2].empty()) {
            const auto value = parse_double(fields[2]);
            if (!value) fail(file, line.number, "probability '" + fields[2] + "' is not a number");
            if (*value < 0.0 || *value > 1.0)
                fail(file, line.number, "probability " + fields[2] + " outside [0,1]");
            row.probability = Probability(*value);
        }
        if (!pairs.insert(row.question_id + '\n' + row.forecaster_id).second)
            fail(file, line.number,
                 "duplicate forecast for question " + row.question_id + " by " + row.forecaster_id);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

ForecastTable parse_table(std::istream& forecasts, std::istream& outcomes)
{
    constexpr std::string_view outcome_file = "outcomes";
    Line line;
    if (!next_line(outcomes, line)) throw DataError("outcomes: file is empty");
    if (line.text != kOutcomeHeader)
        fail(outcome_file, line.number, "expected header '" + std::string(kOutcomeHeader) + "'");

    std::vector<std::string> question_ids;
    std::vector<Outcome> labels;
    std::unordered_map<std::string, std::size_t> question_index;
    while (next_line(outcomes, line)) {
        auto fields = split_csv(line.text);
        if (fields.size() != 2) fail(outcome_file, line.number, "expected 2 fields");
        if (fields[0].empty()) fail(outcome_file, line.number, "empty question_id");
        Outcome y;
        if (fields[1] == "+1") y = Outcome::Positive;
        else if (fields[1] == "-1") y = Outcome::Negative;
        else fail(outcome_file, line.number, "outcome must be +1 or -1, got '" + fields[1] + "'");
        if (!question_index.emplace(fields[0], question_ids.size()).second)
            fail(outcome_file, line.number, "duplicate outcome for question " + fields[0]);
        question_ids.push_back(fields[0]);
        labels.push_back(y);
    }

    const auto rows = read_forecast_rows(forecasts);
    std::vector<std::string> forecaster_ids;
    std::unordered_map<std::string, std::size_t> forecaster_index;
    for (const auto& row : rows) {
        if (!question_index.contains(row.question_id))
            fail("forecasts", row.line, "question " + row.question_id + " has no outcome");
        if (forecaster_index.emplace(row.forecaster_id, forecaster_ids.size()).second)
            forecaster_ids.push_back(row.forecaster_id);
    }

    const std::size_t q = question_ids.size();
    std::vector<std::optional<Probability>> cells(forecaster_ids.size() * q);
    for (const auto& row : rows)
        cells[forecaster_index.at(row.forecaster_id) * q + question_index.at(row.question_id)] =
            row.probability;
    return ForecastTable(std::move(question_ids), std::move(forecaster_ids), std::move(cells),
                         std::move(labels));
}

ForecastSheet parse_forecasts(std::istream& forecasts)
{
    const auto rows = read_forecast_rows(forecasts);
    ForecastSheet sheet;
    std::unordered_map<std::string, std::size_t> q_index;
    std::unordered_map<std::string, std::size_t> f_index;
    for (const auto& row : rows) {
        if (q_index.emplace(row.question_id, sheet.question_ids.size()).second)
            sheet.question_ids.push_back(row.question_id);
        if (f_index.emplace(row.forecaster_id, sheet.forecaster_ids.size()).second)
            sheet.forecaster_ids.push_back(row.forecaster_id);
    }
    const std::size_t q = sheet.question_ids.size();
    sheet.forecasts.resize(sheet.forecaster_ids.size() * q);
    for (const auto& row : rows)
        sheet.forecasts[f_index.at(row.forecaster_id) * q + q_index.at(row.question_id)] =
            row.probability;
    return sheet;
}

ForecastTable load_table(const std::filesystem::path& forecasts_path,
                         const std::filesystem::path& outcomes_path)
{
    std::ifstream forecasts(forecasts_path);
    if (!forecasts) throw DataError("cannot open forecasts file " + forecasts_path.string());
    std::ifstream outcomes(outcomes_path);
    if (!outcomes) throw DataError("cannot open outcomes file " + outcomes_path.string());
    return parse_table(forecasts, outcomes);
}

std::string format_real(double value)
{
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(len));
}

void write_table(const ForecastTable& table, std::ostream& forecasts, std::ostream& outcomes)
{
    forecasts << kForecastHeader << '\n';
    for (std::size_t q = 0; q < table.num_questions(); ++q) {
        for (std::size_t f = 0; f < table.num_forecasters(); ++f) {
            forecasts << table.question_ids()[q] << ',' << table.forecaster_ids()[f] << ',';
            if (auto cell = table.at(f, q)) forecasts << format_real(cell->value());
            forecasts << '\n';
        }
    }
    outcomes << kOutcomeHeader << '\n';
    for (std::size_t q = 0; q < table.num_questions(); ++q)
        outcomes << table.question_ids()[q] << ','
                 << (table.outcome(q) == Outcome::Positive ? "+1" : "-1") << '\n';
}

namespace {

// Line-oriented `key value...` reader shared by model and report files.
class KeyValueReader {
public:
    KeyValueReader(std::istream& in, std::string_view file) : in_(in), file_(file) {}

    void expect_magic(std::string_view magic)
    {
        if (!next_line(in_, line_) || line_.text != magic)
            fail(file_, line_.number, "expected '" + std::string(magic) + "'");
    }

    // Returns the value part of the next line, which must start with `key `.
    std::string value(std::string_view key)
    {
        if (!next_line(in_, line_))
            throw DataError(std::string(file_) + ": unexpected end of file, expected " +
                            std::string(key));
        if (line_.text.size() <= key.size() || line_.text.compare(0, key.size(), key) != 0 ||
            line_.text[key.size()] != ' ')
            fail(file_, line_.number, "expected key '" + std::string(key) + "'");
        return line_.text.substr(key.size() + 1);
    }

    double real(std::string_view key) { return to_real(value(key)); }

    template <typename Int>
    Int integer(std::string_view key)
    {
        return to_int<Int>(value(key));
    }

    double to_real(std::string_view text)
    {
        const auto v = parse_double(text);
        if (!v) fail(file_, line_.number, "bad number '" + std::string(text) + "'");
        return *v;
    }

    template <typename Int>
    Int to_int(std::string_view text)
    {
        const auto v = parse_int<Int>(text);
        if (!v) fail(file_, line_.number, "bad integer '" + std::string(text) + "'");
        return *v;
    }

    // Splits `a b rest...` into `count` leading tokens plus the remainder.
    std::vector<std::string> tokens(const std::string& text, std::size_t count)
    {
        std::vector<std::string> out;
        std::size_t start = 0;
        for (std::size_t i = 0; i < count; ++i) {
            const auto space = text.find(' ', start);
            if (space == std::string::npos) fail(file_, line_.number, "too few fields");
            out.push_back(text.substr(start, space - start));
            start = space + 1;
        }
        out.push_back(text.substr(start));
        return out;
    }

    Outcome outcome(std::string_view text)
    {
        if (text == "+1") return Outcome::Positive;
        if (text == "-1") return Outcome::Negative;
        fail(file_, line_.number, "bad outcome '" + std::string(text) + "'");
    }

    void expect_end()
    {
        if (!next_line(in_, line_) || line_.text != "end")
            fail(file_, line_.number, "expected 'end'");
    }

    std::size_t line() const { return line_.number; }

private:
    std::istream& in_;
    std::string_view file_;
    Line line_;
};

const char* outcome_text(Outcome y) { return y == Outcome::Positive ? "+1" : "-1"; }

}  // namespace

void write_model(const EnsembleModel& model, std::ostream& out)
{
    out << kModelMagic << '\n';
    out << "method " << to_string(model.method) << '\n';
    out << "link " << to_string(model.link) << '\n';
    out << "clip " << format_real(model.clip) << '\n';
    out << "seed " << model.seed << '\n';
    out << "forecaster_count " << model.forecaster_ids.size() << '\n';
    for (const auto& id : model.forecaster_ids) out << "forecaster " << id << '\n';
    out << "round_count " << model.rounds.size() << '\n';
    for (const auto& r : model.rounds)
        out << "round " << r.forecaster << ' ' << format_real(r.alpha) << '\n';
    out << "imputation_count " << model.imputations.size() << '\n';
    for (const auto& imp : model.imputations)
        out << "imputation " << imp.forecaster << ' ' << format_real(imp.value) << ' '
            << imp.question_id << '\n';
    out << "end\n";
}

EnsembleModel read_model(std::istream& in)
{
    KeyValueReader reader(in, "model");
    reader.expect_magic(kModelMagic);
    EnsembleModel model;
    try {
        model.method = parse_method(reader.value("method"));
        model.link = parse_link_name(reader.value("link"));
    } catch (const std::invalid_argument& e) {
        fail("model", reader.line(), e.what());
    }
    model.clip = reader.real("clip");
    model.seed = reader.integer<std::uint64_t>("seed");
    const auto forecasters = reader.integer<std::size_t>("forecaster_count");
    for (std::size_t i = 0; i < forecasters; ++i)
        model.forecaster_ids.push_back(reader.value("forecaster"));
    const auto rounds = reader.integer<std::size_t>("round_count");
    for (std::size_t i = 0; i < rounds; ++i) {
        const auto t = reader.tokens(reader.value("round"), 1);
        model.rounds.push_back({reader.to_int<std::size_t>(t[0]), reader.to_real(t[1])});
    }
    const auto imputations = reader.integer<std::size_t>("imputation_count");
    for (std::size_t i = 0; i < imputations; ++i) {
        const auto t = reader.tokens(reader.value("imputation"), 2);
        model.imputations.push_back(
            {reader.to_int<std::size_t>(t[0]), t[2], reader.to_real(t[1])});
    }
    reader.expect_end();
    model.validate();
    return model;
}

void write_eval_report(const EvalReport& report, std::ostream& out)
{
    out << kReportMagic << '\n';
    out << "method " << to_string(report.method) << '\n';
    out << "iterations " << report.iterations << '\n';
    out << "seed " << report.seed << '\n';
    out << "questions " << report.questions << '\n';
    out << "forecasters " << report.forecasters << '\n';
    out << "prediction_errors " << report.prediction_errors << '\n';
    out << "avg_unique_forecasters " << format_real(report.avg_unique_forecasters) << '\n';
    out << "best_individual_errors " << report.best_individual_errors << '\n';
    out << "mean_individual_errors " << format_real(report.mean_individual_errors) << '\n';
    for (const auto& r : report.per_question)
        out << "question " << outcome_text(r.predicted) << ' ' << outcome_text(r.truth) << ' '
            << format_real(r.probability) << ' ' << r.question_id << '\n';
    out << "end\n";
}

EvalReport read_eval_report(std::istream& in)
{
    KeyValueReader reader(in, "report");
    reader.expect_magic(kReportMagic);
    EvalReport report;
    try {
        report.method = parse_method(reader.value("method"));
    } catch (const std::invalid_argument& e) {
        fail("report", reader.line(), e.what());
    }
    report.iterations = reader.integer<std::size_t>("iterations");
    report.seed = reader.integer<std::uint64_t>("seed");
    report.questions = reader.integer<std::size_t>("questions");
    report.forecasters = reader.integer<std::size_t>("forecasters");
    report.prediction_errors = reader.integer<std::size_t>("prediction_errors");
    report.avg_unique_forecasters = reader.real("avg_unique_forecasters");
    report.best_individual_errors = reader.integer<std::size_t>("best_individual_errors");
    report.mean_individual_errors = reader.real("mean_individual_errors");
    for (std::size_t i = 0; i < report.questions; ++i) {
        const auto t = reader.tokens(reader.value("question"), 3);
        report.per_question.push_back(
            {t[3], reader.outcome(t[0]), reader.outcome(t[1]), reader.to_real(t[2])});
    }
    reader.expect_end();
    if (report.prediction_errors > report.questions)
        throw DataError("report: prediction_errors exceeds questions");
    return report;
}

void print_eval_summary(const EvalReport& report, std::ostream& out)
{
    char row[160];
    out << "Method                     | Prediction Error | Avg. # of Unique Forecasters Used\n";
    std::snprintf(row, sizeof row, "%-26s | %16zu | %s\n", "Best Individual Forecaster",
                  report.best_individual_errors, "1");
    out << row;
    std::snprintf(row, sizeof row, "%-26s | %16zu | %.2f\n",
                  std::string(to_string(report.method)).c_str(), report.prediction_errors,
                  report.avg_unique_forecasters);
    out << row;
    std::snprintf(row, sizeof row, "(mean individual error %.2f over %zu forecasters, %zu questions)\n",
                  report.mean_individual_errors, report.forecasters, report.questions);
    out << row;
}

void write_prediction_report(const PredictionReport& report, std::ostream& out)
{
    out << "crowdboost-prediction-report 1\n";
    out << "method " << to_string(report.method) << '\n';
    out << "questions " << report.questions.size() << '\n';
    if (report.prediction_errors) out << "prediction_errors " << *report.prediction_errors << '\n';
    if (report.score) {
        out << "score_total " << format_real(report.score->total) << '\n';
        out << "score_calibration " << format_real(report.score->calibration) << '\n';
        out << "score_refinement " << format_real(report.score->refinement) << '\n';
        out << "score_bins " << report.score->bins << '\n';
    }
    for (const auto& q : report.questions) {
        out << "question " << outcome_text(q.predicted) << ' '
            << (q.truth ? outcome_text(*q.truth) : "?") << ' ' << format_real(q.probability) << ' '
            << format_real(q.margin) << ' ' << q.question_id << '\n';
    }
    out << "end\n";
}

void print_score_report(const std::string& label, const ScoreReport& report, std::ostream& out)
{
    char row[200];
    std::snprintf(row, sizeof row, "%-24s %14.6f %14.6f %14.6f\n", label.c_str(), report.total,
                  report.calibration, report.refinement);
    out << row;
}

}  // namespace crowdboost
