#include "takens/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "takens/errors.hpp"

namespace takens {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view token)
{
    token = trim(token);
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
        return std::nullopt;
    }
    return value;
}

double require_finite(std::string_view token, std::size_t line)
{
    const auto v = parse_number(token);
    if (!v) {
        throw ParseError(line, fmt::format("'{}' is not a number", token));
    }
    if (!std::isfinite(*v)) {
        throw ParseError(line, fmt::format("non-finite value '{}'", token));
    }
    return *v;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> fields;
    const bool delimited = line.find_first_of(",\t") != std::string_view::npos;
    const char* separators = delimited ? ",\t" : " ";
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const auto next = line.find_first_of(separators, pos);
        const auto field = trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (delimited || !field.empty()) {
            fields.push_back(field);
        }
        if (next == std::string_view::npos) {
            break;
        }
        pos = next + 1;
    }
    return fields;
}

/// Recognizes "# source: ..." and "# seed: ..." written by write_series.
void read_comment(std::string_view body, SeriesMetadata& meta)
{
    body = trim(body);
    if (body.starts_with("source:")) {
        meta.source_label = std::string(trim(body.substr(7)));
    } else if (body.starts_with("seed:")) {
        const auto token = trim(body.substr(5));
        std::uint64_t seed = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), seed);
        if (ec == std::errc() && ptr == token.data() + token.size()) {
            meta.seed = seed;
        }
    }
}

} // namespace

InputFormat parse_input_format(std::string_view name)
{
    if (name == "auto") return InputFormat::Auto;
    if (name == "text") return InputFormat::Text;
    if (name == "columns") return InputFormat::Columns;
    if (name == "records") return InputFormat::Records;
    throw InvalidArgument(fmt::format("unknown input format '{}' (auto, text, columns, records)", name));
}

DwellSelection parse_dwell_selection(std::string_view name)
{
    if (name == "all") return DwellSelection::All;
    if (name == "on") return DwellSelection::On;
    if (name == "off") return DwellSelection::Off;
    throw InvalidArgument(fmt::format("unknown dwell selection '{}' (all, on, off)", name));
}

EventSeries parse_series(std::istream& in, InputFormat format, DwellSelection dwell, std::string source_label)
{
    if (format == InputFormat::Auto) {
        format = InputFormat::Text;
    }
    SeriesMetadata meta;
    meta.source_label = std::move(source_label);
    std::vector<double> values;
    std::vector<double> stamps;
    std::string raw;
    std::size_t line_no = 0;
    bool seen_data = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            read_comment(line.substr(1), meta);
            continue;
        }
        switch (format) {
        case InputFormat::Auto:
        case InputFormat::Text:
            values.push_back(require_finite(line, line_no));
            break;
        case InputFormat::Columns: {
            const auto fields = split_fields(line);
            if (fields.size() != 2) {
                throw ParseError(line_no, fmt::format("expected 2 columns (time, value), found {}", fields.size()));
            }
            // A non-numeric first row is a header.
            if (!seen_data && !parse_number(fields[0]) && !parse_number(fields[1])) {
                break;
            }
            stamps.push_back(require_finite(fields[0], line_no));
            values.push_back(require_finite(fields[1], line_no));
            break;
        }
        case InputFormat::Records: {
            nlohmann::json record;
            try {
                record = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw ParseError(line_no, fmt::format("invalid JSON record ({})", e.what()));
            }
            if (!record.is_object() || !record.contains("state") || !record.contains("duration") ||
                !record["state"].is_string() || !record["duration"].is_number()) {
                throw ParseError(line_no, "record needs string 'state' and numeric 'duration'");
            }
            const auto state = record["state"].get<std::string>();
            if (state != "on" && state != "off") {
                throw ParseError(line_no, fmt::format("state must be \"on\" or \"off\", got \"{}\"", state));
            }
            const double duration = record["duration"].get<double>();
            if (!std::isfinite(duration) || duration < 0.0) {
                throw ParseError(line_no, "duration must be finite and non-negative");
            }
            const bool keep = dwell == DwellSelection::All || (dwell == DwellSelection::On && state == "on") ||
                              (dwell == DwellSelection::Off && state == "off");
            if (keep) {
                values.push_back(duration);
            }
            break;
        }
        }
        seen_data = true;
    }
    if (values.empty()) {
        throw EmptyInput(fmt::format("no values in {}", meta.source_label));
    }
    meta.timestamps = std::move(stamps);
    return EventSeries(std::move(values), std::move(meta));
}

EventSeries ingest_series(const std::filesystem::path& path, InputFormat format, DwellSelection dwell)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("cannot open {}", path.string()));
    }
    if (format == InputFormat::Auto) {
        const auto ext = path.extension().string();
        if (ext == ".jsonl" || ext == ".ndjson") {
            format = InputFormat::Records;
        } else if (ext == ".csv" || ext == ".tsv") {
            format = InputFormat::Columns;
        } else {
            format = InputFormat::Text;
        }
    }
    return parse_series(in, format, dwell, path.filename().string());
}

std::string format_value(double v) { return fmt::format("{:.17g}", v); }

void write_series(std::ostream& out, const EventSeries& series)
{
    const auto& meta = series.metadata();
    out << "# source: " << meta.source_label << '\n';
    if (meta.seed) {
        out << "# seed: " << *meta.seed << '\n';
    }
    out << "# length: " << series.size() << '\n';
    for (double v : series.values()) {
        out << format_value(v) << '\n';
    }
}

void write_series(const std::filesystem::path& path, const EventSeries& series)
{
    std::ostringstream buffer;
    write_series(buffer, series);
    write_text_file(path, buffer.str());
}

void write_portrait(const std::filesystem::path& path, const PhasePortrait& portrait)
{
    std::string text = fmt::format("# source: {}\n# dimension: {}\n# lag: {}\n# points: {}\n", portrait.source_label(),
                                   portrait.dimension(), portrait.config().lag, portrait.size());
    for (std::size_t j = 0; j < portrait.size(); ++j) {
        const auto p = portrait.point(j);
        for (std::size_t c = 0; c < p.size(); ++c) {
            text += c ? " " : "";
            text += format_value(p[c]);
        }
        text += '\n';
    }
    write_text_file(path, text);
}

void write_text_file(const std::filesystem::path& path, std::string_view content)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError(fmt::format("cannot write {}", path.string()));
    }
    out << content;
    if (!out) {
        throw IoError(fmt::format("write to {} failed", path.string()));
    }
}

} // namespace takens
