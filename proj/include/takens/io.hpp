#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "takens/embedding.hpp"
#include "takens/series.hpp"

namespace takens {

enum class InputFormat { Auto, Text, Columns, Records };

/// Which dwell durations of an on/off record stream form the series.
enum class DwellSelection { All, On, Off };

[[nodiscard]] InputFormat parse_input_format(std::string_view name);
[[nodiscard]] DwellSelection parse_dwell_selection(std::string_view name);

/// Text: one value per line. Columns: time and value separated by comma, tab
/// or spaces. Records: one JSON object per line, {"state": "on"|"off",
/// "duration": seconds}. Blank lines and lines starting with '#' are skipped.
[[nodiscard]] EventSeries parse_series(std::istream& in, InputFormat format,
                                       DwellSelection dwell = DwellSelection::All,
                                       std::string source_label = "stream");

/// Auto resolves by extension: .jsonl/.ndjson records, .csv/.tsv columns,
/// anything else text.
[[nodiscard]] EventSeries ingest_series(const std::filesystem::path& path, InputFormat format = InputFormat::Auto,
                                        DwellSelection dwell = DwellSelection::All);

/// One value per line at 17 significant digits, preceded by '#' metadata lines.
void write_series(std::ostream& out, const EventSeries& series);
void write_series(const std::filesystem::path& path, const EventSeries& series);

/// One point per line, coordinates space-separated at 17 significant digits.
void write_portrait(const std::filesystem::path& path, const PhasePortrait& portrait);

void write_text_file(const std::filesystem::path& path, std::string_view content);

[[nodiscard]] std::string format_value(double v);

} // namespace takens
