#pragma once

#include "takens/report.hpp"
#include "takens/series.hpp"

namespace takens {

/// normalize → embed → forecast surrogate test → correlation curves for the
/// probe dimensions and the analysis dimension → classify.
///
/// The lag is resolved with suggest_lag when config.auto_lag is set, and the
/// Theiler window with τ·m when config.theiler is 0. The report's config
/// carries the resolved values. `workers` affects speed only.
[[nodiscard]] AnalysisReport run_analysis(const EventSeries& raw, AnalysisConfig config, int workers = 1);

} // namespace takens
