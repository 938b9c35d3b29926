#pragma once

// Serialization of scan and spectrum results, plus a minimal SVG line plot.
// Numbers are written with 17 significant digits so that CSV and JSON output
// round-trips exactly and identical inputs give identical bytes.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdjc/scans.hpp"

namespace rdjc {

inline constexpr int manifest_schema_version = 1;

std::string format_number(double value);

/// lambda|delta,rung,parity,omega_plus,omega_minus,splitting,rabi
std::string ladder_csv(const LadderScan& scan);
/// omega,intensity
std::string spectrum_csv(const SpectrumResult& spectrum);
/// lambda,pump,g2,mean_photons,n_max,cutoff_valid,critical_limit
std::string g2_csv(const G2Scan& scan);

nlohmann::ordered_json to_json(const SystemParams& p);
nlohmann::ordered_json to_json(const CutoffPolicy& policy);
nlohmann::ordered_json to_json(const ScanMetadata& meta);
nlohmann::ordered_json to_json(const LadderScan& scan);
nlohmann::ordered_json to_json(const SpectrumResult& spectrum);
nlohmann::ordered_json to_json(const G2Scan& scan);

/// Creates parent directories as needed; throws IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& content);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color;  ///< empty picks from the palette
    bool in_legend = true;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    std::vector<PlotSeries> series;
};

/// Axes, polylines and a legend. Non-finite points break a line; degenerate
/// ranges are widened so single-point data still renders.
std::string render_svg(const PlotSpec& plot);

}  // namespace rdjc
