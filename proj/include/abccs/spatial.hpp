#pragma once

#include <array>
#include <string>

#include "abccs/matrix.hpp"

namespace abccs {

/// Station coordinates plus the year x station block of maxima. Stations are
/// kept in stations-file order; maxima columns are reordered to match.
struct SpatialDataset {
    std::vector<std::string> station_ids;
    std::vector<std::array<double, 2>> coordinates;  // km
    std::vector<long> years;
    Dataset maxima;  // n_years x q

    std::size_t n_years() const { return years.size(); }
    std::size_t n_stations() const { return station_ids.size(); }
};

/// Parse and cross-validate the two CSV files:
///   stations: header "station,x,y", one row per station
///   maxima:   header "year,<station ids...>", one row per year
/// Errors are addressed by file, row and column. Missing values are not
/// supported.
SpatialDataset ingest_spatial(const std::string& stations_csv_path,
                              const std::string& maxima_csv_path);

/// Emit the dataset back to the two-file CSV form (shortest round-trip
/// number formatting).
void write_spatial(const SpatialDataset& data, const std::string& stations_csv_path,
                   const std::string& maxima_csv_path);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace abccs
