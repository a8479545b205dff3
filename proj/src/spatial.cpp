#include "abccs/spatial.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace abccs {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_cell(const std::string& cell, const std::string& file, std::size_t row,
                  std::size_t col) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw ConfigError(file + ": non-numeric cell '" + cell + "' at row " +
                          std::to_string(row + 1) + ", column " + std::to_string(col + 1));
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

SpatialDataset ingest_spatial(const std::string& stations_csv_path,
                              const std::string& maxima_csv_path) {
    SpatialDataset out;

    const auto station_lines = read_lines(stations_csv_path);
    if (station_lines.empty() || station_lines[0] != "station,x,y")
        throw ConfigError(stations_csv_path + ": expected header 'station,x,y'");
    if (station_lines.size() < 2) throw ConfigError(stations_csv_path + ": no station rows");
    std::map<std::string, std::size_t> station_index;
    for (std::size_t r = 1; r < station_lines.size(); ++r) {
        const auto cells = split_csv(station_lines[r]);
        if (cells.size() != 3)
            throw ConfigError(stations_csv_path + ": expected 3 cells at row " +
                              std::to_string(r + 1));
        const std::string& id = cells[0];
        if (station_index.count(id))
            throw ConfigError(stations_csv_path + ": duplicated station id '" + id + "'");
        const double x = parse_cell(cells[1], stations_csv_path, r, 1);
        const double y = parse_cell(cells[2], stations_csv_path, r, 2);
        if (!std::isfinite(x) || !std::isfinite(y))
            throw ConfigError(stations_csv_path + ": non-finite coordinate for station '" + id +
                              "'");
        station_index[id] = out.station_ids.size();
        out.station_ids.push_back(id);
        out.coordinates.push_back({x, y});
    }

    const auto maxima_lines = read_lines(maxima_csv_path);
    if (maxima_lines.empty()) throw ConfigError(maxima_csv_path + ": empty file");
    const auto header = split_csv(maxima_lines[0]);
    if (header.empty() || header[0] != "year")
        throw ConfigError(maxima_csv_path + ": first header cell must be 'year'");
    if (header.size() != out.station_ids.size() + 1)
        throw ConfigError(maxima_csv_path + ": header has " + std::to_string(header.size() - 1) +
                          " station columns, stations file has " +
                          std::to_string(out.station_ids.size()));
    std::vector<std::size_t> col_to_station;
    std::vector<bool> seen(out.station_ids.size(), false);
    for (std::size_t c = 1; c < header.size(); ++c) {
        const auto it = station_index.find(header[c]);
        if (it == station_index.end())
            throw ConfigError(maxima_csv_path + ": unknown station id '" + header[c] + "'");
        if (seen[it->second])
            throw ConfigError(maxima_csv_path + ": duplicated station column '" + header[c] + "'");
        seen[it->second] = true;
        col_to_station.push_back(it->second);
    }
    if (maxima_lines.size() < 2) throw ConfigError(maxima_csv_path + ": no data rows");

    const std::size_t n = maxima_lines.size() - 1;
    out.maxima = Dataset(n, out.station_ids.size());
    out.years.resize(n);
    for (std::size_t r = 1; r < maxima_lines.size(); ++r) {
        const auto cells = split_csv(maxima_lines[r]);
        if (cells.size() != header.size())
            throw ConfigError(maxima_csv_path + ": expected " + std::to_string(header.size()) +
                              " cells at row " + std::to_string(r + 1));
        const double year = parse_cell(cells[0], maxima_csv_path, r, 0);
        out.years[r - 1] = static_cast<long>(year);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const double v = parse_cell(cells[c], maxima_csv_path, r, c);
            if (!std::isfinite(v))
                throw ConfigError(maxima_csv_path + ": non-finite value at row " +
                                  std::to_string(r + 1) + ", column " + std::to_string(c + 1));
            out.maxima(r - 1, col_to_station[c - 1]) = v;
        }
    }
    return out;
}

void write_spatial(const SpatialDataset& data, const std::string& stations_csv_path,
                   const std::string& maxima_csv_path) {
    {
        std::ofstream s(stations_csv_path);
        if (!s) throw ConfigError("cannot write " + stations_csv_path);
        s << "station,x,y\n";
        for (std::size_t k = 0; k < data.n_stations(); ++k)
            s << data.station_ids[k] << ',' << format_double(data.coordinates[k][0]) << ','
              << format_double(data.coordinates[k][1]) << '\n';
    }
    {
        std::ofstream m(maxima_csv_path);
        if (!m) throw ConfigError("cannot write " + maxima_csv_path);
        m << "year";
        for (const auto& id : data.station_ids) m << ',' << id;
        m << '\n';
        for (std::size_t r = 0; r < data.n_years(); ++r) {
            m << data.years[r];
            for (std::size_t k = 0; k < data.n_stations(); ++k)
                m << ',' << format_double(data.maxima(r, k));
            m << '\n';
        }
    }
}

}  // namespace abccs
