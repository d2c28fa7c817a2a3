#ifndef PASIM_PLOT_SCRIPT_HPP
#define PASIM_PLOT_SCRIPT_HPP

/// @file
/// Turns a results CSV into a gnuplot script: outage versus transmit power on a logarithmic
/// y axis, one series per (scheme, T). The data is inlined, so the script is self-contained.

#include "pasim/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pasim
{

class PlotScriptError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

namespace detail
{

inline std::string plot_number(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace detail

inline std::string plot_script_from_csv_text(std::string_view csv)
{
    std::vector<std::string_view> lines;
    for (auto line : split(csv, '\n'))
        if (!line.empty())
            lines.push_back(line);
    if (lines.empty())
        throw PlotScriptError("plot-script: CSV is empty");

    const auto header = split(lines[0], ',');
    auto column = [&](std::string_view name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw PlotScriptError("plot-script: CSV lacks column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto c_scheme = column("scheme");
    const auto c_T = column("T");
    const auto c_pt = column("pt_dbm");
    const auto c_out = column("outage_closed");
    if (lines.size() < 2)
        throw PlotScriptError("plot-script: CSV has no data rows");

    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<double, double>>> series;
    for (std::size_t i = 1; i < lines.size(); ++i)
    {
        const auto f = split(lines[i], ',');
        if (f.size() != header.size())
            throw PlotScriptError("plot-script: row " + std::to_string(i) + " has " + std::to_string(f.size()) +
                                  " fields, header has " + std::to_string(header.size()));
        const std::pair<std::string, std::string> key{std::string(f[c_scheme]), std::string(f[c_T])};
        if (!series.contains(key))
            order.push_back(key);
        try
        {
            series[key].emplace_back(parse_double("pt_dbm", f[c_pt]), parse_double("outage_closed", f[c_out]));
        }
        catch (const ConfigError& e)
        {
            throw PlotScriptError("plot-script: row " + std::to_string(i) + ": " + e.what());
        }
    }

    std::ostringstream out;
    out << "# gnuplot script: outage probability versus transmit power\n";
    out << "set logscale y\n";
    out << "set format y '10^{%L}'\n";
    out << "set xlabel 'Transmit power (dBm)'\n";
    out << "set ylabel 'Outage probability'\n";
    out << "set key outside right\n";
    out << "set grid\n";
    for (std::size_t k = 0; k < order.size(); ++k)
    {
        auto pts = series[order[k]];
        std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        out << "$s" << k << " << EOD\n";
        for (const auto& [x, y] : pts)
            out << detail::plot_number(x) << ' ' << detail::plot_number(y) << '\n';
        out << "EOD\n";
    }
    out << "plot ";
    for (std::size_t k = 0; k < order.size(); ++k)
        out << (k ? ", \\\n     " : "") << "$s" << k << " using 1:2 with linespoints title '" << order[k].first
            << ", T=" << order[k].second << "'";
    out << '\n';
    return out.str();
}

inline std::string plot_script_from_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw PlotScriptError("plot-script: cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return plot_script_from_csv_text(ss.str());
}

} // namespace pasim

#endif // PASIM_PLOT_SCRIPT_HPP
