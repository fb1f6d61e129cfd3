#include "cobarforge/chart.hpp"

#include <json.hpp>

#include <sstream>

namespace cobarforge::chart {

using ordered_json = nlohmann::ordered_json;

std::string chart_json(const may::Chart& c)
{
    ordered_json j;
    j["window"] = {{"max_stem", c.window.max_stem}, {"max_filt", c.window.max_filt}};
    j["page"] = c.page;
    j["cells"] = ordered_json::array();
    for (const auto& cell : c.cells) {
        ordered_json jc;
        jc["stem"] = cell.stem;
        jc["filt"] = cell.filt;
        jc["dim"] = cell.dim;
        jc["gens"] = cell.gens;
        j["cells"].push_back(jc);
    }
    j["differentials"] = ordered_json::array();
    for (const auto& a : c.differentials) {
        ordered_json ja;
        ja["page"] = a.page;
        ja["source"] = a.source;
        ja["target"] = a.target;
        j["differentials"].push_back(ja);
    }
    j["conventions"] = c.conventions;
    return j.dump(2) + "\n";
}

std::string ext_chart_json(const std::vector<cobar::ExtCell>& cells, long long max_s,
                           long long max_t, const std::string& conventions)
{
    ordered_json j;
    j["window"] = {{"max_stem", max_t - 0}, {"max_filt", max_s}};
    j["page"] = 2;
    j["cells"] = ordered_json::array();
    for (const auto& cell : cells) {
        ordered_json jc;
        jc["stem"] = cell.t - cell.s;
        jc["filt"] = cell.s;
        jc["dim"] = cell.dim;
        jc["gens"] = cell.gens;
        j["cells"].push_back(jc);
    }
    j["differentials"] = ordered_json::array();
    j["conventions"] = conventions;
    return j.dump(2) + "\n";
}

std::string chart_svg(const std::string& json_text)
{
    ordered_json j = ordered_json::parse(json_text);
    long long max_stem = j["window"]["max_stem"].get<long long>();
    long long max_filt = j["window"]["max_filt"].get<long long>();
    const int cell = 24, margin = 40;
    long long w = margin * 2 + (max_stem + 2) * cell;
    long long h = margin * 2 + (max_filt + 2) * cell;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    auto X = [&](long long stem) { return margin + (stem + 1) * cell; };
    auto Y = [&](long long filt) { return h - margin - (filt + 1) * cell; };
    for (long long s = 0; s <= max_stem; ++s)
        os << "<text x=\"" << X(s) << "\" y=\"" << h - margin / 2
           << "\" font-size=\"9\" text-anchor=\"middle\">" << s << "</text>\n";
    for (long long f = 0; f <= max_filt; ++f)
        os << "<text x=\"" << margin / 2 << "\" y=\"" << Y(f) + 3
           << "\" font-size=\"9\" text-anchor=\"middle\">" << f << "</text>\n";
    for (const auto& c : j["cells"]) {
        long long stem = c["stem"].get<long long>();
        long long filt = c["filt"].get<long long>();
        size_t dim = c["dim"].get<size_t>();
        if (stem < 0 || stem > max_stem || filt > max_filt)
            continue;
        for (size_t k = 0; k < dim; ++k) {
            long long cx = X(stem) + (long long)(k % 3) * 5 - 5;
            long long cy = Y(filt) - (long long)(k / 3) * 5;
            os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"2.2\" fill=\"black\">"
               << "<title>" << c["gens"][k].get<std::string>() << "</title></circle>\n";
        }
    }
    for (const auto& a : j["differentials"]) {
        os << "<!-- d" << a["page"].get<int>() << ": " << a["source"].get<std::string>() << " -> "
           << a["target"].get<std::string>() << " -->\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace cobarforge::chart
