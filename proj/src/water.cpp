#include "uwsim/water.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uwsim {

void validate(const WaterProfile& profile) {
    for (int c = 0; c < 3; ++c) {
        if (!(profile.beta[c] > 0.0)) {
            throw std::invalid_argument("water profile '" + profile.name +
                                        "': beta must be > 0 in every channel");
        }
        if (profile.veiling[c] < 0.0 || profile.veiling[c] > 1.0) {
            throw std::invalid_argument("water profile '" + profile.name +
                                        "': veiling light must be in [0,1]");
        }
    }
}

const std::vector<WaterProfile>& builtin_water_presets() {
    // Same rows as data/jerlov_presets.txt; see that file for provenance.
    static const std::vector<WaterProfile> presets = {
        {{0.233, 0.044, 0.018}, {0.273, 0.702, 0.800}, "I"},
        {{0.234, 0.048, 0.023}, {0.279, 0.706, 0.800}, "IA"},
        {{0.236, 0.053, 0.031}, {0.287, 0.717, 0.800}, "IB"},
        {{0.245, 0.069, 0.056}, {0.311, 0.750, 0.800}, "II"},
        {{0.263, 0.102, 0.116}, {0.358, 0.800, 0.746}, "III"},
        {{0.271, 0.120, 0.143}, {0.376, 0.800, 0.713}, "1C"},
        {{0.290, 0.170, 0.224}, {0.439, 0.800, 0.611}, "3C"},
        {{0.320, 0.230, 0.305}, {0.510, 0.800, 0.550}, "5C"},
        {{0.370, 0.350, 0.460}, {0.724, 0.800, 0.462}, "7C"},
        {{0.420, 0.500, 0.660}, {0.800, 0.536, 0.241}, "9C"},
    };
    return presets;
}

WaterProfile jerlov_preset(const std::string& name) {
    for (const WaterProfile& p : builtin_water_presets()) {
        if (p.name == name) return p;
    }
    std::string valid;
    for (const WaterProfile& p : builtin_water_presets()) {
        if (!valid.empty()) valid += ", ";
        valid += p.name;
    }
    throw std::invalid_argument("unknown water preset '" + name + "'; valid presets: " + valid);
}

std::vector<WaterProfile> load_water_presets(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error(path + ": cannot open preset file");
    std::vector<WaterProfile> presets;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        WaterProfile p;
        if (!(row >> p.name)) continue; // blank or comment-only line
        if (!(row >> p.beta[0] >> p.beta[1] >> p.beta[2] >>
              p.veiling[0] >> p.veiling[1] >> p.veiling[2])) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 'name bR bG bB aR aG aB'");
        }
        validate(p);
        presets.push_back(std::move(p));
    }
    return presets;
}

} // namespace uwsim
