#pragma once

#include <array>
#include <string>
#include <vector>

namespace uwsim {

/// Per-channel medium description: exponential attenuation rate beta (1/m)
/// and the ambient background color A seen where nothing reflects.
struct WaterProfile {
    std::array<double, 3> beta{0.1, 0.1, 0.1};
    std::array<double, 3> veiling{0.8, 0.8, 0.8};
    std::string name;
};

/// Throws std::invalid_argument unless beta > 0 and veiling in [0,1].
void validate(const WaterProfile& profile);

/// Named water-type preset. The built-in table mirrors data/jerlov_presets.txt
/// (a test cross-checks the two); unknown names raise with the valid list.
WaterProfile jerlov_preset(const std::string& name);

const std::vector<WaterProfile>& builtin_water_presets();

/// Parses the preset table format:
///   name beta_R beta_G beta_B A_R A_G A_B  # comment
std::vector<WaterProfile> load_water_presets(const std::string& path);

} // namespace uwsim
