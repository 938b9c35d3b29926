#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rdjc::cli {

enum ExitCode : int {
    Success = 0,
    CheckFailed = 1,
    ConfigFailure = 2,
    PhysicsFailure = 3,
    NumericalFailure = 4,
    IoFailure = 5,
};

/// Directory holding fig1.toml ... fig4.toml; RDJC_PRESET_DIR overrides.
std::filesystem::path preset_directory();

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rdjc::cli
