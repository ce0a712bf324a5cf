#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "heightseg/error.hpp"

namespace heightseg {

/// Pipeline configuration. The five class edges are fixed and only echoed in
/// reports; everything else is overridable by a command-line flag of the
/// same name.
struct RunConfig {
    std::filesystem::path annotations;
    std::filesystem::path dsm_dir;
    std::filesystem::path out_dir;
    std::uint64_t split_seed = 0;
    double val_fraction = 0.20;
    double focal_alpha = 0.25;
    double focal_gamma = 2.0;

    /// Checks ranges and that the conversion paths are set.
    void validate() const;
    std::string echo_text() const;
};

/// Parses a flat `key = value` document; '#' starts a comment.
RunConfig load_run_config(const std::filesystem::path& path);

} // namespace heightseg
