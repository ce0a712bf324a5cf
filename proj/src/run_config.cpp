#include "heightseg/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "heightseg/height_class.hpp"

namespace heightseg {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& value, const std::string& context) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        raise(Errc::malformed_document, context + ": expected a number, got '" + value + "'");
    }
    return out;
}

} // namespace

void RunConfig::validate() const {
    if (annotations.empty() || dsm_dir.empty() || out_dir.empty()) {
        raise(Errc::malformed_document,
              "config must set 'annotations', 'dsm_dir' and 'out_dir'");
    }
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
        raise(Errc::domain_error, "val_fraction must be in (0,1)");
    }
}

std::string RunConfig::echo_text() const {
    std::ostringstream out;
    out << "configuration\n";
    out << "  annotations  " << annotations.string() << "\n";
    out << "  dsm_dir      " << dsm_dir.string() << "\n";
    out << "  out_dir      " << out_dir.string() << "\n";
    out << "  split_seed   " << split_seed << "\n";
    out << "  val_fraction " << val_fraction << "\n";
    out << "  focal_alpha  " << focal_alpha << "\n";
    out << "  focal_gamma  " << focal_gamma << "\n";
    out << "  class_edges ";
    for (const HeightClassRange& range : height_class_ranges()) {
        out << "  " << range.cls << ":" << range.range_text();
    }
    out << "\n";
    return std::move(out).str();
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::io_failure, "cannot open config file " + path.string());
    }
    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        const std::string context = path.string() + ":" + std::to_string(line_no);
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            raise(Errc::malformed_document, context + ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "annotations") {
            config.annotations = value;
        } else if (key == "dsm_dir") {
            config.dsm_dir = value;
        } else if (key == "out_dir") {
            config.out_dir = value;
        } else if (key == "split_seed") {
            const double n = parse_number(value, context);
            if (n < 0 || n != static_cast<double>(static_cast<std::uint64_t>(n))) {
                raise(Errc::malformed_document, context + ": split_seed must be a nonnegative integer");
            }
            config.split_seed = static_cast<std::uint64_t>(n);
        } else if (key == "val_fraction") {
            config.val_fraction = parse_number(value, context);
        } else if (key == "focal_alpha") {
            config.focal_alpha = parse_number(value, context);
        } else if (key == "focal_gamma") {
            config.focal_gamma = parse_number(value, context);
        } else {
            raise(Errc::malformed_document, context + ": unknown key '" + key + "'");
        }
    }
    return config;
}

} // namespace heightseg
