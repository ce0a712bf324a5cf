#pragma once

#include <stdexcept>
#include <string>

namespace heightseg {

enum class Errc {
    malformed_document,
    unsupported_segmentation,
    dangling_reference,
    degenerate_polygon,
    unknown_format,
    header_mismatch,
    nonfinite_header,
    dimension_mismatch,
    zero_dimension,
    no_valid_samples,
    empty_mask,
    negative_height,
    io_failure,
    mixed_kinds,
    token_count_mismatch,
    out_of_range_class,
    out_of_range_coordinate,
    domain_error,
    empty_dataset,
    dimension_unknown,
};

const char* to_string(Errc code);

/// Error with a stable machine-checkable code plus a human message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

} // namespace heightseg
