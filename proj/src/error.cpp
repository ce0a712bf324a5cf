#include "heightseg/error.hpp"

namespace heightseg {

const char* to_string(Errc code) {
    switch (code) {
        case Errc::malformed_document: return "MalformedDocument";
        case Errc::unsupported_segmentation: return "UnsupportedSegmentation";
        case Errc::dangling_reference: return "DanglingReference";
        case Errc::degenerate_polygon: return "DegeneratePolygon";
        case Errc::unknown_format: return "UnknownFormat";
        case Errc::header_mismatch: return "HeaderMismatch";
        case Errc::nonfinite_header: return "NonFiniteHeader";
        case Errc::dimension_mismatch: return "DimensionMismatch";
        case Errc::zero_dimension: return "ZeroDimension";
        case Errc::no_valid_samples: return "NoValidSamples";
        case Errc::empty_mask: return "EmptyMask";
        case Errc::negative_height: return "NegativeHeight";
        case Errc::io_failure: return "IoFailure";
        case Errc::mixed_kinds: return "MixedKinds";
        case Errc::token_count_mismatch: return "TokenCountMismatch";
        case Errc::out_of_range_class: return "OutOfRangeClass";
        case Errc::out_of_range_coordinate: return "OutOfRangeCoordinate";
        case Errc::domain_error: return "DomainError";
        case Errc::empty_dataset: return "EmptyDataset";
        case Errc::dimension_unknown: return "DimensionUnknown";
    }
    return "UnknownError";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace heightseg
