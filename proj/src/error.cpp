#include "hrdc/error.hpp"

#include <fstream>
#include <iterator>

#include "hrdc/byte_io.hpp"

namespace hrdc {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidList: return "InvalidList";
        case ErrorCode::InvalidGaps: return "InvalidGaps";
        case ErrorCode::ValueTooLarge: return "ValueTooLarge";
        case ErrorCode::CorruptStream: return "CorruptStream";
        case ErrorCode::UniverseMismatch: return "UniverseMismatch";
        case ErrorCode::MissingSamples: return "MissingSamples";
        case ErrorCode::ReservedSymbol: return "ReservedSymbol";
        case ErrorCode::UnknownSymbol: return "UnknownSymbol";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::BackendError: return "BackendError";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot create " + path);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

}  // namespace hrdc
