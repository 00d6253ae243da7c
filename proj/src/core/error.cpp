#include "core/error.hpp"

namespace zscomp {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::io: return "io";
        case ErrorKind::format: return "format";
        case ErrorKind::argument: return "argument";
        case ErrorKind::schema: return "schema";
        case ErrorKind::data: return "data";
        case ErrorKind::config: return "config";
        case ErrorKind::lookup: return "lookup";
        case ErrorKind::size_guard: return "size_guard";
        case ErrorKind::internal: return "internal";
    }
    return "unknown";
}

} // namespace zscomp
