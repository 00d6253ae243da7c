#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace testutil {

// Self-cleaning scratch directory for file-format tests.
struct TempDir {
    std::string path;

    TempDir() {
        std::string tmpl =
            (std::filesystem::temp_directory_path() / "zscomp_test_XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        char* made = mkdtemp(buf.data());
        path = made ? made : tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const {
        return (std::filesystem::path(path) / name).string();
    }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs fn and reports which ErrorKind it raised, if any.
template <typename Fn>
std::optional<zscomp::ErrorKind> raised_kind(Fn&& fn) {
    try {
        fn();
    } catch (const zscomp::Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

// Captures the error message for content checks.
template <typename Fn>
std::string raised_message(Fn&& fn) {
    try {
        fn();
    } catch (const zscomp::Error& e) {
        return e.what();
    }
    return "";
}

} // namespace testutil
