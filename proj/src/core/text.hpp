#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace zscomp {

std::string_view trim(std::string_view s);
std::string lower_ascii(std::string_view s);

// Label tokenization: split on whitespace and underscores, lowercase ASCII,
// strip ASCII punctuation, drop tokens that end up empty.
std::vector<std::string> tokenize_label(std::string_view label);

// Normalization applied to embedding-file tokens so lookups from
// tokenize_label hit them: lowercase + punctuation strip, no splitting.
std::string normalize_token(std::string_view token);

// Minimal RFC-4180 style CSV: fields containing comma, quote or newline are
// quoted, embedded quotes doubled.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

// Fixed decimal rendering for exported reals: %.9g, enough for float
// round-trips and byte-stable across runs.
std::string format_real(double value);

bool parse_double(std::string_view text, double& out);
bool parse_uint(std::string_view text, uint64_t& out);

// Throwing variants; `where` names the source location in the format error.
double parse_double(std::string_view text, const std::string& where);
uint64_t parse_uint(std::string_view text, const std::string& where);

std::string read_text_file(const std::string& path);

// Filesystem-safe slug for per-action file names.
std::string slugify(std::string_view label, size_t max_len = 48);

} // namespace zscomp
