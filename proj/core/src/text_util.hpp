#pragma once

// Internal helpers for literals and two-column CSV inputs.

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace insider::detail {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

std::string_view trim(std::string_view s);

/// Strict decimal parse of the whole string; throws ValidationError naming `field`.
double parse_double(std::string_view text, std::string_view field);

/// Shortest round-tripping decimal form.
std::string format_double(double value);

/// Reads a CSV whose header is exactly "<first>,<second>". Throws
/// ValidationError with the file and line number on any malformed row.
std::vector<std::pair<double, double>> read_two_column_csv(const std::filesystem::path& path,
                                                           std::string_view first,
                                                           std::string_view second);

}  // namespace insider::detail
