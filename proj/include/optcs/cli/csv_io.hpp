#pragma once

// Header-first CSV interchange. Labeled files carry x_1..x_d, y, c; test
// files carry x_1..x_d, c and optionally y (ground truth). Column order is
// free and d is inferred from the header. Doubles are written in shortest
// round-trip form, so reading back reproduces every value exactly.

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "optcs/core.hpp"

namespace optcs::cli {

std::string format_double(double v);

std::vector<LabeledSample> read_labeled_csv(std::istream& in, std::string_view source);
std::vector<TestSample> read_test_csv(std::istream& in, std::string_view source);

std::vector<LabeledSample> read_labeled_csv_file(const std::string& path);
std::vector<TestSample> read_test_csv_file(const std::string& path);

void write_labeled_csv(std::ostream& out, std::span<const LabeledSample> rows);
void write_test_csv(std::ostream& out, std::span<const TestSample> rows);

}  // namespace optcs::cli
