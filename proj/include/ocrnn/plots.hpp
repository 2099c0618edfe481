#pragma once

// Minimal static SVG 1.1 charts. Output depends only on the inputs.

#include "ocrnn/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ocrnn {

// Data and prediction as two polylines over x.
std::string fit_svg(const Vector& x, const Vector& y, const Vector& y_hat);

// SSE per iteration; log10 scale when requested (non-positive values are
// clamped to the smallest positive entry).
std::string sse_svg(const std::vector<double>& sse, bool log_scale);

// Both throw InvalidArgument on empty or mismatched input before touching
// the filesystem.
void write_fit_svg(const std::filesystem::path& path, const Vector& x, const Vector& y,
                   const Vector& y_hat);
void write_sse_svg(const std::filesystem::path& path, const std::vector<double>& sse,
                   bool log_scale);

}  // namespace ocrnn
