#pragma once

#include <string>

#include "uwsim/image.hpp"

namespace uwsim {

/// Reads an 8- or 16-bit RGB PNG; integer samples map linearly onto [0,1].
/// Anything else (grayscale, palette, alpha) is rejected with the path and
/// reason in the message.
ImagePlane load_rgb(const std::string& path);

/// 16-bit RGB PNG; samples are clamped to [0,1] and quantized with
/// round(v * 65535), so a save/load round trip moves each sample by at
/// most 1/(2*65535).
void save_rgb16(const ImagePlane& img, const std::string& path);
void save_rgb8(const ImagePlane& img, const std::string& path);

/// Depth loader. ".f32" files use the raw float-plane container below,
/// anything else must be a single-channel 16-bit PNG. Values become
/// raw * scale meters and are clamped into [z_min, z_max].
DepthMap load_depth(const std::string& path, double scale, double z_min, double z_max);

/// 16-bit grayscale PNG with raw = round(meters / scale).
void save_depth_png16(const DepthMap& depth, const std::string& path, double scale);

// Raw float-plane container: 8-byte header (uint32 width, uint32 height,
// both little-endian) followed by row-major float32 little-endian samples.
// One plane for depth, three consecutive planes for an image; the count is
// inferred from the file size.
void save_f32(const DepthMap& depth, const std::string& path);
void save_f32(const ImagePlane& img, const std::string& path);
DepthMap load_f32_plane(const std::string& path);
ImagePlane load_f32_image(const std::string& path);

/// True if the file holds three planes (see container note above).
bool f32_is_image(const std::string& path);

/// IEC 61966-2-1 sRGB electro-optical transfer, for datasets whose PNGs are
/// sRGB-encoded rather than linear radiance.
ImagePlane srgb_to_linear(const ImagePlane& img);

} // namespace uwsim
